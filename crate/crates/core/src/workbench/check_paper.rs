//! Property suites run against a single category. Each suite decides for
//! itself whether it applies. Inapplicable suites are reported as skipped,
//! the rest as passing or failing with a short detail line.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::category::{validate_category, Caps, FinCat, ObjId};
use crate::epi::{
    classify, effective_epis, effective_family_via_sheaf, is_effective_epi, is_effective_epi_family,
    is_epi,
};
use crate::error::{Error, Result};
use crate::limits::{kernel_pair, replay_witness};
use crate::presheaf::{random_presheaf, representable, Presheaf};
use crate::sheaf::{
    equalizer_condition, is_projective, is_sheaf_for_coverage, is_sheaf_for_presieve,
    is_sheaf_for_sieve, is_sheaf_for_topology, preserves_finite_products_with, Budget,
};
use crate::sieve::{generate, Presieve};
use crate::topology::{
    check_coverage, check_topology, coherent_coverage, direct_topology, effective_presieves,
    extensive_coverage, generated_by_union, is_finitary_extensive, is_precoherent, is_preregular,
    regular_coverage, saturate, Coverage, CoproductTable, GrothTopology, Named,
};
use crate::workbench::generators::{
    decode_fintop_morphism, decode_fintop_object, decode_skeleton_morphism, final_topology,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub id: &'static str,
    pub status: Status,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} ({})", self.status, self.id, self.detail)
    }
}

struct Ctx {
    c: Arc<FinCat>,
    caps: Caps,
    budget: Budget,
    named: OnceLock<Vec<(Named, Coverage, Result<GrothTopology>)>>,
}

type SuiteFn = fn(&Ctx) -> Result<(Status, String)>;

pub struct Suite {
    pub id: &'static str,
    pub summary: &'static str,
    run: SuiteFn,
}

const SAMPLE_PRESHEAVES: usize = 24;
const SAMPLE_PAIRS: usize = 60;

pub fn suites() -> &'static [Suite] {
    &[
        Suite { id: "category-laws", summary: "identity and associativity laws hold", run: category_laws },
        Suite { id: "coherent-sheaf-characterizations", summary: "coherent sheaves are the product-preserving presheaves with the equalizer condition", run: coherent_characterizations },
        Suite { id: "coverage-axioms", summary: "the regular, extensive and coherent coverages satisfy the coverage axiom", run: coverage_axioms },
        Suite { id: "effective-family-composition", summary: "effective families of effective families compose to effective families", run: family_composition },
        Suite { id: "effective-family-two-routes", summary: "effective epimorphic families agree with the representable-sheaf criterion", run: family_two_routes },
        Suite { id: "epi-hierarchy", summary: "regular implies effective implies epi, and effective with a kernel pair is regular", run: epi_hierarchy },
        Suite { id: "extensive-sheaves-preserve-products", summary: "extensive sheaves are exactly the product-preserving presheaves", run: extensive_products },
        Suite { id: "finset-surjections", summary: "effective epimorphisms of finite sets are the surjections", run: finset_surjections },
        Suite { id: "fintop-quotients", summary: "epimorphisms are surjections and effective epimorphisms are quotient maps", run: fintop_quotients },
        Suite { id: "kernel-pair-replay", summary: "kernel pair witnesses replay their mediators", run: kernel_pair_replay },
        Suite { id: "precoherent-from-regular-extensive", summary: "preregular and finitary extensive imply precoherent", run: precoherent_from_parts },
        Suite { id: "projective-regular-sheaves", summary: "with all objects projective every presheaf is a regular sheaf", run: projective_regular },
        Suite { id: "saturation-is-topology", summary: "saturating a coverage yields a Grothendieck topology", run: saturation_is_topology },
        Suite { id: "saturation-matches-direct", summary: "saturated coverages match the direct covering-sieve descriptions", run: saturation_matches_direct },
        Suite { id: "sheaf-coverage-vs-topology", summary: "a sheaf for a coverage is a sheaf for its saturation", run: coverage_vs_topology },
        Suite { id: "sheaf-presieve-vs-generated", summary: "a sheaf for a presieve is a sheaf for the generated sieve", run: presieve_vs_generated },
        Suite { id: "subcanonical", summary: "representables are sheaves for the named coverages", run: subcanonical },
        Suite { id: "union-generates-coherent", summary: "regular and extensive together generate the coherent topology", run: union_generates_coherent },
    ]
}

/// Runs the selected suites (all when `ids` is `None`) on `jobs` threads.
/// Results are sorted by suite id whatever the thread count.
pub fn run_suites(
    c: &Arc<FinCat>,
    ids: Option<&[String]>,
    jobs: usize,
    caps: &Caps,
    budget: Budget,
) -> Result<Vec<Outcome>> {
    let selected: Vec<&Suite> = match ids {
        None => suites().iter().collect(),
        Some(ids) => ids
            .iter()
            .map(|id| {
                suites()
                    .iter()
                    .find(|s| s.id == id)
                    .ok_or_else(|| Error::PreconditionFailed(format!("unknown suite {id:?}")))
            })
            .collect::<Result<_>>()?,
    };
    let ctx = Ctx {
        c: c.clone(),
        caps: *caps,
        budget,
        named: OnceLock::new(),
    };
    let run = |s: &&Suite| -> Outcome {
        let (status, detail) = match (s.run)(&ctx) {
            Ok(r) => r,
            Err(e) => (Status::Skip, format!("not applicable: {e}")),
        };
        Outcome { id: s.id, status, detail }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::PreconditionFailed(format!("thread pool: {e}")))?;
    let mut out: Vec<Outcome> = pool.install(|| selected.par_iter().map(run).collect());
    out.sort_by(|a, b| a.id.cmp(b.id));
    Ok(out)
}

fn verdict(failures: usize, checked: usize, what: &str) -> (Status, String) {
    if failures == 0 {
        (Status::Pass, format!("checked {checked} {what}"))
    } else {
        (Status::Fail, format!("{failures} of {checked} {what} failed"))
    }
}

fn rng_for(ctx: &Ctx, salt: u64) -> ChaCha8Rng {
    let seed = ctx
        .c
        .name()
        .bytes()
        .fold(salt ^ 0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed)
}

fn sample_presheaves(ctx: &Ctx, salt: u64, n: usize) -> Vec<Presheaf> {
    let mut rng = rng_for(ctx, salt);
    (0..n)
        .filter_map(|_| random_presheaf(&ctx.c, 2, &mut rng))
        .collect()
}

/// The named coverages that apply, each with its saturation.
fn named_coverages(ctx: &Ctx) -> &[(Named, Coverage, Result<GrothTopology>)] {
    ctx.named.get_or_init(|| {
        let c = &ctx.c;
        let mut out = Vec::new();
        if let Ok(cov) = regular_coverage(c) {
            out.push((Named::Regular, cov));
        }
        if let Ok(cov) = extensive_coverage(c) {
            out.push((Named::Extensive, cov));
        }
        if let Ok(cov) = coherent_coverage(c, &ctx.caps) {
            out.push((Named::Coherent, cov));
        }
        out.into_iter()
            .map(|(n, cov)| {
                let t = saturate(&cov, &ctx.caps);
                (n, cov, t)
            })
            .collect()
    })
}

fn named(ctx: &Ctx, which: Named) -> Option<(&Coverage, Result<&GrothTopology>)> {
    named_coverages(ctx)
        .iter()
        .find(|(n, _, _)| *n == which)
        .map(|(_, cov, t)| (cov, t.as_ref().map_err(Clone::clone)))
}

/// Appended to failures of results whose hypotheses include finite
/// coproducts, which the relaxed extensivity check does not demand.
fn coproduct_note(c: &FinCat) -> String {
    match CoproductTable::of(c).and_then(|t| t.missing()) {
        Some((x, y)) => format!(
            "; binary coproduct {}+{} does not exist",
            c.object_name(x),
            c.object_name(y)
        ),
        None => String::new(),
    }
}

fn category_laws(ctx: &Ctx) -> Result<(Status, String)> {
    let report = validate_category(&ctx.c);
    Ok(if report.is_ok() {
        (Status::Pass, format!("{} morphisms", ctx.c.morphism_count()))
    } else {
        (Status::Fail, report.to_string())
    })
}

fn epi_hierarchy(ctx: &Ctx) -> Result<(Status, String)> {
    let c = &ctx.c;
    let failures = c
        .morphisms()
        .filter(|&f| {
            let k = classify(c, f);
            (k.is_effective_epi && !k.is_epi)
                || (k.is_regular_epi && !k.is_effective_epi)
                || (k.is_effective_epi && k.has_kernel_pair() && !k.is_regular_epi)
        })
        .count();
    Ok(verdict(failures, c.morphism_count(), "morphisms"))
}

fn kernel_pair_replay(ctx: &Ctx) -> Result<(Status, String)> {
    let c = &ctx.c;
    let mut found = 0;
    let mut failures = 0;
    for f in c.morphisms() {
        if let Some(w) = kernel_pair(c, f) {
            found += 1;
            if !replay_witness(c, &w) {
                failures += 1;
            }
        }
    }
    Ok(verdict(failures, found, "kernel pairs"))
}

/// Objects with few enough morphisms into them to try every presieve.
fn small_objects(c: &FinCat, limit: usize) -> Vec<ObjId> {
    c.objects().filter(|&x| c.incoming(x).len() <= limit).collect()
}

fn all_presieves(c: &FinCat, x: ObjId) -> impl Iterator<Item = Presieve> + '_ {
    let into = c.incoming(x);
    (0u64..1 << into.len()).map(move |mask| {
        Presieve::new(c, x, (0..into.len()).filter(|i| mask >> i & 1 == 1).map(|i| into[i]))
            .expect("typed")
    })
}

fn family_two_routes(ctx: &Ctx) -> Result<(Status, String)> {
    let c = &ctx.c;
    let objs = small_objects(c, 8);
    if objs.is_empty() {
        return Ok((Status::Skip, "every object has too many incoming morphisms".into()));
    }
    let (mut checked, mut failures) = (0, 0);
    for x in objs {
        for p in all_presieves(c, x) {
            checked += 1;
            if is_effective_epi_family(c, &p) != effective_family_via_sheaf(c, &p) {
                failures += 1;
            }
        }
    }
    Ok(verdict(failures, checked, "presieves"))
}

fn finset_surjections(ctx: &Ctx) -> Result<(Status, String)> {
    let c = &ctx.c;
    let mut failures = 0;
    for f in c.morphisms() {
        let Some((_, k, d)) = decode_skeleton_morphism(c, f) else {
            return Ok((Status::Skip, "not a finite-set skeleton".into()));
        };
        let surjective = (0..k).all(|y| d.contains(&y));
        if is_effective_epi(c, f) != surjective || is_epi(c, f) != surjective {
            failures += 1;
        }
    }
    Ok(verdict(failures, c.morphism_count(), "morphisms"))
}

fn fintop_quotients(ctx: &Ctx) -> Result<(Status, String)> {
    let c = &ctx.c;
    let mut failures = 0;
    for f in c.morphisms() {
        let (Some(src), Some(dst), Some(map)) = (
            decode_fintop_object(c, c.dom(f)),
            decode_fintop_object(c, c.cod(f)),
            decode_fintop_morphism(c, f),
        ) else {
            return Ok((Status::Skip, "not a category of finite spaces".into()));
        };
        let surjective = (0..dst.points).all(|y| map.contains(&y));
        let quotient = surjective && final_topology(&src, dst.points, &map) == dst.opens;
        if is_epi(c, f) != surjective || is_effective_epi(c, f) != quotient {
            failures += 1;
        }
    }
    Ok(verdict(failures, c.morphism_count(), "morphisms"))
}

fn no_coverage() -> Result<(Status, String)> {
    Ok((Status::Skip, "no named coverage applies".into()))
}

fn coverage_axioms(ctx: &Ctx) -> Result<(Status, String)> {
    let covs = named_coverages(ctx);
    if covs.is_empty() {
        return no_coverage();
    }
    let failures = covs.iter().filter(|(_, cov, _)| !check_coverage(cov).is_ok()).count();
    Ok(verdict(failures, covs.len(), "coverages"))
}

fn saturation_is_topology(ctx: &Ctx) -> Result<(Status, String)> {
    let covs = named_coverages(ctx);
    if covs.is_empty() {
        return no_coverage();
    }
    let mut failures = 0;
    for (_, _, t) in covs {
        let t = t.as_ref().map_err(Clone::clone)?;
        if !check_topology(t, &ctx.caps)?.is_ok() {
            failures += 1;
        }
    }
    Ok(verdict(failures, covs.len(), "saturations"))
}

fn saturation_matches_direct(ctx: &Ctx) -> Result<(Status, String)> {
    let covs = named_coverages(ctx);
    if covs.is_empty() {
        return no_coverage();
    }
    let mut failures = 0;
    for (which, _, t) in covs {
        if *t.as_ref().map_err(Clone::clone)? != direct_topology(&ctx.c, *which, &ctx.caps)? {
            failures += 1;
        }
    }
    Ok(verdict(failures, covs.len(), "topologies"))
}

/// The coherent coverage and its saturation, or the reason it is unavailable.
fn coherent(ctx: &Ctx) -> Result<(&Coverage, &GrothTopology)> {
    match named(ctx, Named::Coherent) {
        Some((cov, t)) => Ok((cov, t?)),
        None => Err(coherent_coverage(&ctx.c, &ctx.caps)
            .err()
            .unwrap_or_else(|| Error::PreconditionFailed("coherent coverage unavailable".into()))),
    }
}

fn union_generates_coherent(ctx: &Ctx) -> Result<(Status, String)> {
    let (Some((reg, _)), Some((ext, _))) = (named(ctx, Named::Regular), named(ctx, Named::Extensive)) else {
        return Ok((Status::Skip, "not both preregular and finitary extensive".into()));
    };
    let (_, coh) = coherent(ctx)?;
    let union = generated_by_union(reg, ext, &ctx.caps)?;
    if union == *coh {
        return Ok((Status::Pass, "topologies agree at every object".into()));
    }
    let c = &ctx.c;
    let x = c
        .objects()
        .find(|&x| union.covering(x) != coh.covering(x))
        .expect("topologies differ somewhere");
    Ok((
        Status::Fail,
        format!("topologies differ at {}{}", c.object_name(x), coproduct_note(c)),
    ))
}

fn precoherent_from_parts(ctx: &Ctx) -> Result<(Status, String)> {
    let c = &ctx.c;
    if !(is_preregular(c).holds() && is_finitary_extensive(c).holds()) {
        return Ok((Status::Skip, "premises do not hold".into()));
    }
    let ok = is_precoherent(c, &ctx.caps)?.holds();
    Ok(verdict(usize::from(!ok), 1, "implications"))
}

fn subcanonical(ctx: &Ctx) -> Result<(Status, String)> {
    let covs = named_coverages(ctx);
    if covs.is_empty() {
        return no_coverage();
    }
    let mut failures = 0;
    let mut checked = 0;
    for (_, cov, _) in covs {
        for w in ctx.c.objects() {
            checked += 1;
            if !is_sheaf_for_coverage(&representable(&ctx.c, w), cov, Budget::UNLIMITED)? {
                failures += 1;
            }
        }
    }
    Ok(verdict(failures, checked, "representable checks"))
}

fn coverage_vs_topology(ctx: &Ctx) -> Result<(Status, String)> {
    let covs = named_coverages(ctx);
    if covs.is_empty() {
        return no_coverage();
    }
    let sample = sample_presheaves(ctx, 1, SAMPLE_PRESHEAVES);
    let (mut checked, mut failures) = (0, 0);
    for (_, cov, t) in covs {
        let t = t.as_ref().map_err(Clone::clone)?;
        for p in &sample {
            checked += 1;
            if is_sheaf_for_coverage(p, cov, ctx.budget)? != is_sheaf_for_topology(p, t, ctx.budget)? {
                failures += 1;
            }
        }
    }
    Ok(verdict(failures, checked, "presheaf checks"))
}

fn presieve_vs_generated(ctx: &Ctx) -> Result<(Status, String)> {
    let c = &ctx.c;
    let mut rng = rng_for(ctx, 2);
    let (mut checked, mut failures) = (0, 0);
    for _ in 0..SAMPLE_PAIRS {
        let Some(p) = random_presheaf(c, 2, &mut rng) else {
            continue;
        };
        let x = ObjId(rng.gen_range(0..c.object_count()) as u32);
        let members: Vec<_> = c.incoming(x).iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let s = Presieve::new(c, x, members)?;
        let lhs = is_sheaf_for_presieve(&p, &s, ctx.budget);
        let rhs = is_sheaf_for_sieve(&p, &generate(c, &s), ctx.budget);
        if let (Ok(a), Ok(b)) = (lhs, rhs) {
            checked += 1;
            if a != b {
                failures += 1;
            }
        }
    }
    Ok(verdict(failures, checked, "presheaf and presieve pairs"))
}

fn extensive_products(ctx: &Ctx) -> Result<(Status, String)> {
    let Some((_, t)) = named(ctx, Named::Extensive) else {
        return Ok((Status::Skip, "not finitary extensive".into()));
    };
    let t = t?;
    let table = CoproductTable::of_extensive(&ctx.c)?;
    let sample = sample_presheaves(ctx, 3, SAMPLE_PRESHEAVES);
    let mut failures = 0;
    for p in &sample {
        if is_sheaf_for_topology(p, t, ctx.budget)? != preserves_finite_products_with(p, &table) {
            failures += 1;
        }
    }
    Ok(verdict(failures, sample.len(), "presheaves"))
}

/// Product preservation plus the equalizer condition at every effective
/// epimorphism that has a kernel pair.
pub fn products_and_equalizers(p: &Presheaf, table: &CoproductTable) -> Result<bool> {
    if !preserves_finite_products_with(p, table) {
        return Ok(false);
    }
    let c = p.base();
    for pi in effective_epis(c) {
        if let Some(kp) = kernel_pair(c, pi) {
            if !equalizer_condition(p, pi, &kp)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn coherent_characterizations(ctx: &Ctx) -> Result<(Status, String)> {
    let c = &ctx.c;
    if !(is_preregular(c).holds() && is_finitary_extensive(c).holds()) {
        return Ok((Status::Skip, "not both preregular and finitary extensive".into()));
    }
    let (_, coh) = coherent(ctx)?;
    let table = CoproductTable::of_extensive(c)?;
    let sample = sample_presheaves(ctx, 4, SAMPLE_PRESHEAVES);
    let mut failures = 0;
    for p in &sample {
        if is_sheaf_for_topology(p, coh, ctx.budget)? != products_and_equalizers(p, &table)? {
            failures += 1;
        }
    }
    let (status, mut detail) = verdict(failures, sample.len(), "presheaves");
    if status == Status::Fail {
        detail.push_str(&coproduct_note(c));
    }
    Ok((status, detail))
}

fn projective_regular(ctx: &Ctx) -> Result<(Status, String)> {
    let c = &ctx.c;
    let Some((reg, _)) = named(ctx, Named::Regular) else {
        return Ok((Status::Skip, "not preregular".into()));
    };
    let eff = effective_epis(c);
    if !c.objects().all(|x| is_projective(c, x, &eff)) {
        return Ok((Status::Skip, "some object is not projective".into()));
    }
    let sample = sample_presheaves(ctx, 5, SAMPLE_PRESHEAVES);
    let mut failures = 0;
    for p in &sample {
        if !is_sheaf_for_coverage(p, reg, ctx.budget)? {
            failures += 1;
        }
    }
    Ok(verdict(failures, sample.len(), "presheaves"))
}

fn family_composition(ctx: &Ctx) -> Result<(Status, String)> {
    let c = &ctx.c;
    let mut eff = Vec::with_capacity(c.object_count());
    for x in c.objects() {
        eff.push(effective_presieves(c, x, &ctx.caps)?);
    }
    let mut rng = rng_for(ctx, 6);
    let (mut checked, mut failures) = (0, 0);
    for _ in 0..SAMPLE_PAIRS {
        let x = ObjId(rng.gen_range(0..c.object_count()) as u32);
        let outer = &eff[x.index()];
        if outer.is_empty() {
            continue;
        }
        let p = &outer[rng.gen_range(0..outer.len())];
        let mut members = Vec::new();
        let mut usable = true;
        for f in p.iter() {
            let inner = &eff[c.dom(f).index()];
            if inner.is_empty() {
                usable = false;
                break;
            }
            let q = &inner[rng.gen_range(0..inner.len())];
            members.extend(q.iter().map(|g| c.compose(f, g)));
        }
        if !usable {
            continue;
        }
        checked += 1;
        if !is_effective_epi_family(c, &Presieve::new(c, x, members)?) {
            failures += 1;
        }
    }
    Ok(verdict(failures, checked, "composite families"))
}
