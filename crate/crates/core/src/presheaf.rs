//! Finite-set-valued presheaves: validation, construction, enumeration and
//! isomorphism search.
//!
//! Carriers are integer ranges `0..n`. A restriction table along `f: X → Y`
//! has one entry per element of the carrier at `Y`, giving its image in the
//! carrier at `X`.

use std::ops::ControlFlow;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::category::{FinCat, MorId, ObjId};
use crate::error::{Error, Result};
use crate::functor::FinFunctor;
use crate::report::{Law, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presheaf {
    base: Arc<FinCat>,
    carrier: Vec<usize>,
    restriction: Vec<Vec<u32>>,
}

impl Presheaf {
    /// Checks table shapes and element ranges. Functoriality is checked by
    /// [`validate_presheaf`].
    pub fn new(base: Arc<FinCat>, carrier: Vec<usize>, restriction: Vec<Vec<u32>>) -> Result<Self> {
        if carrier.len() != base.object_count() {
            return Err(Error::CarrierMismatch(format!(
                "{} carrier sizes for {} objects",
                carrier.len(),
                base.object_count()
            )));
        }
        if restriction.len() != base.morphism_count() {
            return Err(Error::CarrierMismatch(format!(
                "{} restriction tables for {} morphisms",
                restriction.len(),
                base.morphism_count()
            )));
        }
        for f in base.morphisms() {
            let table = &restriction[f.index()];
            let (x, y) = (base.dom(f), base.cod(f));
            if table.len() != carrier[y.index()] {
                return Err(Error::CarrierMismatch(format!(
                    "table along {} has {} entries, carrier at {} has {}",
                    base.morphism_name(f),
                    table.len(),
                    base.object_name(y),
                    carrier[y.index()]
                )));
            }
            if table.iter().any(|&v| v as usize >= carrier[x.index()]) {
                return Err(Error::CarrierMismatch(format!(
                    "table along {} leaves the carrier at {}",
                    base.morphism_name(f),
                    base.object_name(x)
                )));
            }
        }
        Ok(Presheaf {
            base,
            carrier,
            restriction,
        })
    }

    /// [`Presheaf::new`] followed by [`validate_presheaf`].
    pub fn new_validated(
        base: Arc<FinCat>,
        carrier: Vec<usize>,
        restriction: Vec<Vec<u32>>,
    ) -> Result<Self> {
        let p = Self::new(base, carrier, restriction)?;
        validate_presheaf(&p).into_result()?;
        Ok(p)
    }

    /// Carrier of size `k` everywhere, identity restrictions.
    pub fn constant(base: Arc<FinCat>, k: usize) -> Self {
        let carrier = vec![k; base.object_count()];
        let restriction = vec![(0..k as u32).collect(); base.morphism_count()];
        Presheaf {
            base,
            carrier,
            restriction,
        }
    }

    pub fn base(&self) -> &FinCat {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<FinCat> {
        &self.base
    }

    #[inline]
    pub fn carrier(&self, x: ObjId) -> usize {
        self.carrier[x.index()]
    }

    pub fn carriers(&self) -> &[usize] {
        &self.carrier
    }

    #[inline]
    pub fn restrict(&self, f: MorId, y: u32) -> u32 {
        self.restriction[f.index()][y as usize]
    }

    pub fn table(&self, f: MorId) -> &[u32] {
        &self.restriction[f.index()]
    }

    /// `P ∘ F^op`: the presheaf on `functor.source` obtained by precomposition.
    pub fn precompose(&self, functor: &FinFunctor) -> Result<Presheaf> {
        if *functor.target != *self.base {
            return Err(Error::TypeMismatch(
                "functor target is not the presheaf's base".into(),
            ));
        }
        let s = &functor.source;
        Ok(Presheaf {
            base: s.clone(),
            carrier: s.objects().map(|x| self.carrier(functor.obj(x))).collect(),
            restriction: s
                .morphisms()
                .map(|f| self.restriction[functor.mor(f).index()].clone())
                .collect(),
        })
    }
}

pub fn validate_presheaf(p: &Presheaf) -> ValidationReport {
    let c = p.base();
    let mut report = ValidationReport::default();
    for x in c.objects() {
        let id = c.identity(x);
        if p.table(id).iter().enumerate().any(|(i, &v)| v as usize != i) {
            report.push(Law::RestrictionIdentity, vec![id]);
        }
    }
    for g in c.morphisms() {
        for &f in c.incoming(c.dom(g)) {
            let gf = c.compose(g, f);
            let ok = (0..p.carrier(c.cod(g)) as u32)
                .all(|y| p.restrict(gf, y) == p.restrict(f, p.restrict(g, y)));
            if !ok {
                report.push(Law::RestrictionComposition, vec![g, f]);
            }
        }
    }
    report
}

/// `h_W = Hom(−, W)`. Elements at `X` enumerate `Hom(X, W)` in ascending id
/// order; restriction is precomposition.
pub fn representable(c: &Arc<FinCat>, w: ObjId) -> Presheaf {
    let carrier = c.objects().map(|x| c.hom(x, w).len()).collect();
    let restriction = c
        .morphisms()
        .map(|f| {
            let (x, y) = (c.dom(f), c.cod(f));
            let target = c.hom(x, w);
            c.hom(y, w)
                .iter()
                .map(|&k| {
                    let kf = c.compose(k, f);
                    target.binary_search(&kf).expect("composite in hom-set") as u32
                })
                .collect()
        })
        .collect();
    Presheaf {
        base: c.clone(),
        carrier,
        restriction,
    }
}

/// A search plan for presheaves with fixed carrier sizes.
///
/// Non-identity morphisms are assigned one at a time; a morphism that is a
/// composite of already assigned morphisms gets its table forced, and every
/// composition constraint is checked as soon as its three tables are known.
struct PresheafSearch<'a> {
    c: &'a FinCat,
    carrier: &'a [usize],
    order: Vec<MorId>,
    /// For each step, a pair `(g, f)` with `g ∘ f` the step's morphism and
    /// both assigned earlier.
    forced_by: Vec<Option<(MorId, MorId)>>,
    /// For each step, constraints `(g, f, g ∘ f)` completed at that step.
    checks: Vec<Vec<(MorId, MorId, MorId)>>,
}

impl<'a> PresheafSearch<'a> {
    fn new(c: &'a FinCat, carrier: &'a [usize]) -> Self {
        let m = c.morphism_count();
        let table_count = |f: MorId| -> f64 {
            let dx = carrier[c.dom(f).index()] as f64;
            let cy = carrier[c.cod(f).index()] as i32;
            dx.powi(cy)
        };
        let mut factorizations: Vec<Vec<(MorId, MorId)>> = vec![Vec::new(); m];
        for g in c.morphisms().filter(|&g| !c.is_identity(g)) {
            for &f in c.incoming(c.dom(g)) {
                if !c.is_identity(f) {
                    factorizations[c.compose(g, f).index()].push((g, f));
                }
            }
        }
        let mut step_of = vec![usize::MAX; m];
        let mut order = Vec::new();
        let mut forced_by = Vec::new();
        let mut remaining: Vec<MorId> = c.morphisms().filter(|&f| !c.is_identity(f)).collect();
        while !remaining.is_empty() {
            let pick = remaining.iter().enumerate().find_map(|(ri, &h)| {
                factorizations[h.index()]
                    .iter()
                    .find(|&&(g, f)| step_of[g.index()] != usize::MAX && step_of[f.index()] != usize::MAX)
                    .map(|&gf| (ri, Some(gf)))
            });
            let (ri, forced) = pick.unwrap_or_else(|| {
                let ri = (0..remaining.len())
                    .min_by(|&a, &b| {
                        table_count(remaining[a])
                            .partial_cmp(&table_count(remaining[b]))
                            .unwrap()
                            .then(remaining[a].cmp(&remaining[b]))
                    })
                    .unwrap();
                (ri, None)
            });
            let h = remaining.remove(ri);
            step_of[h.index()] = order.len();
            order.push(h);
            forced_by.push(forced);
        }
        let mut checks = vec![Vec::new(); order.len()];
        for g in c.morphisms() {
            if c.is_identity(g) {
                continue;
            }
            for &f in c.incoming(c.dom(g)) {
                if c.is_identity(f) {
                    continue;
                }
                let h = c.compose(g, f);
                let mut last = step_of[g.index()].max(step_of[f.index()]);
                if !c.is_identity(h) {
                    last = last.max(step_of[h.index()]);
                }
                checks[last].push((g, f, h));
            }
        }
        PresheafSearch {
            c,
            carrier,
            order,
            forced_by,
            checks,
        }
    }

    fn identity_tables(&self) -> Vec<Vec<u32>> {
        self.c
            .morphisms()
            .map(|f| {
                if self.c.is_identity(f) {
                    (0..self.carrier[self.c.dom(f).index()] as u32).collect()
                } else {
                    Vec::new()
                }
            })
            .collect()
    }

    fn candidates(&self, step: usize, tables: &[Vec<u32>]) -> Vec<Vec<u32>> {
        let h = self.order[step];
        if let Some((g, f)) = self.forced_by[step] {
            let t: Vec<u32> = tables[g.index()]
                .iter()
                .map(|&v| tables[f.index()][v as usize])
                .collect();
            return vec![t];
        }
        let dx = self.carrier[self.c.dom(h).index()] as u32;
        let cy = self.carrier[self.c.cod(h).index()];
        if dx == 0 {
            return if cy == 0 { vec![Vec::new()] } else { Vec::new() };
        }
        let mut out = Vec::new();
        let mut digits = vec![0u32; cy];
        loop {
            out.push(digits.clone());
            let mut i = cy;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < dx {
                    break;
                }
                digits[i] = 0;
            }
        }
    }

    fn consistent(&self, step: usize, tables: &[Vec<u32>]) -> bool {
        self.checks[step].iter().all(|&(g, f, h)| {
            let (tg, tf, th) = (&tables[g.index()], &tables[f.index()], &tables[h.index()]);
            tg.iter()
                .enumerate()
                .all(|(y, &v)| th[y] == tf[v as usize])
        })
    }

    fn run<B>(
        &self,
        step: usize,
        tables: &mut Vec<Vec<u32>>,
        visit: &mut dyn FnMut(&[Vec<u32>]) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        if step == self.order.len() {
            return visit(tables);
        }
        let h = self.order[step].index();
        for cand in self.candidates(step, tables) {
            tables[h] = cand;
            if self.consistent(step, tables) {
                self.run(step + 1, tables, visit)?;
            }
        }
        tables[h] = Vec::new();
        ControlFlow::Continue(())
    }

    fn run_random<R: Rng>(
        &self,
        step: usize,
        tables: &mut Vec<Vec<u32>>,
        rng: &mut R,
        fuel: &mut usize,
    ) -> bool {
        if step == self.order.len() {
            return true;
        }
        let h = self.order[step].index();
        let mut cands = self.candidates(step, tables);
        cands.shuffle(rng);
        for cand in cands {
            if *fuel == 0 {
                return false;
            }
            *fuel -= 1;
            tables[h] = cand;
            if self.consistent(step, tables) && self.run_random(step + 1, tables, rng, fuel) {
                return true;
            }
        }
        tables[h] = Vec::new();
        false
    }
}

/// Visits every presheaf with the given carrier sizes, in a deterministic order.
pub fn for_each_presheaf_with_carriers<B>(
    c: &Arc<FinCat>,
    carrier: &[usize],
    mut visit: impl FnMut(Presheaf) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let search = PresheafSearch::new(c, carrier);
    let mut tables = search.identity_tables();
    search.run(0, &mut tables, &mut |t| {
        visit(Presheaf {
            base: c.clone(),
            carrier: carrier.to_vec(),
            restriction: t.to_vec(),
        })
    })
}

/// Visits every presheaf whose carriers are all at most `max_carrier`.
/// Carrier vectors are taken in lexicographic order.
pub fn for_each_presheaf<B>(
    c: &Arc<FinCat>,
    max_carrier: usize,
    mut visit: impl FnMut(Presheaf) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let n = c.object_count();
    let mut carrier = vec![0usize; n];
    loop {
        for_each_presheaf_with_carriers(c, &carrier, &mut visit)?;
        let mut i = n;
        loop {
            if i == 0 {
                return ControlFlow::Continue(());
            }
            i -= 1;
            carrier[i] += 1;
            if carrier[i] <= max_carrier {
                break;
            }
            carrier[i] = 0;
        }
    }
}

pub fn all_presheaves(c: &Arc<FinCat>, max_carrier: usize) -> Vec<Presheaf> {
    let mut out = Vec::new();
    let _ = for_each_presheaf::<()>(c, max_carrier, |p| {
        out.push(p);
        ControlFlow::Continue(())
    });
    out
}

/// A random presheaf with carriers in `0..=max_carrier`, or `None` if a few
/// attempts find nothing (some carrier vectors admit no presheaf).
pub fn random_presheaf<R: Rng>(c: &Arc<FinCat>, max_carrier: usize, rng: &mut R) -> Option<Presheaf> {
    for _ in 0..64 {
        let carrier: Vec<usize> = c.objects().map(|_| rng.gen_range(0..=max_carrier)).collect();
        let search = PresheafSearch::new(c, &carrier);
        let mut tables = search.identity_tables();
        let mut fuel = 20_000;
        if search.run_random(0, &mut tables, rng, &mut fuel) {
            return Some(Presheaf {
                base: c.clone(),
                carrier,
                restriction: tables,
            });
        }
    }
    None
}

/// Cheap isomorphism invariant: carrier sizes and image sizes of every table.
pub fn iso_invariant(p: &Presheaf) -> Vec<usize> {
    let mut inv = p.carrier.clone();
    for t in &p.restriction {
        let mut seen: Vec<u32> = t.clone();
        seen.sort_unstable();
        seen.dedup();
        inv.push(seen.len());
    }
    inv
}

/// A natural isomorphism `p ≅ q` as per-object permutations
/// (`components[x][i]` is the image of element `i` of `p` at `x`).
pub fn find_isomorphism(p: &Presheaf, q: &Presheaf) -> Option<Vec<Vec<u32>>> {
    if p.base != q.base || p.carrier != q.carrier {
        return None;
    }
    let c = p.base();
    let n = c.object_count();
    let mut comps: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut assigned = vec![false; n];
    fn natural_at(
        c: &FinCat,
        p: &Presheaf,
        q: &Presheaf,
        x: ObjId,
        comps: &[Vec<u32>],
        assigned: &[bool],
    ) -> bool {
        // every morphism touching x whose other end is assigned
        let check = |f: MorId| {
            let (a, b) = (c.dom(f), c.cod(f));
            (0..p.carrier(b) as u32).all(|y| {
                comps[a.index()][p.restrict(f, y) as usize]
                    == q.restrict(f, comps[b.index()][y as usize])
            })
        };
        c.incoming(x)
            .iter()
            .filter(|&&f| assigned[c.dom(f).index()])
            .all(|&f| check(f))
            && c.out_of(x)
                .iter()
                .filter(|&&f| assigned[c.cod(f).index()])
                .all(|&f| check(f))
    }
    fn go(
        c: &FinCat,
        p: &Presheaf,
        q: &Presheaf,
        x: usize,
        comps: &mut Vec<Vec<u32>>,
        assigned: &mut Vec<bool>,
    ) -> bool {
        if x == c.object_count() {
            return true;
        }
        let k = p.carrier[x];
        let mut perm: Vec<u32> = (0..k as u32).collect();
        let mut ok = false;
        let _ = permutations(&mut perm, 0, &mut |perm| {
            comps[x] = perm.to_vec();
            assigned[x] = true;
            if natural_at(c, p, q, ObjId(x as u32), comps, assigned) && go(c, p, q, x + 1, comps, assigned) {
                ok = true;
                return ControlFlow::Break(());
            }
            assigned[x] = false;
            ControlFlow::Continue(())
        });
        ok
    }
    if go(c, p, q, 0, &mut comps, &mut assigned) {
        Some(comps)
    } else {
        None
    }
}

pub fn are_isomorphic(p: &Presheaf, q: &Presheaf) -> bool {
    iso_invariant(p) == iso_invariant(q) && find_isomorphism(p, q).is_some()
}

fn permutations(
    v: &mut [u32],
    k: usize,
    visit: &mut dyn FnMut(&[u32]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if k == v.len() {
        return visit(v);
    }
    for i in k..v.len() {
        v.swap(k, i);
        let r = permutations(v, k + 1, visit);
        v.swap(k, i);
        r?;
    }
    ControlFlow::Continue(())
}

/// Deduplicates up to isomorphism, keeping the first representative of each
/// class in input order.
pub fn dedup_up_to_iso(presheaves: impl IntoIterator<Item = Presheaf>) -> Vec<Presheaf> {
    let mut reps: Vec<(Vec<usize>, Presheaf)> = Vec::new();
    for p in presheaves {
        let inv = iso_invariant(&p);
        let dup = reps
            .iter()
            .any(|(i, r)| *i == inv && find_isomorphism(r, &p).is_some());
        if !dup {
            reps.push((inv, p));
        }
    }
    reps.into_iter().map(|(_, p)| p).collect()
}
