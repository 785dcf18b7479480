//! Coverages, Grothendieck topologies and their saturation; the preregular,
//! finitary extensive and precoherent predicates with the coverages they
//! license; direct descriptions of the resulting covering sieves.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::bitset::MorphismSet;
use crate::category::{Caps, FinCat, MorId, ObjId};
use crate::epi::{effective_epis, is_effective_epi_family, EffectiveFamilies};
use crate::error::{Error, Result};
use crate::limits::{
    find_binary_coproduct, find_initial, find_pullback, is_coproduct, is_pullback, ConeWitness,
};
use crate::sieve::{
    enumerate_sieves, generate, principal_members, pullback_unchecked, top_sieve, Presieve, Sieve,
};

// ---------------------------------------------------------------------------
// Coverages and topologies

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coverage {
    base: Arc<FinCat>,
    covering: Vec<BTreeSet<Presieve>>,
}

impl Coverage {
    pub fn empty(base: Arc<FinCat>) -> Self {
        let n = base.object_count();
        Coverage {
            base,
            covering: vec![BTreeSet::new(); n],
        }
    }

    /// Only the top presieve on every object.
    pub fn tops(base: Arc<FinCat>) -> Self {
        let mut cov = Coverage::empty(base.clone());
        for x in base.objects() {
            cov.insert(Presieve::top(&base, x));
        }
        cov
    }

    pub fn insert(&mut self, p: Presieve) -> bool {
        self.covering[p.target().index()].insert(p)
    }

    pub fn base(&self) -> &FinCat {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<FinCat> {
        &self.base
    }

    pub fn covering(&self, x: ObjId) -> &BTreeSet<Presieve> {
        &self.covering[x.index()]
    }

    pub fn len(&self) -> usize {
        self.covering.iter().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn union(&self, other: &Coverage) -> Result<Coverage> {
        if *self.base != *other.base {
            return Err(Error::TypeMismatch("coverages live on different categories".into()));
        }
        let mut out = self.clone();
        for (mine, theirs) in out.covering.iter_mut().zip(&other.covering) {
            mine.extend(theirs.iter().cloned());
        }
        Ok(out)
    }

    pub fn is_subset(&self, other: &Coverage) -> bool {
        self.covering
            .iter()
            .zip(&other.covering)
            .all(|(a, b)| a.is_subset(b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrothTopology {
    base: Arc<FinCat>,
    covering: Vec<BTreeSet<Sieve>>,
}

impl GrothTopology {
    /// No axioms are checked; see [`check_topology`].
    pub fn from_sets(base: Arc<FinCat>, covering: Vec<BTreeSet<Sieve>>) -> Result<Self> {
        if covering.len() != base.object_count() {
            return Err(Error::CarrierMismatch(format!(
                "{} sieve sets for {} objects",
                covering.len(),
                base.object_count()
            )));
        }
        for (i, set) in covering.iter().enumerate() {
            if set.iter().any(|s| s.target().index() != i) {
                return Err(Error::TypeMismatch("sieve filed under the wrong object".into()));
            }
        }
        Ok(GrothTopology { base, covering })
    }

    /// Only top sieves cover.
    pub fn minimal(base: Arc<FinCat>) -> Self {
        let covering = base
            .objects()
            .map(|x| BTreeSet::from([top_sieve(&base, x)]))
            .collect();
        GrothTopology { base, covering }
    }

    pub fn base(&self) -> &FinCat {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<FinCat> {
        &self.base
    }

    pub fn covering(&self, x: ObjId) -> &BTreeSet<Sieve> {
        &self.covering[x.index()]
    }

    pub fn is_covering(&self, s: &Sieve) -> bool {
        self.covering[s.target().index()].contains(s)
    }

    pub fn is_subset(&self, other: &GrothTopology) -> bool {
        self.covering
            .iter()
            .zip(&other.covering)
            .all(|(a, b)| a.is_subset(b))
    }

    pub fn len(&self) -> usize {
        self.covering.iter().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Every sieve on every object, indexed, with pullback tables.
#[derive(Debug, Clone)]
pub struct SieveLattice {
    sieves: Vec<Vec<Sieve>>,
    index: Vec<HashMap<MorphismSet, usize>>,
    /// `pullbacks[f][j]`: index on `dom f` of `f^*` of sieve `j` on `cod f`.
    pullbacks: Vec<Vec<u32>>,
}

impl SieveLattice {
    pub fn new(c: &FinCat, caps: &Caps) -> Result<Self> {
        let mut sieves = Vec::with_capacity(c.object_count());
        for x in c.objects() {
            sieves.push(enumerate_sieves(c, x, caps)?);
        }
        let index: Vec<HashMap<MorphismSet, usize>> = sieves
            .iter()
            .map(|ss| {
                ss.iter()
                    .enumerate()
                    .map(|(i, s)| (s.members().clone(), i))
                    .collect()
            })
            .collect();
        let pullbacks = c
            .morphisms()
            .map(|f| {
                sieves[c.cod(f).index()]
                    .iter()
                    .map(|s| {
                        let pb = pullback_unchecked(c, s, f);
                        index[c.dom(f).index()][pb.members()] as u32
                    })
                    .collect()
            })
            .collect();
        Ok(SieveLattice {
            sieves,
            index,
            pullbacks,
        })
    }

    pub fn sieves(&self, x: ObjId) -> &[Sieve] {
        &self.sieves[x.index()]
    }

    pub fn index_of(&self, s: &Sieve) -> usize {
        self.index[s.target().index()][s.members()]
    }

    #[inline]
    pub fn pullback_index(&self, f: MorId, j: usize) -> usize {
        self.pullbacks[f.index()][j] as usize
    }

    fn topology_from_flags(&self, base: Arc<FinCat>, flags: &[Vec<bool>]) -> GrothTopology {
        let covering = flags
            .iter()
            .zip(&self.sieves)
            .map(|(fl, ss)| {
                ss.iter()
                    .zip(fl)
                    .filter(|(_, &b)| b)
                    .map(|(s, _)| s.clone())
                    .collect()
            })
            .collect();
        GrothTopology { base, covering }
    }

    fn flags_of(&self, t: &GrothTopology) -> Vec<Vec<bool>> {
        self.sieves
            .iter()
            .enumerate()
            .map(|(i, ss)| {
                let set = &t.covering[i];
                ss.iter().map(|s| set.contains(s)).collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoverageReport {
    /// `(f, S)` pairs for which no covering presieve on `dom f` lands in `f^*⟨S⟩`.
    pub failures: Vec<(MorId, Presieve)>,
}

impl CoverageReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn check_coverage(cov: &Coverage) -> CoverageReport {
    let c = cov.base();
    let mut report = CoverageReport::default();
    for y in c.objects() {
        for s in cov.covering(y) {
            let gen = generate(c, s);
            for &f in c.incoming(y) {
                let pb = pullback_unchecked(c, &gen, f);
                let witnessed = cov
                    .covering(c.dom(f))
                    .iter()
                    .any(|t| t.members().is_subset(pb.members()));
                if !witnessed {
                    report.failures.push((f, s.clone()));
                }
            }
        }
    }
    report
}

/// Least topology containing the sieves generated by `cov`.
pub fn saturate(cov: &Coverage, caps: &Caps) -> Result<GrothTopology> {
    let lattice = SieveLattice::new(cov.base(), caps)?;
    Ok(saturate_in(&lattice, cov))
}

pub fn saturate_in(lattice: &SieveLattice, cov: &Coverage) -> GrothTopology {
    let c = cov.base();
    let mut flags: Vec<Vec<bool>> = lattice.sieves.iter().map(|ss| vec![false; ss.len()]).collect();
    for x in c.objects() {
        flags[x.index()][lattice.index_of(&top_sieve(c, x))] = true;
        for p in cov.covering(x) {
            flags[x.index()][lattice.index_of(&generate(c, p))] = true;
        }
    }
    // Pullback stability and local character until nothing changes. On a
    // genuine coverage the pullback step adds nothing new, and on an arbitrary
    // family it makes the result the least topology containing it.
    loop {
        let mut changed = false;
        for x in c.objects() {
            for r in 0..lattice.sieves[x.index()].len() {
                if !flags[x.index()][r] {
                    continue;
                }
                for &f in c.incoming(x) {
                    let (d, j) = (c.dom(f).index(), lattice.pullback_index(f, r));
                    if !flags[d][j] {
                        flags[d][j] = true;
                        changed = true;
                    }
                }
            }
        }
        for x in c.objects() {
            let xi = x.index();
            let covering_now: Vec<usize> = (0..flags[xi].len()).filter(|&j| flags[xi][j]).collect();
            for r in 0..lattice.sieves[xi].len() {
                if flags[xi][r] {
                    continue;
                }
                let local = covering_now.iter().any(|&s| {
                    lattice.sieves[xi][s]
                        .iter()
                        .all(|f| flags[c.dom(f).index()][lattice.pullback_index(f, r)])
                });
                if local {
                    flags[xi][r] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    lattice.topology_from_flags(cov.base_arc().clone(), &flags)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologyViolation {
    MissingTop(ObjId),
    NotPullbackStable { sieve: Sieve, along: MorId },
    NotLocal { covering: Sieve, candidate: Sieve },
    NotUpwardClosed { covering: Sieve, larger: Sieve },
}

impl fmt::Display for TopologyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyViolation::MissingTop(x) => write!(f, "maximality: top sieve on {x} is not covering"),
            TopologyViolation::NotPullbackStable { sieve, along } => {
                write!(f, "stability: pullback of {:?} along {along} is not covering", sieve.members())
            }
            TopologyViolation::NotLocal { covering, candidate } => write!(
                f,
                "local character: {:?} is locally covering over {:?} but not covering",
                candidate.members(),
                covering.members()
            ),
            TopologyViolation::NotUpwardClosed { covering, larger } => write!(
                f,
                "upward closure: {:?} contains {:?} but is not covering",
                larger.members(),
                covering.members()
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TopologyReport {
    pub violations: Vec<TopologyViolation>,
}

impl TopologyReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_topology(t: &GrothTopology, caps: &Caps) -> Result<TopologyReport> {
    let c = t.base();
    let lattice = SieveLattice::new(c, caps)?;
    let flags = lattice.flags_of(t);
    let mut report = TopologyReport::default();
    for x in c.objects() {
        let xi = x.index();
        if !flags[xi][lattice.index_of(&top_sieve(c, x))] {
            report.violations.push(TopologyViolation::MissingTop(x));
        }
        let ss = &lattice.sieves[xi];
        for (j, s) in ss.iter().enumerate().filter(|&(j, _)| flags[xi][j]) {
            for &f in c.incoming(x) {
                if !flags[c.dom(f).index()][lattice.pullback_index(f, j)] {
                    report.violations.push(TopologyViolation::NotPullbackStable {
                        sieve: s.clone(),
                        along: f,
                    });
                }
            }
            for (r, cand) in ss.iter().enumerate().filter(|&(r, _)| !flags[xi][r]) {
                if s.is_subset(cand) {
                    report.violations.push(TopologyViolation::NotUpwardClosed {
                        covering: s.clone(),
                        larger: cand.clone(),
                    });
                }
                let local = s
                    .iter()
                    .all(|f| flags[c.dom(f).index()][lattice.pullback_index(f, r)]);
                if local {
                    report.violations.push(TopologyViolation::NotLocal {
                        covering: s.clone(),
                        candidate: cand.clone(),
                    });
                }
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Category predicates

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Counterexample {
    /// No effective `h` into `dom along` with `along ∘ h` factoring through the epi.
    NoRegularCompletion { effective_epi: MorId, along: MorId },
    NoInitial,
    NoPullbackAlongCoprojection { coprojection: MorId, along: MorId },
    /// Over the coproduct with legs `coproduct`, the square pair built from
    /// `base` and the `(h_k, j_k)` legs breaks the van Kampen equivalence.
    VanKampen {
        coproduct: [MorId; 2],
        base: MorId,
        left: [MorId; 2],
        right: [MorId; 2],
        squares_are_pullbacks: bool,
    },
    NoCoherentCompletion { family: Sieve, along: MorId },
}

impl Counterexample {
    pub fn describe(&self, c: &FinCat) -> String {
        let m = |f: &MorId| c.morphism_name(*f).to_string();
        match self {
            Counterexample::NoRegularCompletion { effective_epi, along } => format!(
                "no effective epimorphism completes the square of {} and {}",
                m(effective_epi),
                m(along)
            ),
            Counterexample::NoInitial => "no initial object".to_string(),
            Counterexample::NoPullbackAlongCoprojection { coprojection, along } => format!(
                "no pullback of coprojection {} along {}",
                m(coprojection),
                m(along)
            ),
            Counterexample::VanKampen {
                coproduct,
                base,
                left,
                right,
                squares_are_pullbacks,
            } => format!(
                "van Kampen fails over ({} {}) along {} with left ({} {}) right ({} {}): squares {} pullbacks but top row {} a coproduct",
                m(&coproduct[0]),
                m(&coproduct[1]),
                m(base),
                m(&left[0]),
                m(&left[1]),
                m(&right[0]),
                m(&right[1]),
                if *squares_are_pullbacks { "are" } else { "are not" },
                if *squares_are_pullbacks { "is not" } else { "is" },
            ),
            Counterexample::NoCoherentCompletion { family, along } => format!(
                "no effective family on {} refines the pullback of {{{}}} along {}",
                c.object_name(c.dom(*along)),
                family.iter().map(|f| m(&f)).collect::<Vec<_>>().join(" "),
                m(along)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(Counterexample),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(ce) => Some(ce),
        }
    }
}

pub fn is_preregular(c: &FinCat) -> Verdict {
    let eff = effective_epis(c);
    let mut eff_into: Vec<Vec<MorId>> = vec![Vec::new(); c.object_count()];
    for &h in &eff {
        eff_into[c.cod(h).index()].push(h);
    }
    for &g in &eff {
        let through_g = principal_members(c, g);
        for &f in c.incoming(c.cod(g)) {
            let ok = eff_into[c.dom(f).index()]
                .iter()
                .any(|&h| through_g.contains(c.compose(f, h)));
            if !ok {
                return Verdict::Fails(Counterexample::NoRegularCompletion {
                    effective_epi: g,
                    along: f,
                });
            }
        }
    }
    Verdict::Holds
}

/// Canonical binary coproducts of all pairs of objects (where they exist),
/// together with an initial object.
#[derive(Debug, Clone)]
pub struct CoproductTable {
    initial: ObjId,
    n: usize,
    table: Vec<Option<ConeWitness>>,
}

impl CoproductTable {
    /// `None` without an initial object.
    pub fn of(c: &FinCat) -> Option<Self> {
        let initial = find_initial(c)?;
        let n = c.object_count();
        let mut table = Vec::with_capacity(n * n);
        for x in c.objects() {
            for y in c.objects() {
                table.push(find_binary_coproduct(c, x, y));
            }
        }
        Some(CoproductTable { initial, n, table })
    }

    pub fn of_extensive(c: &FinCat) -> Result<Self> {
        if let Verdict::Fails(ce) = is_finitary_extensive(c) {
            return Err(Error::NotExtensive(ce.describe(c)));
        }
        Ok(CoproductTable::of(c).expect("extensive categories have an initial object"))
    }

    pub fn initial(&self) -> ObjId {
        self.initial
    }

    pub fn get(&self, x: ObjId, y: ObjId) -> Option<&ConeWitness> {
        self.table[x.index() * self.n + y.index()].as_ref()
    }

    /// First unordered pair without a binary coproduct.
    pub fn missing(&self) -> Option<(ObjId, ObjId)> {
        (0..self.n)
            .flat_map(|x| (x..self.n).map(move |y| (x, y)))
            .find(|&(x, y)| self.table[x * self.n + y].is_none())
            .map(|(x, y)| (ObjId(x as u32), ObjId(y as u32)))
    }

    /// Witnesses for unordered pairs `x ≤ y`.
    pub fn coproducts(&self) -> impl Iterator<Item = &ConeWitness> + '_ {
        (0..self.n).flat_map(move |x| {
            (x..self.n).filter_map(move |y| self.table[x * self.n + y].as_ref())
        })
    }

    /// Is `(z; j1, j2)` a coproduct? Compares with the canonical one.
    pub fn is_coproduct_cocone(&self, c: &FinCat, j1: MorId, j2: MorId) -> bool {
        let z = c.cod(j1);
        if c.cod(j2) != z {
            return false;
        }
        let Some(w) = self.get(c.dom(j1), c.dom(j2)) else {
            return false;
        };
        c.hom(w.apex, z)
            .iter()
            .find(|&&u| c.compose(u, w.legs[0]) == j1 && c.compose(u, w.legs[1]) == j2)
            .is_some_and(|&u| c.is_iso(u))
    }
}

/// Initial object, pullbacks along the coprojections of every binary
/// coproduct that exists, and the van Kampen equivalence for those
/// coproducts.
pub fn is_finitary_extensive(c: &FinCat) -> Verdict {
    let Some(table) = CoproductTable::of(c) else {
        return Verdict::Fails(Counterexample::NoInitial);
    };
    for w in table.coproducts() {
        let x = w.apex;
        for &k in &w.legs {
            for &f in c.incoming(x) {
                if find_pullback(c, f, k).is_none() {
                    return Verdict::Fails(Counterexample::NoPullbackAlongCoprojection {
                        coprojection: k,
                        along: f,
                    });
                }
            }
        }
    }
    for w in table.coproducts() {
        let (i1, i2) = (w.legs[0], w.legs[1]);
        for &h in c.incoming(w.apex) {
            let z = c.dom(h);
            let side = |i: MorId| -> Vec<(MorId, MorId, bool)> {
                let xk = c.dom(i);
                let mut out = Vec::new();
                for zk in c.objects() {
                    for &hk in c.hom(zk, xk) {
                        let target = c.compose(i, hk);
                        for &jk in c.hom(zk, z) {
                            if c.compose(h, jk) == target {
                                out.push((hk, jk, is_pullback(c, h, i, jk, hk)));
                            }
                        }
                    }
                }
                out
            };
            let (left, right) = (side(i1), side(i2));
            for &(h1, j1, pb1) in &left {
                for &(h2, j2, pb2) in &right {
                    let pullbacks = pb1 && pb2;
                    if pullbacks != table.is_coproduct_cocone(c, j1, j2) {
                        return Verdict::Fails(Counterexample::VanKampen {
                            coproduct: [i1, i2],
                            base: h,
                            left: [h1, j1],
                            right: [h2, j2],
                            squares_are_pullbacks: pullbacks,
                        });
                    }
                }
            }
        }
    }
    Verdict::Holds
}

/// Effective epimorphic sieves on `x`, in canonical order.
pub fn effective_sieves(c: &FinCat, x: ObjId, caps: &Caps) -> Result<Vec<Sieve>> {
    Ok(enumerate_sieves(c, x, caps)?
        .into_iter()
        .filter(|s| is_effective_epi_family(c, &s.as_presieve()))
        .collect())
}

pub fn is_precoherent(c: &FinCat, caps: &Caps) -> Result<Verdict> {
    let mut eff = Vec::with_capacity(c.object_count());
    for x in c.objects() {
        eff.push(effective_sieves(c, x, caps)?);
    }
    for b in c.objects() {
        for s in &eff[b.index()] {
            for &f in c.incoming(b) {
                let pb = pullback_unchecked(c, s, f);
                if !eff[c.dom(f).index()].iter().any(|r| r.is_subset(&pb)) {
                    return Ok(Verdict::Fails(Counterexample::NoCoherentCompletion {
                        family: s.clone(),
                        along: f,
                    }));
                }
            }
        }
    }
    Ok(Verdict::Holds)
}

// ---------------------------------------------------------------------------
// Named coverages

pub fn regular_coverage(c: &Arc<FinCat>) -> Result<Coverage> {
    if let Verdict::Fails(ce) = is_preregular(c) {
        return Err(Error::NotPreregular(ce.describe(c)));
    }
    let mut cov = Coverage::empty(c.clone());
    for f in effective_epis(c) {
        cov.insert(Presieve::singleton(c, f));
    }
    Ok(cov)
}

/// Presieves on `x` whose members exhibit `x` as the coproduct of their
/// domains, including the empty one when `x` is initial.
pub fn coproduct_presieves(c: &FinCat, x: ObjId) -> Vec<Presieve> {
    let cands = c.incoming(x);
    let target: Vec<usize> = c.objects().map(|w| c.hom(x, w).len()).collect();
    let mut out = BTreeSet::new();
    let mut chosen = Vec::new();
    let partial = vec![1usize; target.len()];
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        c: &FinCat,
        x: ObjId,
        cands: &[MorId],
        target: &[usize],
        i: usize,
        partial: &[usize],
        chosen: &mut Vec<MorId>,
        out: &mut BTreeSet<Presieve>,
    ) {
        if i == cands.len() {
            if partial == target && is_coproduct(c, x, chosen) {
                out.insert(Presieve::new(c, x, chosen.iter().copied()).expect("typed"));
            }
            return;
        }
        dfs(c, x, cands, target, i + 1, partial, chosen, out);
        let d = c.dom(cands[i]);
        let mut next = Vec::with_capacity(partial.len());
        for w in c.objects() {
            let v = partial[w.index()].saturating_mul(c.hom(d, w).len());
            let t = target[w.index()];
            if t > 0 && (v == 0 || !t.is_multiple_of(v)) {
                return;
            }
            next.push(v);
        }
        chosen.push(cands[i]);
        dfs(c, x, cands, target, i + 1, &next, chosen, out);
        chosen.pop();
    }
    dfs(c, x, cands, &target, 0, &partial, &mut chosen, &mut out);
    out.into_iter().collect()
}

pub fn extensive_coverage(c: &Arc<FinCat>) -> Result<Coverage> {
    if let Verdict::Fails(ce) = is_finitary_extensive(c) {
        return Err(Error::NotExtensive(ce.describe(c)));
    }
    let mut cov = Coverage::empty(c.clone());
    for x in c.objects() {
        for p in coproduct_presieves(c, x) {
            cov.insert(p);
        }
    }
    Ok(cov)
}

fn check_presieve_cap(c: &FinCat, x: ObjId, caps: &Caps) -> Result<()> {
    let non_identity = c.incoming(x).len() - 1;
    if non_identity > caps.max_sieve_morphisms {
        return Err(Error::CapExceeded {
            what: "non-identity morphisms into an object",
            limit: caps.max_sieve_morphisms,
            actual: non_identity,
        });
    }
    Ok(())
}

/// Every effective epimorphic presieve on `x`.
pub fn effective_presieves(c: &FinCat, x: ObjId, caps: &Caps) -> Result<Vec<Presieve>> {
    check_presieve_cap(c, x, caps)?;
    let into = c.incoming(x);
    let mut families = EffectiveFamilies::new(c);
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << into.len()) {
        let p = Presieve::new(
            c,
            x,
            (0..into.len()).filter(|i| mask >> i & 1 == 1).map(|i| into[i]),
        )
        .expect("typed");
        if families.is_effective(&p) {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

pub fn coherent_coverage(c: &Arc<FinCat>, caps: &Caps) -> Result<Coverage> {
    if let Verdict::Fails(ce) = is_precoherent(c, caps)? {
        return Err(Error::NotPrecoherent(ce.describe(c)));
    }
    let mut cov = Coverage::empty(c.clone());
    for x in c.objects() {
        for p in effective_presieves(c, x, caps)? {
            cov.insert(p);
        }
    }
    Ok(cov)
}

pub fn generated_by_union(a: &Coverage, b: &Coverage, caps: &Caps) -> Result<GrothTopology> {
    saturate(&a.union(b)?, caps)
}

// ---------------------------------------------------------------------------
// Direct descriptions of covering sieves

pub fn regular_covering_sieves(c: &FinCat, x: ObjId, caps: &Caps) -> Result<BTreeSet<Sieve>> {
    let eff: Vec<MorId> = effective_epis(c)
        .into_iter()
        .filter(|&f| c.cod(f) == x)
        .collect();
    Ok(enumerate_sieves(c, x, caps)?
        .into_iter()
        .filter(|s| eff.iter().any(|&f| s.contains(f)))
        .collect())
}

pub fn extensive_covering_sieves(c: &FinCat, x: ObjId, caps: &Caps) -> Result<BTreeSet<Sieve>> {
    let families = coproduct_presieves(c, x);
    Ok(enumerate_sieves(c, x, caps)?
        .into_iter()
        .filter(|s| families.iter().any(|p| p.members().is_subset(s.members())))
        .collect())
}

pub fn coherent_covering_sieves(c: &FinCat, x: ObjId, caps: &Caps) -> Result<BTreeSet<Sieve>> {
    let all = enumerate_sieves(c, x, caps)?;
    let eff: Vec<&Sieve> = all
        .iter()
        .filter(|s| is_effective_epi_family(c, &s.as_presieve()))
        .collect();
    Ok(all
        .iter()
        .filter(|s| eff.iter().any(|r| r.is_subset(s)))
        .cloned()
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Named {
    Regular,
    Extensive,
    Coherent,
}

/// The topology assembled object by object from a direct description.
pub fn direct_topology(c: &Arc<FinCat>, which: Named, caps: &Caps) -> Result<GrothTopology> {
    let mut covering = Vec::with_capacity(c.object_count());
    for x in c.objects() {
        covering.push(match which {
            Named::Regular => regular_covering_sieves(c, x, caps)?,
            Named::Extensive => extensive_covering_sieves(c, x, caps)?,
            Named::Coherent => coherent_covering_sieves(c, x, caps)?,
        });
    }
    GrothTopology::from_sets(c.clone(), covering)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workbench::generators::{gen_finset_skeleton, gen_monoid, walking_arrow};

    fn skel2() -> Arc<FinCat> {
        Arc::new(gen_finset_skeleton(2).unwrap())
    }

    #[test]
    fn empty_and_top_coverages_saturate_to_minimal() {
        let c = skel2();
        let caps = Caps::default();
        let min = GrothTopology::minimal(c.clone());
        assert_eq!(saturate(&Coverage::empty(c.clone()), &caps).unwrap(), min);
        assert_eq!(saturate(&Coverage::tops(c.clone()), &caps).unwrap(), min);
        assert!(check_coverage(&Coverage::tops(c.clone())).is_ok());
        assert!(check_topology(&min, &caps).unwrap().is_ok());
    }

    #[test]
    fn missing_top_is_reported() {
        let c = skel2();
        let mut sets: Vec<BTreeSet<Sieve>> = c
            .objects()
            .map(|x| BTreeSet::from([top_sieve(&c, x)]))
            .collect();
        sets[1].clear();
        let t = GrothTopology::from_sets(c.clone(), sets).unwrap();
        let report = check_topology(&t, &Caps::default()).unwrap();
        assert!(report.violations.contains(&TopologyViolation::MissingTop(ObjId(1))));
    }

    #[test]
    fn walking_arrow_coverage_without_witness() {
        let c = Arc::new(walking_arrow());
        let f = c.morphism_by_name("f").unwrap();
        let mut cov = Coverage::empty(c.clone());
        cov.insert(Presieve::singleton(&c, f));
        let report = check_coverage(&cov);
        assert!(!report.is_ok());
        assert!(report.failures.iter().any(|(g, _)| *g == f));
    }

    #[test]
    fn walking_arrow_is_not_extensive() {
        let c = walking_arrow();
        assert!(matches!(
            is_finitary_extensive(&c),
            Verdict::Fails(Counterexample::VanKampen { .. })
        ));
    }

    #[test]
    fn nontrivial_monoid_has_no_initial_object() {
        let c = gen_monoid("z2", &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(is_finitary_extensive(&c), Verdict::Fails(Counterexample::NoInitial));
        assert!(is_preregular(&c).holds());
    }

    #[test]
    fn skeleton_predicates_and_named_coverages() {
        let c = skel2();
        let caps = Caps::default();
        assert!(is_preregular(&c).holds());
        assert!(is_finitary_extensive(&c).holds());
        assert!(is_precoherent(&c, &caps).unwrap().holds());
        let reg = regular_coverage(&c).unwrap();
        let u = c.hom(ObjId(2), ObjId(1))[0];
        assert!(reg.covering(ObjId(1)).contains(&Presieve::singleton(&c, u)));
        assert!(reg
            .covering(ObjId(1))
            .contains(&Presieve::singleton(&c, c.identity(ObjId(1)))));
        let ext = extensive_coverage(&c).unwrap();
        assert!(ext.covering(ObjId(0)).contains(&Presieve::empty(&c, ObjId(0))));
        let points = Presieve::new(&c, ObjId(2), c.hom(ObjId(1), ObjId(2)).to_vec()).unwrap();
        assert!(ext.covering(ObjId(2)).contains(&points));
        let coh = coherent_coverage(&c, &caps).unwrap();
        assert!(reg.is_subset(&coh));
        assert!(ext.is_subset(&coh));
        for cov in [&reg, &ext, &coh] {
            assert!(check_coverage(cov).is_ok());
        }
    }
}
