//! The sheaf condition via matching families, with its equalizer and
//! finite-product characterizations.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::category::{FinCat, MorId, ObjId};
use crate::error::{Error, Result};
use crate::limits::{ConeShape, ConeWitness};
use crate::presheaf::{dedup_up_to_iso, for_each_presheaf, Presheaf};
use crate::sieve::{generate, Presieve, Sieve};
use crate::topology::{Coverage, CoproductTable, GrothTopology};

/// Upper bound on the number of candidate families a single sheaf check may
/// range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u128);

impl Budget {
    pub const DEFAULT: Budget = Budget(10_000_000);
    pub const UNLIMITED: Budget = Budget(u128::MAX);

    /// `SITECALC_BUDGET` if set and numeric, else the default.
    pub fn from_env() -> Budget {
        std::env::var("SITECALC_BUDGET")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(Budget)
            .unwrap_or(Budget::DEFAULT)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::from_env()
    }
}

/// One element `x_f ∈ F(dom f)` for every member `f` of a presieve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyOfElements {
    presieve: Presieve,
    elements: Vec<u32>,
}

impl FamilyOfElements {
    /// `elements` lists `x_f` for the members in ascending id order.
    pub fn new(f: &Presheaf, presieve: Presieve, elements: Vec<u32>) -> Result<Self> {
        if elements.len() != presieve.len() {
            return Err(Error::CarrierMismatch(format!(
                "{} elements for {} members",
                elements.len(),
                presieve.len()
            )));
        }
        let c = f.base();
        for (m, &x) in presieve.iter().zip(&elements) {
            if x as usize >= f.carrier(c.dom(m)) {
                return Err(Error::CarrierMismatch(format!(
                    "element {x} out of range at {}",
                    c.object_name(c.dom(m))
                )));
            }
        }
        Ok(FamilyOfElements { presieve, elements })
    }

    /// The family `(F(f)(x))_f` induced by an element `x` at the target.
    pub fn induced_by(f: &Presheaf, presieve: Presieve, x: u32) -> Self {
        let elements = presieve.iter().map(|m| f.restrict(m, x)).collect();
        FamilyOfElements { presieve, elements }
    }

    pub fn presieve(&self) -> &Presieve {
        &self.presieve
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn get(&self, m: MorId) -> Option<u32> {
        self.presieve
            .iter()
            .position(|k| k == m)
            .map(|i| self.elements[i])
    }
}

pub fn is_compatible(f: &Presheaf, fam: &FamilyOfElements) -> bool {
    let c = f.base();
    let mut seen: HashMap<MorId, u32> = HashMap::new();
    for (m, &x) in fam.presieve.iter().zip(&fam.elements) {
        for &g in c.incoming(c.dom(m)) {
            let v = f.restrict(g, x);
            if *seen.entry(c.compose(m, g)).or_insert(v) != v {
                return false;
            }
        }
    }
    true
}

/// All `x` at the target restricting to the family, ascending.
pub fn amalgamations(f: &Presheaf, fam: &FamilyOfElements) -> Vec<u32> {
    let x = fam.presieve.target();
    (0..f.carrier(x) as u32)
        .filter(|&e| {
            fam.presieve
                .iter()
                .zip(&fam.elements)
                .all(|(m, &v)| f.restrict(m, e) == v)
        })
        .collect()
}

/// Squares over the presieve grouped by their common composite, as
/// per-member checks against the first (anchor) entry of the group.
fn square_checks(c: &FinCat, members: &[MorId]) -> Vec<Vec<(MorId, usize, MorId)>> {
    let mut groups: HashMap<MorId, Vec<(usize, MorId)>> = HashMap::new();
    for (i, &m) in members.iter().enumerate() {
        for &g in c.incoming(c.dom(m)) {
            groups.entry(c.compose(m, g)).or_default().push((i, g));
        }
    }
    let mut checks = vec![Vec::new(); members.len()];
    for mut group in groups.into_values() {
        group.sort();
        let (a, ga) = group[0];
        for &(i, g) in &group[1..] {
            checks[i].push((g, a, ga));
        }
    }
    checks
}

pub fn is_sheaf_for_presieve(f: &Presheaf, p: &Presieve, budget: Budget) -> Result<bool> {
    let c = f.base();
    let x = p.target();
    // with the identity present every compatible family is induced by x_id
    if p.contains(c.identity(x)) {
        return Ok(true);
    }
    let members: Vec<MorId> = p.iter().collect();
    let needed = members
        .iter()
        .try_fold(1u128, |acc, &m| acc.checked_mul(f.carrier(c.dom(m)) as u128))
        .unwrap_or(u128::MAX);
    if needed > budget.0 {
        return Err(Error::BudgetExceeded {
            needed,
            budget: budget.0,
        });
    }
    // induced families must be pairwise distinct (at most one amalgamation)
    let mut induced = HashSet::with_capacity(f.carrier(x));
    for e in 0..f.carrier(x) as u32 {
        let fam: Vec<u32> = members.iter().map(|&m| f.restrict(m, e)).collect();
        if !induced.insert(fam) {
            return Ok(false);
        }
    }
    // and every compatible family must be induced (at least one)
    let checks = square_checks(c, &members);
    let mut values = vec![0u32; members.len()];
    let mut count = 0usize;
    let limit = f.carrier(x);
    fn search(
        f: &Presheaf,
        members: &[MorId],
        checks: &[Vec<(MorId, usize, MorId)>],
        i: usize,
        values: &mut Vec<u32>,
        count: &mut usize,
        limit: usize,
    ) {
        if *count > limit {
            return;
        }
        if i == members.len() {
            *count += 1;
            return;
        }
        let c = f.base();
        for v in 0..f.carrier(c.dom(members[i])) as u32 {
            values[i] = v;
            if checks[i]
                .iter()
                .all(|&(g, a, ga)| f.restrict(g, v) == f.restrict(ga, values[a]))
            {
                search(f, members, checks, i + 1, values, count, limit);
            }
        }
    }
    search(f, &members, &checks, 0, &mut values, &mut count, limit);
    Ok(count == limit)
}

pub fn is_sheaf_for_sieve(f: &Presheaf, s: &Sieve, budget: Budget) -> Result<bool> {
    is_sheaf_for_presieve(f, &s.as_presieve(), budget)
}

pub fn is_sheaf_for_topology(f: &Presheaf, t: &GrothTopology, budget: Budget) -> Result<bool> {
    for x in t.base().objects() {
        for s in t.covering(x) {
            if !is_sheaf_for_sieve(f, s, budget)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn is_sheaf_for_coverage(f: &Presheaf, cov: &Coverage, budget: Budget) -> Result<bool> {
    for x in cov.base().objects() {
        for p in cov.covering(x) {
            if !is_sheaf_for_presieve(f, p, budget)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The generated sieves of a coverage's presieves, deduplicated. Being a
/// sheaf for these is the same as being a sheaf for the coverage.
pub fn coverage_sieves(cov: &Coverage) -> Vec<Sieve> {
    let c = cov.base();
    let mut out = BTreeSet::new();
    for x in c.objects() {
        for p in cov.covering(x) {
            let s = generate(c, p);
            if !s.contains(c.identity(x)) {
                out.insert(s);
            }
        }
    }
    out.into_iter().collect()
}

pub fn is_sheaf_for_sieves(f: &Presheaf, sieves: &[Sieve], budget: Budget) -> Result<bool> {
    for s in sieves {
        if !is_sheaf_for_sieve(f, s, budget)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Is `F(B) → F(X) ⇉ F(X ×_B X)` an equalizer?
pub fn equalizer_condition(f: &Presheaf, pi: MorId, kp: &ConeWitness) -> Result<bool> {
    let c = f.base();
    let matches = matches!(kp.shape, ConeShape::KernelPair { f: k } if k == pi)
        && kp.legs.len() == 2
        && kp.legs.iter().all(|&p| c.cod(p) == c.dom(pi) && c.dom(p) == kp.apex);
    if !matches {
        return Err(Error::NoKernelPair(pi));
    }
    let (x, b) = (c.dom(pi), c.cod(pi));
    let (p1, p2) = (kp.legs[0], kp.legs[1]);
    let mut image = vec![false; f.carrier(x)];
    for y in 0..f.carrier(b) as u32 {
        let e = f.restrict(pi, y) as usize;
        if image[e] {
            return Ok(false);
        }
        image[e] = true;
    }
    Ok((0..f.carrier(x) as u32)
        .all(|e| image[e as usize] == (f.restrict(p1, e) == f.restrict(p2, e))))
}

/// `F(initial)` is a singleton and `F(X ⊔ Y) → F(X) × F(Y)` is a bijection for
/// every coproduct in the table.
pub fn preserves_finite_products_with(f: &Presheaf, table: &CoproductTable) -> bool {
    if f.carrier(table.initial()) != 1 {
        return false;
    }
    table.coproducts().all(|w| {
        let (i1, i2) = (w.legs[0], w.legs[1]);
        let c = f.base();
        let (a, b) = (f.carrier(c.dom(i1)), f.carrier(c.dom(i2)));
        if f.carrier(w.apex) != a * b {
            return false;
        }
        let mut seen = HashSet::with_capacity(a * b);
        (0..f.carrier(w.apex) as u32).all(|z| seen.insert((f.restrict(i1, z), f.restrict(i2, z))))
    })
}

pub fn preserves_finite_products(f: &Presheaf) -> Result<bool> {
    let table = CoproductTable::of_extensive(f.base())?;
    Ok(preserves_finite_products_with(f, &table))
}

/// Iso classes of presheaves with carriers at most `max_carrier` accepted by
/// `is_sheaf`, one representative per class in enumeration order.
pub fn census_by(
    c: &Arc<FinCat>,
    max_carrier: usize,
    mut is_sheaf: impl FnMut(&Presheaf) -> Result<bool>,
) -> Result<Vec<Presheaf>> {
    let mut found = Vec::new();
    let mut err = None;
    let _ = for_each_presheaf(c, max_carrier, |p| match is_sheaf(&p) {
        Ok(true) => {
            found.push(p);
            ControlFlow::Continue(())
        }
        Ok(false) => ControlFlow::Continue(()),
        Err(e) => {
            err = Some(e);
            ControlFlow::Break(())
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(dedup_up_to_iso(found)),
    }
}

pub fn sheaf_census(
    c: &Arc<FinCat>,
    t: &GrothTopology,
    max_carrier: usize,
    budget: Budget,
) -> Result<Vec<Presheaf>> {
    if **t.base_arc() != **c {
        return Err(Error::TypeMismatch("topology lives on another category".into()));
    }
    let sieves: Vec<Sieve> = c
        .objects()
        .flat_map(|x| t.covering(x).iter().cloned())
        .filter(|s| !s.contains(c.identity(s.target())))
        .collect();
    census_by(c, max_carrier, |p| is_sheaf_for_sieves(p, &sieves, budget))
}

/// Lifting property: every morphism from `x` into the codomain of one of
/// `epis` factors through it.
pub fn is_projective(c: &FinCat, x: ObjId, epis: &[MorId]) -> bool {
    epis.iter().all(|&e| {
        c.hom(x, c.cod(e))
            .iter()
            .all(|&g| c.hom(x, c.dom(e)).iter().any(|&l| c.compose(e, l) == g))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::representable;
    use crate::workbench::generators::gen_finset_skeleton;

    fn skel2() -> Arc<FinCat> {
        Arc::new(gen_finset_skeleton(2).unwrap())
    }

    #[test]
    fn point_inclusions_family_on_h2() {
        let c = skel2();
        let two = ObjId(2);
        let incl = c.hom(ObjId(1), two).to_vec();
        let p = Presieve::new(&c, two, incl.clone()).unwrap();
        let h2 = representable(&c, two);
        let fam = FamilyOfElements::new(&h2, p.clone(), vec![0, 1]).unwrap();
        assert!(is_compatible(&h2, &fam));
        let am = amalgamations(&h2, &fam);
        assert_eq!(am.len(), 1);
        assert!(is_sheaf_for_presieve(&h2, &p, Budget::DEFAULT).unwrap());
    }

    #[test]
    fn constant_two_fails_on_empty_cover_of_one() {
        let c = skel2();
        let k = Presheaf::constant(c.clone(), 2);
        let p = Presieve::empty(&c, ObjId(1));
        assert!(!is_sheaf_for_presieve(&k, &p, Budget::DEFAULT).unwrap());
        let fam = FamilyOfElements::new(&k, p, vec![]).unwrap();
        assert_eq!(amalgamations(&k, &fam), vec![0, 1]);
    }

    #[test]
    fn budget_is_enforced() {
        let c = skel2();
        let h2 = representable(&c, ObjId(2));
        let p = Presieve::new(&c, ObjId(2), c.hom(ObjId(1), ObjId(2)).to_vec()).unwrap();
        assert!(matches!(
            is_sheaf_for_presieve(&h2, &p, Budget(3)),
            Err(Error::BudgetExceeded { needed: 4, budget: 3 })
        ));
    }

    #[test]
    fn identity_equalizer_condition_holds() {
        let c = skel2();
        let k = Presheaf::constant(c.clone(), 2);
        for x in c.objects() {
            let id = c.identity(x);
            let kp = crate::limits::kernel_pair(&c, id).unwrap();
            assert!(equalizer_condition(&k, id, &kp).unwrap());
        }
    }
}
