//! Comparing sites along a functor: continuity, cocontinuity, cover-density,
//! induced topologies and a census-level check of the sheaf equivalence.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::category::{Caps, FinCat, MorId, ObjId};
use crate::epi::{is_effective_epi, EffectiveFamilies};
use crate::error::{Error, Result};
use crate::functor::{is_fully_faithful, validate_functor, FinFunctor};
use crate::presheaf::{find_isomorphism, iso_invariant, Presheaf};
use crate::sheaf::{is_sheaf_for_topology, sheaf_census, Budget};
use crate::sieve::{enumerate_sieves, functor_pullback_sieve, image_sieve, pushforward_sieve, Presieve, Sieve};
use crate::topology::{coherent_coverage, is_precoherent, saturate, GrothTopology, Verdict};

#[derive(Debug, Clone)]
pub struct SiteMap {
    functor: FinFunctor,
    source_topology: GrothTopology,
    target_topology: GrothTopology,
}

impl SiteMap {
    pub fn new(
        functor: FinFunctor,
        source_topology: GrothTopology,
        target_topology: GrothTopology,
    ) -> Result<Self> {
        if **source_topology.base_arc() != *functor.source
            || **target_topology.base_arc() != *functor.target
        {
            return Err(Error::TypeMismatch(
                "topologies must live on the functor's source and target".into(),
            ));
        }
        Ok(SiteMap {
            functor,
            source_topology,
            target_topology,
        })
    }

    pub fn functor(&self) -> &FinFunctor {
        &self.functor
    }

    pub fn source_topology(&self) -> &GrothTopology {
        &self.source_topology
    }

    pub fn target_topology(&self) -> &GrothTopology {
        &self.target_topology
    }
}

/// Target sheaves with carriers up to `max_carrier` stay sheaves after
/// precomposition. Sheafhood is invariant under isomorphism, so one
/// representative per class is enough.
pub fn is_continuous(m: &SiteMap, max_carrier: usize, budget: Budget) -> Result<bool> {
    let target = m.functor.target.clone();
    for p in sheaf_census(&target, &m.target_topology, max_carrier, budget)? {
        let q = p.precompose(&m.functor)?;
        if !is_sheaf_for_topology(&q, &m.source_topology, budget)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First `(U, S)` with `S` covering `F(U)` but `F^*S` not covering `U`.
pub fn cocontinuity_witness(m: &SiteMap) -> Option<(ObjId, Sieve)> {
    let f = &m.functor;
    for u in f.source.objects() {
        for s in m.target_topology.covering(f.obj(u)) {
            let pb = functor_pullback_sieve(f, u, s).expect("sieve lives on F(U)");
            if !m.source_topology.is_covering(&pb) {
                return Some((u, s.clone()));
            }
        }
    }
    None
}

pub fn is_cocontinuous(m: &SiteMap) -> bool {
    cocontinuity_witness(m).is_none()
}

pub fn is_cover_dense(f: &FinFunctor, t_target: &GrothTopology) -> bool {
    f.target
        .objects()
        .all(|y| t_target.is_covering(&image_sieve(f, y)))
}

pub fn induced_topology(f: &FinFunctor, t_target: &GrothTopology, caps: &Caps) -> Result<GrothTopology> {
    if !is_fully_faithful(f) {
        return Err(Error::PreconditionFailed(format!("{} is not fully faithful", f.name)));
    }
    if !is_cover_dense(f, t_target) {
        return Err(Error::PreconditionFailed(format!("{} is not cover-dense", f.name)));
    }
    let src = &f.source;
    let mut covering = Vec::with_capacity(src.object_count());
    for x in src.objects() {
        covering.push(
            enumerate_sieves(src, x, caps)?
                .into_iter()
                .filter(|s| t_target.is_covering(&pushforward_sieve(f, s)))
                .collect::<BTreeSet<_>>(),
        );
    }
    GrothTopology::from_sets(src.clone(), covering)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceConditions {
    pub fully_faithful: bool,
    pub target_precoherent: Verdict,
    /// A source presieve whose effectiveness differs from that of its image.
    pub not_preserved_or_reflected: Option<Presieve>,
    /// A target object receiving no effective epimorphism from the image.
    pub not_covered: Option<ObjId>,
    pub source_precoherent: Verdict,
}

impl EquivalenceConditions {
    pub fn passes(&self) -> bool {
        self.fully_faithful
            && self.target_precoherent.holds()
            && self.not_preserved_or_reflected.is_none()
            && self.not_covered.is_none()
    }
}

fn image_presieve(f: &FinFunctor, p: &Presieve) -> Presieve {
    Presieve::new(&f.target, f.obj(p.target()), p.iter().map(|m| f.mor(m))).expect("functor typing")
}

/// An effective epimorphism `F(X) → y`, first in id order.
pub fn covering_effective_epi(f: &FinFunctor, y: ObjId) -> Option<MorId> {
    let t = &*f.target;
    let mut images: Vec<ObjId> = f.object_map.clone();
    images.sort_unstable();
    images.dedup();
    images
        .into_iter()
        .flat_map(|fx| t.hom(fx, y).iter().copied())
        .find(|&e| is_effective_epi(t, e))
}

pub fn check_equivalence_conditions(f: &FinFunctor, caps: &Caps) -> Result<EquivalenceConditions> {
    validate_functor(f).into_result()?;
    let (s, t) = (&*f.source, &*f.target);
    let mut src_families = EffectiveFamilies::new(s);
    let mut tgt_families = EffectiveFamilies::new(t);
    let mut not_preserved_or_reflected = None;
    'outer: for x in s.objects() {
        let into = s.incoming(x);
        if into.len() > caps.max_sieve_morphisms + 1 {
            return Err(Error::CapExceeded {
                what: "non-identity morphisms into an object",
                limit: caps.max_sieve_morphisms,
                actual: into.len() - 1,
            });
        }
        for mask in 0u64..(1u64 << into.len()) {
            let p = Presieve::new(
                s,
                x,
                (0..into.len()).filter(|i| mask >> i & 1 == 1).map(|i| into[i]),
            )
            .expect("typed");
            if src_families.is_effective(&p) != tgt_families.is_effective(&image_presieve(f, &p)) {
                not_preserved_or_reflected = Some(p);
                break 'outer;
            }
        }
    }
    let not_covered = t.objects().find(|&y| covering_effective_epi(f, y).is_none());
    Ok(EquivalenceConditions {
        fully_faithful: is_fully_faithful(f),
        target_precoherent: is_precoherent(t, caps)?,
        not_preserved_or_reflected,
        not_covered,
        source_precoherent: is_precoherent(s, caps)?,
    })
}

#[derive(Debug, Clone)]
pub struct EquivalenceCensus {
    pub source_topology: GrothTopology,
    pub source_topology_is_coherent: bool,
    pub source_census: Vec<Presheaf>,
    pub target_census: Vec<Presheaf>,
    /// `matching[i]`: index in the source census of the class of target
    /// sheaf `i` precomposed with the functor, if it lands on a sheaf.
    pub matching: Vec<Option<usize>>,
}

impl EquivalenceCensus {
    pub fn lands_in_sheaves(&self) -> bool {
        self.matching.iter().all(Option::is_some)
    }

    pub fn is_bijection(&self) -> bool {
        if !self.lands_in_sheaves() || self.source_census.len() != self.target_census.len() {
            return false;
        }
        let hit: BTreeSet<usize> = self.matching.iter().flatten().copied().collect();
        hit.len() == self.source_census.len()
    }
}

fn class_of(reps: &[Presheaf], p: &Presheaf) -> Option<usize> {
    let inv = iso_invariant(p);
    reps.iter()
        .position(|r| iso_invariant(r) == inv && find_isomorphism(r, p).is_some())
}

pub fn verify_sheaf_equivalence(
    f: &FinFunctor,
    max_carrier: usize,
    caps: &Caps,
    budget: Budget,
) -> Result<EquivalenceCensus> {
    let conditions = check_equivalence_conditions(f, caps)?;
    if !conditions.passes() {
        return Err(Error::PreconditionFailed(format!(
            "{} fails the equivalence conditions",
            f.name
        )));
    }
    let target_topology = saturate(&coherent_coverage(&f.target, caps)?, caps)?;
    let source_topology = induced_topology(f, &target_topology, caps)?;
    let source_topology_is_coherent = match coherent_coverage(&f.source, caps) {
        Ok(cov) => saturate(&cov, caps)? == source_topology,
        Err(_) => false,
    };
    let source: Arc<FinCat> = f.source.clone();
    let source_census = sheaf_census(&source, &source_topology, max_carrier, budget)?;
    let target_census = sheaf_census(&f.target, &target_topology, max_carrier, budget)?;
    let mut matching = Vec::with_capacity(target_census.len());
    for p in &target_census {
        let q = p.precompose(f)?;
        matching.push(if is_sheaf_for_topology(&q, &source_topology, budget)? {
            class_of(&source_census, &q)
        } else {
            None
        });
    }
    Ok(EquivalenceCensus {
        source_topology,
        source_topology_is_coherent,
        source_census,
        target_census,
        matching,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workbench::generators::gen_finset_skeleton;

    #[test]
    fn identity_site_map() {
        let c = Arc::new(gen_finset_skeleton(2).unwrap());
        let caps = Caps::default();
        let t = saturate(&coherent_coverage(&c, &caps).unwrap(), &caps).unwrap();
        let id = FinFunctor::identity(c.clone());
        let m = SiteMap::new(id.clone(), t.clone(), t.clone()).unwrap();
        assert!(is_cocontinuous(&m));
        assert!(is_cover_dense(&id, &t));
        assert!(is_continuous(&m, 1, Budget::DEFAULT).unwrap());
        assert_eq!(induced_topology(&id, &t, &caps).unwrap(), t);
        assert!(check_equivalence_conditions(&id, &caps).unwrap().passes());
    }

    #[test]
    fn minimal_source_is_not_cocontinuous() {
        let c = Arc::new(gen_finset_skeleton(2).unwrap());
        let caps = Caps::default();
        let t = saturate(&coherent_coverage(&c, &caps).unwrap(), &caps).unwrap();
        let id = FinFunctor::identity(c.clone());
        let m = SiteMap::new(id, GrothTopology::minimal(c.clone()), t).unwrap();
        assert!(cocontinuity_witness(&m).is_some());
    }
}
