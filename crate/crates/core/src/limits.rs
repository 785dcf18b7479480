//! Brute-force (co)limit detection with certified universal properties.
//!
//! A witness records, for every competing (co)cone, the unique mediating
//! morphism that was found, so a failed downstream check can be replayed.
//! Among several valid apexes the least object id wins, then the
//! lexicographically least legs.

use std::collections::HashMap;

use crate::category::{FinCat, MorId, ObjId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeShape {
    Initial,
    BinaryCoproduct { left: ObjId, right: ObjId },
    Pullback { f: MorId, g: MorId },
    Coequalizer { g1: MorId, g2: MorId },
    KernelPair { f: MorId },
}

/// A competing (co)cone with apex `other` and its mediating morphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mediator {
    pub other: ObjId,
    pub legs: Vec<MorId>,
    pub mediator: MorId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeWitness {
    pub apex: ObjId,
    pub legs: Vec<MorId>,
    pub shape: ConeShape,
    pub mediators: Vec<Mediator>,
}

fn checked_product(mut it: impl Iterator<Item = usize>) -> Option<usize> {
    it.try_fold(1usize, |a, n| a.checked_mul(n))
}

/// Is `(apex, legs)` a coproduct of the legs' domains?
/// With no legs this asks whether `apex` is initial.
pub fn is_coproduct(c: &FinCat, apex: ObjId, legs: &[MorId]) -> bool {
    coproduct_check(c, apex, legs, None)
}

fn coproduct_check(
    c: &FinCat,
    apex: ObjId,
    legs: &[MorId],
    mut mediators: Option<&mut Vec<Mediator>>,
) -> bool {
    for w in c.objects() {
        let out = c.hom(apex, w);
        let expected = checked_product(legs.iter().map(|&i| c.hom(c.dom(i), w).len()));
        if expected != Some(out.len()) {
            return false;
        }
        let mut seen: HashMap<Vec<MorId>, MorId> = HashMap::with_capacity(out.len());
        for &u in out {
            let cocone: Vec<MorId> = legs.iter().map(|&i| c.compose(u, i)).collect();
            if seen.insert(cocone, u).is_some() {
                return false;
            }
        }
        if let Some(ms) = mediators.as_deref_mut() {
            let mut entries: Vec<_> = seen.into_iter().collect();
            entries.sort();
            ms.extend(entries.into_iter().map(|(legs, mediator)| Mediator {
                other: w,
                legs,
                mediator,
            }));
        }
    }
    true
}

pub fn find_initial(c: &FinCat) -> Option<ObjId> {
    c.objects()
        .find(|&i| c.objects().all(|w| c.hom(i, w).len() == 1))
}

pub fn initial_witness(c: &FinCat) -> Option<ConeWitness> {
    let apex = find_initial(c)?;
    let mut mediators = Vec::new();
    coproduct_check(c, apex, &[], Some(&mut mediators));
    Some(ConeWitness {
        apex,
        legs: Vec::new(),
        shape: ConeShape::Initial,
        mediators,
    })
}

pub fn find_binary_coproduct(c: &FinCat, x: ObjId, y: ObjId) -> Option<ConeWitness> {
    for apex in c.objects() {
        let sizes_match = c
            .objects()
            .all(|w| c.hom(apex, w).len() == c.hom(x, w).len() * c.hom(y, w).len());
        if !sizes_match {
            continue;
        }
        for &i1 in c.hom(x, apex) {
            for &i2 in c.hom(y, apex) {
                let mut mediators = Vec::new();
                if coproduct_check(c, apex, &[i1, i2], Some(&mut mediators)) {
                    return Some(ConeWitness {
                        apex,
                        legs: vec![i1, i2],
                        shape: ConeShape::BinaryCoproduct { left: x, right: y },
                        mediators,
                    });
                }
            }
        }
    }
    None
}

/// Number of commuting pairs `(a: W → X, b: W → Y)` with `f ∘ a = g ∘ b`.
fn commuting_pairs(c: &FinCat, f: MorId, g: MorId, w: ObjId) -> usize {
    let mut counts: HashMap<MorId, usize> = HashMap::new();
    for &a in c.hom(w, c.dom(f)) {
        *counts.entry(c.compose(f, a)).or_default() += 1;
    }
    c.hom(w, c.dom(g))
        .iter()
        .map(|&b| counts.get(&c.compose(g, b)).copied().unwrap_or(0))
        .sum()
}

/// Is the commuting square `f ∘ p1 = g ∘ p2` a pullback?
pub fn is_pullback(c: &FinCat, f: MorId, g: MorId, p1: MorId, p2: MorId) -> bool {
    pullback_check(c, f, g, p1, p2, None)
}

fn pullback_check(
    c: &FinCat,
    f: MorId,
    g: MorId,
    p1: MorId,
    p2: MorId,
    mut mediators: Option<&mut Vec<Mediator>>,
) -> bool {
    if c.cod(f) != c.cod(g)
        || c.dom(p1) != c.dom(p2)
        || c.cod(p1) != c.dom(f)
        || c.cod(p2) != c.dom(g)
        || c.compose(f, p1) != c.compose(g, p2)
    {
        return false;
    }
    let apex = c.dom(p1);
    for w in c.objects() {
        let us = c.hom(w, apex);
        if us.len() != commuting_pairs(c, f, g, w) {
            return false;
        }
        let mut seen: HashMap<(MorId, MorId), MorId> = HashMap::with_capacity(us.len());
        for &u in us {
            if seen.insert((c.compose(p1, u), c.compose(p2, u)), u).is_some() {
                return false;
            }
        }
        if let Some(ms) = mediators.as_deref_mut() {
            let mut entries: Vec<_> = seen.into_iter().collect();
            entries.sort();
            ms.extend(entries.into_iter().map(|((a, b), mediator)| Mediator {
                other: w,
                legs: vec![a, b],
                mediator,
            }));
        }
    }
    true
}

pub fn find_pullback(c: &FinCat, f: MorId, g: MorId) -> Option<ConeWitness> {
    if c.cod(f) != c.cod(g) {
        return None;
    }
    let counts: Vec<usize> = c.objects().map(|w| commuting_pairs(c, f, g, w)).collect();
    for apex in c.objects() {
        if c.objects().any(|w| c.hom(w, apex).len() != counts[w.index()]) {
            continue;
        }
        for &p1 in c.hom(apex, c.dom(f)) {
            for &p2 in c.hom(apex, c.dom(g)) {
                let mut mediators = Vec::new();
                if pullback_check(c, f, g, p1, p2, Some(&mut mediators)) {
                    return Some(ConeWitness {
                        apex,
                        legs: vec![p1, p2],
                        shape: ConeShape::Pullback { f, g },
                        mediators,
                    });
                }
            }
        }
    }
    None
}

pub fn kernel_pair(c: &FinCat, f: MorId) -> Option<ConeWitness> {
    find_pullback(c, f, f).map(|w| ConeWitness {
        shape: ConeShape::KernelPair { f },
        ..w
    })
}

/// Is `q` a coequalizer of the parallel pair `g1, g2`?
pub fn is_coequalizer(c: &FinCat, g1: MorId, g2: MorId, q: MorId) -> bool {
    coequalizer_check(c, g1, g2, q, None)
}

fn coequalizer_check(
    c: &FinCat,
    g1: MorId,
    g2: MorId,
    q: MorId,
    mut mediators: Option<&mut Vec<Mediator>>,
) -> bool {
    if c.dom(g1) != c.dom(g2)
        || c.cod(g1) != c.cod(g2)
        || c.dom(q) != c.cod(g1)
        || c.compose(q, g1) != c.compose(q, g2)
    {
        return false;
    }
    let (x, apex) = (c.dom(q), c.cod(q));
    for w in c.objects() {
        let coequalizing = c
            .hom(x, w)
            .iter()
            .filter(|&&e| c.compose(e, g1) == c.compose(e, g2))
            .count();
        let us = c.hom(apex, w);
        if us.len() != coequalizing {
            return false;
        }
        let mut seen: HashMap<MorId, MorId> = HashMap::with_capacity(us.len());
        for &u in us {
            if seen.insert(c.compose(u, q), u).is_some() {
                return false;
            }
        }
        if let Some(ms) = mediators.as_deref_mut() {
            let mut entries: Vec<_> = seen.into_iter().collect();
            entries.sort();
            ms.extend(entries.into_iter().map(|(e, mediator)| Mediator {
                other: w,
                legs: vec![e],
                mediator,
            }));
        }
    }
    true
}

pub fn find_coequalizer(c: &FinCat, g1: MorId, g2: MorId) -> Option<ConeWitness> {
    if c.dom(g1) != c.dom(g2) || c.cod(g1) != c.cod(g2) {
        return None;
    }
    let x = c.cod(g1);
    for apex in c.objects() {
        for &q in c.hom(x, apex) {
            let mut mediators = Vec::new();
            if coequalizer_check(c, g1, g2, q, Some(&mut mediators)) {
                return Some(ConeWitness {
                    apex,
                    legs: vec![q],
                    shape: ConeShape::Coequalizer { g1, g2 },
                    mediators,
                });
            }
        }
    }
    None
}

/// Replays a witness: every recorded mediator must factor its competitor.
pub fn replay_witness(c: &FinCat, w: &ConeWitness) -> bool {
    match &w.shape {
        ConeShape::Initial | ConeShape::BinaryCoproduct { .. } => w.mediators.iter().all(|m| {
            m.legs.len() == w.legs.len()
                && w.legs
                    .iter()
                    .zip(&m.legs)
                    .all(|(&i, &a)| c.compose(m.mediator, i) == a)
        }),
        ConeShape::Pullback { .. } | ConeShape::KernelPair { .. } => w.mediators.iter().all(|m| {
            c.compose(w.legs[0], m.mediator) == m.legs[0]
                && c.compose(w.legs[1], m.mediator) == m.legs[1]
        }),
        ConeShape::Coequalizer { .. } => w
            .mediators
            .iter()
            .all(|m| c.compose(m.mediator, w.legs[0]) == m.legs[0]),
    }
}
