//! Fixed-width bitsets over the global morphism id space.

use std::fmt;

use crate::category::MorId;

/// A set of morphism ids. Ordering is lexicographic on the underlying words,
/// which is the canonical order for sieve and presieve lists.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MorphismSet {
    words: Vec<u64>,
}

impl MorphismSet {
    pub fn empty(universe: usize) -> Self {
        MorphismSet {
            words: vec![0; universe.div_ceil(64)],
        }
    }

    pub fn from_iter(universe: usize, ids: impl IntoIterator<Item = MorId>) -> Self {
        let mut s = Self::empty(universe);
        for id in ids {
            s.insert(id);
        }
        s
    }

    pub fn universe_words(&self) -> usize {
        self.words.len()
    }

    #[inline]
    pub fn contains(&self, id: MorId) -> bool {
        let i = id.index();
        self.words
            .get(i / 64)
            .is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    #[inline]
    pub fn insert(&mut self, id: MorId) -> bool {
        let i = id.index();
        let w = &mut self.words[i / 64];
        let bit = 1u64 << (i % 64);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, id: MorId) {
        let i = id.index();
        self.words[i / 64] &= !(1u64 << (i % 64));
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &MorphismSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &MorphismSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &MorphismSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union(&self, other: &MorphismSet) -> MorphismSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &MorphismSet) -> MorphismSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    /// Ascending ids.
    pub fn iter(&self) -> impl Iterator<Item = MorId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some(MorId((wi * 64) as u32 + b))
            })
        })
    }
}

impl fmt::Debug for MorphismSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|m| m.0)).finish()
    }
}
