//! Presieves and sieves as bitsets over the morphism id space.

use std::collections::{BTreeSet, HashSet};

use crate::bitset::MorphismSet;
use crate::category::{Caps, FinCat, MorId, ObjId};
use crate::error::{Error, Result};
use crate::functor::FinFunctor;

/// A set of morphisms sharing the codomain `target`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Presieve {
    target: ObjId,
    members: MorphismSet,
}

/// A downward-closed presieve.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sieve {
    target: ObjId,
    members: MorphismSet,
}

macro_rules! common_accessors {
    ($t:ty) => {
        impl $t {
            pub fn target(&self) -> ObjId {
                self.target
            }

            pub fn members(&self) -> &MorphismSet {
                &self.members
            }

            pub fn contains(&self, f: MorId) -> bool {
                self.members.contains(f)
            }

            pub fn len(&self) -> usize {
                self.members.len()
            }

            pub fn is_empty(&self) -> bool {
                self.members.is_empty()
            }

            pub fn iter(&self) -> impl Iterator<Item = MorId> + '_ {
                self.members.iter()
            }
        }
    };
}

common_accessors!(Presieve);
common_accessors!(Sieve);

impl Presieve {
    pub fn new(c: &FinCat, target: ObjId, members: impl IntoIterator<Item = MorId>) -> Result<Self> {
        let members = MorphismSet::from_iter(c.morphism_count(), members);
        for f in members.iter() {
            if c.cod(f) != target {
                return Err(Error::TypeMismatch(format!(
                    "{} does not have codomain {}",
                    c.morphism_name(f),
                    c.object_name(target)
                )));
            }
        }
        Ok(Presieve { target, members })
    }

    pub fn empty(c: &FinCat, target: ObjId) -> Self {
        Presieve {
            target,
            members: MorphismSet::empty(c.morphism_count()),
        }
    }

    pub fn singleton(c: &FinCat, f: MorId) -> Self {
        Presieve {
            target: c.cod(f),
            members: MorphismSet::from_iter(c.morphism_count(), [f]),
        }
    }

    /// All morphisms into `target`.
    pub fn top(c: &FinCat, target: ObjId) -> Self {
        Presieve {
            target,
            members: MorphismSet::from_iter(c.morphism_count(), c.incoming(target).iter().copied()),
        }
    }

    pub fn to_vec(&self) -> Vec<MorId> {
        self.members.iter().collect()
    }
}

impl Sieve {
    /// Checks typing and downward closure.
    pub fn new(c: &FinCat, target: ObjId, members: impl IntoIterator<Item = MorId>) -> Result<Self> {
        let p = Presieve::new(c, target, members)?;
        if !is_downward_closed(c, &p) {
            return Err(Error::TypeMismatch("member set is not downward closed".into()));
        }
        Ok(Sieve {
            target,
            members: p.members,
        })
    }

    pub fn empty(c: &FinCat, target: ObjId) -> Self {
        Sieve {
            target,
            members: MorphismSet::empty(c.morphism_count()),
        }
    }

    pub fn as_presieve(&self) -> Presieve {
        Presieve {
            target: self.target,
            members: self.members.clone(),
        }
    }

    pub fn is_subset(&self, other: &Sieve) -> bool {
        self.target == other.target && self.members.is_subset(&other.members)
    }

    pub fn intersection(&self, other: &Sieve) -> Sieve {
        debug_assert_eq!(self.target, other.target);
        Sieve {
            target: self.target,
            members: self.members.intersection(&other.members),
        }
    }

    pub fn union(&self, other: &Sieve) -> Sieve {
        debug_assert_eq!(self.target, other.target);
        Sieve {
            target: self.target,
            members: self.members.union(&other.members),
        }
    }
}

/// Independent closure test: `f ∈ p` and `g` composable with `f` imply `f ∘ g ∈ p`.
pub fn is_downward_closed(c: &FinCat, p: &Presieve) -> bool {
    p.iter()
        .all(|f| c.incoming(c.dom(f)).iter().all(|&g| p.contains(c.compose(f, g))))
}

/// `{ f ∘ g : g into dom f }`.
pub fn principal_members(c: &FinCat, f: MorId) -> MorphismSet {
    MorphismSet::from_iter(
        c.morphism_count(),
        c.incoming(c.dom(f)).iter().map(|&g| c.compose(f, g)),
    )
}

/// The least sieve containing `p`.
pub fn generate(c: &FinCat, p: &Presieve) -> Sieve {
    let mut members = MorphismSet::empty(c.morphism_count());
    for f in p.iter() {
        for &g in c.incoming(c.dom(f)) {
            members.insert(c.compose(f, g));
        }
    }
    Sieve {
        target: p.target,
        members,
    }
}

pub fn top_sieve(c: &FinCat, x: ObjId) -> Sieve {
    let p = Presieve::top(c, x);
    Sieve {
        target: x,
        members: p.members,
    }
}

/// `f^*S = { g : f ∘ g ∈ S }`, a sieve on `dom f`.
pub fn pullback_sieve(c: &FinCat, s: &Sieve, f: MorId) -> Result<Sieve> {
    if c.cod(f) != s.target {
        return Err(Error::TypeMismatch(format!(
            "{} does not land in {}",
            c.morphism_name(f),
            c.object_name(s.target)
        )));
    }
    Ok(pullback_unchecked(c, s, f))
}

pub(crate) fn pullback_unchecked(c: &FinCat, s: &Sieve, f: MorId) -> Sieve {
    let x = c.dom(f);
    let members = MorphismSet::from_iter(
        c.morphism_count(),
        c.incoming(x)
            .iter()
            .copied()
            .filter(|&g| s.contains(c.compose(f, g))),
    );
    Sieve { target: x, members }
}

/// Every sieve on `x`, in canonical (word-lexicographic) order.
///
/// Sieves are exactly the unions of principal sieves, so the enumeration is a
/// closure search from the empty sieve adding one principal sieve at a time.
pub fn enumerate_sieves(c: &FinCat, x: ObjId, caps: &Caps) -> Result<Vec<Sieve>> {
    let non_identity = c.incoming(x).len() - 1;
    if non_identity > caps.max_sieve_morphisms {
        return Err(Error::CapExceeded {
            what: "non-identity morphisms into an object",
            limit: caps.max_sieve_morphisms,
            actual: non_identity,
        });
    }
    let principals: Vec<MorphismSet> = c.incoming(x).iter().map(|&f| principal_members(c, f)).collect();
    let empty = MorphismSet::empty(c.morphism_count());
    let mut seen: HashSet<MorphismSet> = HashSet::new();
    seen.insert(empty.clone());
    let mut stack = vec![empty];
    while let Some(s) = stack.pop() {
        for (i, &f) in c.incoming(x).iter().enumerate() {
            if s.contains(f) {
                continue;
            }
            let next = s.union(&principals[i]);
            if seen.insert(next.clone()) {
                stack.push(next);
            }
        }
    }
    let sorted: BTreeSet<MorphismSet> = seen.into_iter().collect();
    Ok(sorted
        .into_iter()
        .map(|members| Sieve { target: x, members })
        .collect())
}

/// `F_*S`: morphisms into `F(X)` factoring through some `F(g)`, `g ∈ S`.
pub fn pushforward_sieve(functor: &FinFunctor, s: &Sieve) -> Sieve {
    let t = &*functor.target;
    let image = Presieve {
        target: functor.obj(s.target),
        members: MorphismSet::from_iter(t.morphism_count(), s.iter().map(|g| functor.mor(g))),
    };
    let out = generate(t, &image);
    debug_assert!(is_downward_closed(t, &out.as_presieve()));
    out
}

/// `F^*S`: morphisms `f` into `X` with `F(f) ∈ S`, where `S` lives on `F(X)`.
pub fn functor_pullback_sieve(functor: &FinFunctor, x: ObjId, s: &Sieve) -> Result<Sieve> {
    if functor.obj(x) != s.target {
        return Err(Error::TypeMismatch("sieve does not live on F(X)".into()));
    }
    let src = &*functor.source;
    let members = MorphismSet::from_iter(
        src.morphism_count(),
        src.incoming(x)
            .iter()
            .copied()
            .filter(|&f| s.contains(functor.mor(f))),
    );
    let out = Sieve { target: x, members };
    debug_assert!(is_downward_closed(src, &out.as_presieve()));
    Ok(out)
}

/// Morphisms into `y` that factor through some object in the image of `F`.
pub fn image_sieve(functor: &FinFunctor, y: ObjId) -> Sieve {
    let t = &*functor.target;
    let mut through = MorphismSet::empty(t.morphism_count());
    let mut images: Vec<ObjId> = functor.object_map.clone();
    images.sort_unstable();
    images.dedup();
    for fx in images {
        for &k in t.hom(fx, y) {
            through.insert(k);
        }
    }
    let out = generate(t, &Presieve { target: y, members: through });
    debug_assert!(is_downward_closed(t, &out.as_presieve()));
    out
}
