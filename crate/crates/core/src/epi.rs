//! The epimorphism hierarchy for single morphisms and effective epimorphic
//! families.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::category::{FinCat, MorId, ObjId};
use crate::limits::{is_coequalizer, kernel_pair, ConeWitness};
use crate::presheaf::representable;
use crate::sheaf::{is_sheaf_for_sieve, Budget};
use crate::sieve::{generate, Presieve, Sieve};

pub fn is_epi(c: &FinCat, f: MorId) -> bool {
    let x = c.cod(f);
    c.objects().all(|w| {
        let hs = c.hom(x, w);
        let mut seen = HashSet::with_capacity(hs.len());
        hs.iter().all(|&h| seen.insert(c.compose(h, f)))
    })
}

/// Every `e: dom f → W` that coequalizes all pairs `f` coequalizes factors
/// uniquely through `f`.
pub fn is_effective_epi(c: &FinCat, f: MorId) -> bool {
    let y = c.dom(f);
    // classes[z]: partition of Hom(z, y) by f ∘ g
    let classes: Vec<Vec<Vec<MorId>>> = c
        .objects()
        .map(|z| {
            let mut by: HashMap<MorId, Vec<MorId>> = HashMap::new();
            for &g in c.hom(z, y) {
                by.entry(c.compose(f, g)).or_default().push(g);
            }
            by.into_values().filter(|v| v.len() > 1).collect()
        })
        .collect();
    let coequalizes = |e: MorId| {
        classes.iter().flatten().all(|class| {
            let first = c.compose(e, class[0]);
            class[1..].iter().all(|&g| c.compose(e, g) == first)
        })
    };
    c.objects().all(|w| {
        let mut factorizations: HashMap<MorId, usize> = HashMap::new();
        for &d in c.hom(c.cod(f), w) {
            *factorizations.entry(c.compose(d, f)).or_default() += 1;
        }
        c.hom(y, w)
            .iter()
            .filter(|&&e| coequalizes(e))
            .all(|e| factorizations.get(e) == Some(&1))
    })
}

/// `f` is the coequalizer of some parallel pair into its domain.
pub fn is_regular_epi(c: &FinCat, f: MorId) -> bool {
    regular_epi_witness(c, f).is_some()
}

/// The first pair `(g1, g2)` (ascending) that `f` coequalizes universally.
pub fn regular_epi_witness(c: &FinCat, f: MorId) -> Option<(MorId, MorId)> {
    let x = c.dom(f);
    for z in c.objects() {
        let pairs = c.hom(z, x);
        for (i, &g1) in pairs.iter().enumerate() {
            for &g2 in &pairs[i..] {
                if is_coequalizer(c, g1, g2, f) {
                    return Some((g1, g2));
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpiClass {
    pub morphism: MorId,
    pub is_epi: bool,
    pub is_regular_epi: bool,
    pub is_effective_epi: bool,
    pub kernel_pair: Option<ConeWitness>,
}

impl EpiClass {
    pub fn has_kernel_pair(&self) -> bool {
        self.kernel_pair.is_some()
    }
}

pub fn classify(c: &FinCat, f: MorId) -> EpiClass {
    EpiClass {
        morphism: f,
        is_epi: is_epi(c, f),
        is_regular_epi: is_regular_epi(c, f),
        is_effective_epi: is_effective_epi(c, f),
        kernel_pair: kernel_pair(c, f),
    }
}

pub fn effective_epis(c: &FinCat) -> Vec<MorId> {
    c.morphisms().filter(|&f| is_effective_epi(c, f)).collect()
}

/// Constraints of a family: every pair `(g_i, g_j)` it coequalizes, grouped
/// by the common composite. Each group lists `(member index, g)` sorted by
/// member index; the first entry is the group's anchor.
fn coequalized_groups(c: &FinCat, members: &[MorId]) -> Vec<Vec<(usize, MorId)>> {
    let mut groups: HashMap<MorId, Vec<(usize, MorId)>> = HashMap::new();
    for (i, &f) in members.iter().enumerate() {
        for &g in c.incoming(c.dom(f)) {
            groups.entry(c.compose(f, g)).or_default().push((i, g));
        }
    }
    let mut out: Vec<Vec<(usize, MorId)>> = groups.into_values().filter(|g| g.len() > 1).collect();
    for g in &mut out {
        g.sort();
    }
    out.sort();
    out
}

/// Universal property checked directly: for every `W`, each family
/// `(e_i: X_i → W)` coequalizing what the family coequalizes has exactly one
/// `d: B → W` with `d ∘ f_i = e_i`.
///
/// The empty family is effective exactly when its target is initial.
pub fn is_effective_epi_family(c: &FinCat, fam: &Presieve) -> bool {
    let members: Vec<MorId> = fam.iter().collect();
    let b = fam.target();
    let groups = coequalized_groups(c, &members);
    // per member: (g, anchor member, anchor g) constraints checked on assignment
    let mut checks: Vec<Vec<(MorId, usize, MorId)>> = vec![Vec::new(); members.len()];
    for group in &groups {
        let (a, ga) = group[0];
        for &(i, g) in &group[1..] {
            checks[i].push((g, a, ga));
        }
    }
    c.objects().all(|w| {
        let ds = c.hom(b, w);
        let mut induced = HashSet::with_capacity(ds.len());
        for &d in ds {
            let fam: Vec<MorId> = members.iter().map(|&f| c.compose(d, f)).collect();
            if !induced.insert(fam) {
                return false;
            }
        }
        // count compatible families, stopping once there are more than |Hom(B, W)|
        let limit = ds.len();
        let mut assignment = vec![MorId(0); members.len()];
        let mut count = 0usize;
        #[allow(clippy::too_many_arguments)]
        fn search(
            c: &FinCat,
            w: ObjId,
            members: &[MorId],
            checks: &[Vec<(MorId, usize, MorId)>],
            i: usize,
            assignment: &mut Vec<MorId>,
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
            for &e in c.hom(c.dom(members[i]), w) {
                assignment[i] = e;
                let ok = checks[i]
                    .iter()
                    .all(|&(g, a, ga)| c.compose(e, g) == c.compose(assignment[a], ga));
                if ok {
                    search(c, w, members, checks, i + 1, assignment, count, limit);
                }
            }
        }
        search(c, w, &members, &checks, 0, &mut assignment, &mut count, limit);
        count == limit
    })
}

/// The same property via representables: every `h_W` is a sheaf for the
/// sieve generated by the family.
pub fn effective_family_via_sheaf(c: &Arc<FinCat>, fam: &Presieve) -> bool {
    let s = generate(c, fam);
    c.objects().all(|w| {
        is_sheaf_for_sieve(&representable(c, w), &s, Budget::UNLIMITED)
            .expect("unlimited budget")
    })
}

/// Memoizes effectiveness by generated sieve; a family and its generated
/// sieve are effective together.
#[derive(Debug)]
pub struct EffectiveFamilies<'c> {
    c: &'c FinCat,
    memo: HashMap<Sieve, bool>,
}

impl<'c> EffectiveFamilies<'c> {
    pub fn new(c: &'c FinCat) -> Self {
        EffectiveFamilies {
            c,
            memo: HashMap::new(),
        }
    }

    pub fn is_effective(&mut self, fam: &Presieve) -> bool {
        let s = generate(self.c, fam);
        self.is_effective_sieve(&s)
    }

    pub fn is_effective_sieve(&mut self, s: &Sieve) -> bool {
        if let Some(&v) = self.memo.get(s) {
            return v;
        }
        let v = is_effective_epi_family(self.c, &s.as_presieve());
        self.memo.insert(s.clone(), v);
        v
    }
}
