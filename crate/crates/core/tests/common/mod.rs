//! Brute-force reference implementations used to cross-check the library.
//! They follow the textbook definitions directly and share no code with the
//! crate beyond reading composition tables.

#![allow(dead_code)]

use sitecalc::{FinCat, MorId, ObjId, Presheaf};

/// Every tuple in `0..sizes[0] × 0..sizes[1] × …`, odometer order.
pub fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    if sizes.contains(&0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![0usize; sizes.len()];
    loop {
        out.push(cur.clone());
        let mut i = sizes.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < sizes[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// The function table carried in a generator morphism name: the dot-separated
/// digits after the last underscore.
pub fn function_of(c: &FinCat, f: MorId) -> Vec<usize> {
    let name = c.morphism_name(f);
    let digits = &name[name.rfind('_').expect("generator name") + 1..];
    if digits.is_empty() {
        Vec::new()
    } else {
        digits.split('.').map(|d| d.parse().expect("digit")).collect()
    }
}

pub fn is_surjective(map: &[usize], codomain_size: usize) -> bool {
    (0..codomain_size).all(|y| map.contains(&y))
}

pub fn oracle_is_epi(c: &FinCat, f: MorId) -> bool {
    let b = c.cod(f);
    c.objects().all(|w| {
        let hs = c.hom(b, w);
        hs.iter().all(|&g| {
            hs.iter()
                .all(|&h| g == h || c.compose(g, f) != c.compose(h, f))
        })
    })
}

/// A family `fam` into `target` is effective epimorphic when, for every `W`,
/// each compatible tuple `(h_i : dom f_i → W)` is `(h ∘ f_i)` for exactly one
/// `h : target → W`. Compatible: `f_i g = f_j g'` implies `h_i g = h_j g'`.
pub fn oracle_effective_family(c: &FinCat, target: ObjId, fam: &[MorId]) -> bool {
    let doms: Vec<ObjId> = fam.iter().map(|&f| c.dom(f)).collect();
    let mut spans: Vec<(usize, usize, MorId, MorId)> = Vec::new();
    for i in 0..fam.len() {
        for j in 0..fam.len() {
            for z in c.objects() {
                for &g1 in c.hom(z, doms[i]) {
                    for &g2 in c.hom(z, doms[j]) {
                        if c.compose(fam[i], g1) == c.compose(fam[j], g2) {
                            spans.push((i, j, g1, g2));
                        }
                    }
                }
            }
        }
    }
    c.objects().all(|w| {
        let homs: Vec<&[MorId]> = doms.iter().map(|&d| c.hom(d, w)).collect();
        let sizes: Vec<usize> = homs.iter().map(|h| h.len()).collect();
        let all: Vec<Vec<usize>> = if fam.is_empty() { vec![Vec::new()] } else { tuples(&sizes) };
        all.into_iter().all(|t| {
            let h: Vec<MorId> = t.iter().enumerate().map(|(i, &k)| homs[i][k]).collect();
            let compatible = spans
                .iter()
                .all(|&(i, j, g1, g2)| c.compose(h[i], g1) == c.compose(h[j], g2));
            if !compatible {
                return true;
            }
            let factorizations = c
                .hom(target, w)
                .iter()
                .filter(|&&u| fam.iter().zip(&h).all(|(&f, &hi)| c.compose(u, f) == hi))
                .count();
            factorizations == 1
        })
    })
}

/// Number of tuples [`oracle_effective_family`] would visit.
pub fn family_cost(c: &FinCat, fam: &[MorId]) -> u128 {
    c.objects()
        .map(|w| fam.iter().map(|&f| c.hom(c.dom(f), w).len() as u128).product::<u128>())
        .sum()
}

pub fn oracle_is_effective_epi(c: &FinCat, f: MorId) -> bool {
    oracle_effective_family(c, c.cod(f), &[f])
}

/// Sheaf condition for a sieve given as its member list.
pub fn oracle_sheaf_for_sieve(p: &Presheaf, target: ObjId, sieve: &[MorId]) -> bool {
    let c = p.base();
    let sizes: Vec<usize> = sieve.iter().map(|&f| p.carrier(c.dom(f))).collect();
    let families: Vec<Vec<usize>> = if sieve.is_empty() { vec![Vec::new()] } else { tuples(&sizes) };
    let index = |m: MorId| sieve.iter().position(|&f| f == m);
    families.into_iter().all(|fam| {
        let compatible = sieve.iter().enumerate().all(|(i, &f)| {
            c.incoming(c.dom(f)).iter().all(|&g| {
                let j = index(c.compose(f, g)).expect("sieve is downward closed");
                p.restrict(g, fam[i] as u32) as usize == fam[j]
            })
        });
        if !compatible {
            return true;
        }
        let amalgamations = (0..p.carrier(target))
            .filter(|&x| {
                sieve
                    .iter()
                    .enumerate()
                    .all(|(i, &f)| p.restrict(f, x as u32) as usize == fam[i])
            })
            .count();
        amalgamations == 1
    })
}

/// Downward-closed subsets of the morphisms into `x`.
pub fn oracle_sieve_count(c: &FinCat, x: ObjId) -> usize {
    let into = c.incoming(x);
    (0u64..1 << into.len())
        .filter(|mask| {
            let has = |f: MorId| {
                into.iter()
                    .position(|&g| g == f)
                    .is_some_and(|i| mask >> i & 1 == 1)
            };
            into.iter().enumerate().all(|(i, &f)| {
                mask >> i & 1 == 0 || c.incoming(c.dom(f)).iter().all(|&g| has(c.compose(f, g)))
            })
        })
        .count()
}

pub fn oracle_is_initial(c: &FinCat, x: ObjId) -> bool {
    c.objects().all(|w| c.hom(x, w).len() == 1)
}

/// `(z; j1, j2)` is a coproduct when `u ↦ (u j1, u j2)` is a bijection
/// `Hom(z, W) → Hom(x, W) × Hom(y, W)` for every `W`.
pub fn oracle_is_coproduct(c: &FinCat, j1: MorId, j2: MorId) -> bool {
    let (x, y, z) = (c.dom(j1), c.dom(j2), c.cod(j1));
    c.objects().all(|w| {
        let mut seen = std::collections::BTreeSet::new();
        for &u in c.hom(z, w) {
            seen.insert((c.compose(u, j1), c.compose(u, j2)));
        }
        seen.len() == c.hom(z, w).len() && seen.len() == c.hom(x, w).len() * c.hom(y, w).len()
    })
}

/// `P` sends initial objects to singletons and every binary coproduct
/// cocone to a product.
pub fn oracle_preserves_products(p: &Presheaf) -> bool {
    let c = p.base();
    for x in c.objects() {
        if oracle_is_initial(c, x) && p.carrier(x) != 1 {
            return false;
        }
    }
    for j1 in c.morphisms() {
        for &j2 in c.incoming(c.cod(j1)) {
            if !oracle_is_coproduct(c, j1, j2) {
                continue;
            }
            let z = c.cod(j1);
            let mut images = std::collections::BTreeSet::new();
            for e in 0..p.carrier(z) as u32 {
                images.insert((p.restrict(j1, e), p.restrict(j2, e)));
            }
            if images.len() != p.carrier(z) || images.len() != p.carrier(c.dom(j1)) * p.carrier(c.dom(j2)) {
                return false;
            }
        }
    }
    true
}

/// Topologies on `n` points: families of subsets containing the empty and
/// full set and closed under pairwise union and intersection.
pub fn oracle_topology_count(n: usize) -> usize {
    let subsets = 1usize << n;
    let full = subsets - 1;
    let mut count = 0;
    for fam in 0u64..1 << subsets {
        let has = |u: usize| fam >> u & 1 == 1;
        if !has(0) || !has(full) {
            continue;
        }
        let closed = (0..subsets)
            .filter(|&u| has(u))
            .all(|u| (0..subsets).filter(|&v| has(v)).all(|v| has(u | v) && has(u & v)));
        if closed {
            count += 1;
        }
    }
    count
}
