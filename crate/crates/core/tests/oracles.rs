mod common;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use sitecalc::epi::{is_effective_epi, is_effective_epi_family, is_epi, is_regular_epi};
use sitecalc::limits::{find_binary_coproduct, find_initial, find_pullback, kernel_pair, replay_witness};
use sitecalc::presheaf::{all_presheaves, random_presheaf};
use sitecalc::sheaf::{is_sheaf_for_sieve, Budget};
use sitecalc::sieve::{enumerate_sieves, generate, pullback_sieve};
use sitecalc::topology::{
    coherent_coverage, extensive_coverage, regular_coverage, saturate, Coverage,
};
use sitecalc::workbench::generators::{
    corpus, gen_finset_full, gen_finset_skeleton, gen_fintop, standard_sets, topologies,
};
use sitecalc::{Caps, FinCat, MorId, ObjId, Presieve};

fn skel(n: usize) -> Arc<FinCat> {
    Arc::new(gen_finset_skeleton(n).unwrap())
}

#[test]
fn skeleton_hom_sets_have_k_to_the_m_elements() {
    for n in 0..=3 {
        let c = skel(n);
        for m in 0..=n {
            for k in 0..=n {
                let expected = (k as u32).pow(m as u32) as usize;
                assert_eq!(c.hom(ObjId(m as u32), ObjId(k as u32)).len(), expected, "n={n} {m}->{k}");
            }
        }
    }
    assert_eq!(skel(3).morphism_count(), 60);
}

#[test]
fn topology_counts_match_brute_force() {
    for n in 0..=3 {
        assert_eq!(topologies(n).len(), oracle_topology_count(n), "n={n}");
    }
    assert_eq!(oracle_topology_count(3), 29);
    let c = gen_fintop(2).unwrap();
    assert_eq!(c.object_count(), 1 + 1 + 4);
}

#[test]
fn fintop_hom_sets_are_the_continuous_maps() {
    let c = gen_fintop(2).unwrap();
    let space = |x: ObjId| -> (usize, u64) {
        let (p, f) = c.object_name(x)[1..].split_once('_').unwrap();
        (p.parse().unwrap(), f.parse().unwrap())
    };
    for x in c.objects() {
        for y in c.objects() {
            let ((m, fx), (k, fy)) = (space(x), space(y));
            let maps = if m == 0 { vec![vec![]] } else { tuples(&vec![k; m]) };
            let continuous = maps
                .iter()
                .filter(|map| {
                    (0..1u32 << k).filter(|&u| fy >> u & 1 == 1).all(|u| {
                        let pre = (0..m).filter(|&i| u >> map[i] & 1 == 1).fold(0u32, |a, i| a | 1 << i);
                        fx >> pre & 1 == 1
                    })
                })
                .count();
            assert_eq!(c.hom(x, y).len(), continuous);
        }
    }
}

#[test]
fn epi_classes_match_definitions_on_corpus() {
    for c in corpus() {
        for f in c.morphisms() {
            assert_eq!(is_epi(&c, f), oracle_is_epi(&c, f), "{} {}", c.name(), c.morphism_name(f));
            let eff = is_effective_epi(&c, f);
            assert_eq!(eff, oracle_is_effective_epi(&c, f), "{} {}", c.name(), c.morphism_name(f));
            if is_regular_epi(&c, f) {
                assert!(eff);
            }
        }
    }
}

#[test]
fn effective_families_match_definition_on_small_objects() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for c in corpus() {
        for x in c.objects() {
            let into = c.incoming(x);
            for _ in 0..12 {
                let members: Vec<MorId> = into.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
                if family_cost(&c, &members) > 200_000 {
                    continue;
                }
                let p = Presieve::new(&c, x, members.clone()).unwrap();
                assert_eq!(
                    is_effective_epi_family(&c, &p),
                    oracle_effective_family(&c, x, &members),
                    "{} {:?}",
                    c.name(),
                    members
                );
            }
        }
    }
}

#[test]
fn sieve_enumeration_matches_downward_closed_subsets() {
    let caps = Caps::default();
    for c in corpus() {
        for x in c.objects() {
            if c.incoming(x).len() > caps.max_sieve_morphisms + 1 {
                assert!(enumerate_sieves(&c, x, &caps).is_err());
                continue;
            }
            let sieves = enumerate_sieves(&c, x, &caps).unwrap();
            assert_eq!(sieves.len(), oracle_sieve_count(&c, x), "{} {}", c.name(), c.object_name(x));
        }
    }
}

#[test]
fn sheaf_condition_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checked = 0;
    for c in corpus() {
        for _ in 0..15 {
            let Some(p) = random_presheaf(&c, 2, &mut rng) else { continue };
            let x = ObjId(rng.gen_range(0..c.object_count()) as u32);
            let members: Vec<MorId> = c.incoming(x).iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
            let s = generate(&c, &Presieve::new(&c, x, members).unwrap());
            let Ok(fast) = is_sheaf_for_sieve(&p, &s, Budget(1 << 16)) else { continue };
            let list: Vec<MorId> = s.iter().collect();
            assert_eq!(fast, oracle_sheaf_for_sieve(&p, x, &list), "{}", c.name());
            checked += 1;
        }
    }
    assert!(checked > 200, "{checked}");
}

/// Counts presheaves by trying every restriction table and keeping the
/// functorial assignments.
fn naive_presheaf_count(c: &FinCat, max: usize) -> usize {
    let n = c.object_count();
    let mut total = 0;
    for carrier in tuples(&vec![max + 1; n]) {
        let free: Vec<MorId> = c.morphisms().filter(|&f| !c.is_identity(f)).collect();
        let sizes: Vec<usize> = free
            .iter()
            .map(|&f| carrier[c.dom(f).index()].pow(carrier[c.cod(f).index()] as u32))
            .collect();
        let choices = if free.is_empty() { vec![vec![]] } else { tuples(&sizes) };
        for choice in choices {
            let table = |f: MorId, y: usize| -> usize {
                if c.is_identity(f) {
                    return y;
                }
                let i = free.iter().position(|&g| g == f).unwrap();
                let base = carrier[c.dom(f).index()];
                (choice[i] / base.pow(y as u32)) % base
            };
            let functorial = c.morphisms().all(|f| {
                c.incoming(c.dom(f)).iter().all(|&g| {
                    (0..carrier[c.cod(f).index()]).all(|y| table(g, table(f, y)) == table(c.compose(f, g), y))
                })
            });
            if functorial {
                total += 1;
            }
        }
    }
    total
}

#[test]
fn presheaf_enumeration_matches_naive_count() {
    let arrow = Arc::new(sitecalc::workbench::generators::walking_arrow());
    assert_eq!(all_presheaves(&arrow, 2).len(), 11);
    assert_eq!(naive_presheaf_count(&arrow, 2), 11);
    for c in [skel(1), skel(2)] {
        assert_eq!(all_presheaves(&c, 2).len(), naive_presheaf_count(&c, 2), "{}", c.name());
    }
}

#[test]
fn skeleton_coproducts_are_sums() {
    let c = skel(3);
    assert_eq!(find_initial(&c), Some(ObjId(0)));
    for x in 0..=3u32 {
        for y in 0..=3u32 {
            let w = find_binary_coproduct(&c, ObjId(x), ObjId(y));
            if x + y <= 3 {
                let w = w.expect("sum exists");
                assert_eq!(w.apex, ObjId(x + y));
                assert!(oracle_is_coproduct(&c, w.legs[0], w.legs[1]));
            } else {
                assert!(w.is_none(), "{x}+{y}");
            }
        }
    }
}

#[test]
fn pullbacks_in_finite_sets_have_fibre_product_size() {
    let c = gen_finset_full(&standard_sets()).unwrap();
    let size = |x: ObjId| standard_sets()[x.index()].len();
    for f in c.morphisms() {
        for &g in c.incoming(c.cod(f)) {
            let (ff, gg) = (function_of(&c, f), function_of(&c, g));
            let fibre = ff.iter().map(|a| gg.iter().filter(|b| *b == a).count()).sum::<usize>();
            match find_pullback(&c, f, g) {
                Some(w) => {
                    assert_eq!(size(w.apex), fibre);
                    assert!(replay_witness(&c, &w));
                }
                None => assert!(fibre > 2, "fibre product of size {fibre} exists"),
            }
        }
        if let Some(kp) = kernel_pair(&c, f) {
            assert_eq!(c.compose(f, kp.legs[0]), c.compose(f, kp.legs[1]));
        }
    }
}

fn named(c: &Arc<FinCat>) -> Vec<Coverage> {
    let caps = Caps::default();
    [regular_coverage(c).ok(), extensive_coverage(c).ok(), coherent_coverage(c, &caps).ok()]
        .into_iter()
        .flatten()
        .collect()
}

#[test]
fn covering_sieves_are_closed_under_intersection_and_pullback() {
    let caps = Caps::default();
    for c in [skel(2), Arc::new(gen_fintop(1).unwrap()), Arc::new(gen_finset_full(&standard_sets()).unwrap())] {
        for cov in named(&c) {
            let t = saturate(&cov, &caps).unwrap();
            for x in c.objects() {
                for s in t.covering(x) {
                    for r in t.covering(x) {
                        assert!(t.is_covering(&s.intersection(r)), "{}", c.name());
                    }
                    for &f in c.incoming(x) {
                        assert!(t.is_covering(&pullback_sieve(&c, s, f).unwrap()));
                    }
                }
            }
        }
    }
}
