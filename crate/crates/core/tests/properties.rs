mod common;

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use sitecalc::epi::{classify, effective_epis, is_effective_epi, is_effective_epi_family};
use sitecalc::functor::{full_subcategory, is_fully_faithful, validate_functor};
use sitecalc::limits::{find_binary_coproduct, find_pullback, kernel_pair};
use sitecalc::presheaf::{random_presheaf, representable, validate_presheaf};
use sitecalc::sheaf::{
    is_projective, is_sheaf_for_coverage, is_sheaf_for_presieve,
    is_sheaf_for_topology, preserves_finite_products, Budget,
};
use sitecalc::sieve::{
    enumerate_sieves, functor_pullback_sieve, generate, image_sieve, is_downward_closed,
    pullback_sieve, pushforward_sieve, top_sieve,
};
use sitecalc::topology::{
    check_topology, coherent_coverage, extensive_coverage, is_finitary_extensive, is_precoherent,
    is_preregular, regular_coverage, saturate,
};
use sitecalc::transport::{
    check_equivalence_conditions, induced_topology, is_cocontinuous, is_continuous, is_cover_dense, verify_sheaf_equivalence,
    SiteMap,
};
use sitecalc::workbench::generators::{
    corpus, gen_finset_skeleton, gen_fintop, random_poset, random_transformation_monoid,
    skeleton_inclusion, standard_sets,
};
use sitecalc::{validate_category, Caps, Coverage, FinCat, FinFunctor, GrothTopology, MorId, ObjId, Presieve, Sieve};

fn cats() -> &'static [Arc<FinCat>] {
    static CORPUS: OnceLock<Vec<Arc<FinCat>>> = OnceLock::new();
    CORPUS.get_or_init(corpus)
}

fn skel(n: usize) -> Arc<FinCat> {
    Arc::new(gen_finset_skeleton(n).unwrap())
}

fn random_presieve(c: &FinCat, rng: &mut ChaCha8Rng) -> Presieve {
    let x = ObjId(rng.gen_range(0..c.object_count()) as u32);
    let members: Vec<MorId> = c.incoming(x).iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
    Presieve::new(c, x, members).unwrap()
}

fn random_sieve(c: &FinCat, rng: &mut ChaCha8Rng) -> Sieve {
    generate(c, &random_presieve(c, rng))
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn random_categories_are_associative(seed in any::<u64>(), n in 1usize..6, monoid in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = if monoid {
            random_transformation_monoid(&mut rng, 2 + n % 2, 1 + n % 2, "m")
        } else {
            random_poset(&mut rng, n, "p")
        };
        prop_assert!(validate_category(&c).is_ok());
        for f in c.morphisms() {
            for &g in c.out_of(c.cod(f)) {
                for &h in c.out_of(c.cod(g)) {
                    prop_assert_eq!(c.compose(h, c.compose(g, f)), c.compose(c.compose(h, g), f));
                }
            }
        }
    }

    #[test]
    fn generate_is_a_closure_operator(idx in 0usize..29, seed in any::<u64>()) {
        let c = &cats()[idx % cats().len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_presieve(c, &mut rng);
        let s = generate(c, &p);
        prop_assert!(p.iter().all(|f| s.contains(f)));
        prop_assert_eq!(&generate(c, &s.as_presieve()), &s);
        let bigger: Vec<MorId> = c.incoming(p.target()).iter().copied()
            .filter(|&f| p.contains(f) || rng.gen_bool(0.5)).collect();
        let q = Presieve::new(c, p.target(), bigger).unwrap();
        prop_assert!(s.is_subset(&generate(c, &q)));
        prop_assert!(is_downward_closed(c, &s.as_presieve()));
    }

    #[test]
    fn pullback_commutes_with_intersection(idx in 0usize..29, seed in any::<u64>()) {
        let c = &cats()[idx % cats().len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_sieve(c, &mut rng);
        let members: Vec<MorId> = c.incoming(s.target()).iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let r = generate(c, &Presieve::new(c, s.target(), members).unwrap());
        let both = s.intersection(&r);
        prop_assert!(is_downward_closed(c, &both.as_presieve()));
        for &f in c.incoming(s.target()) {
            let lhs = pullback_sieve(c, &both, f).unwrap();
            let rhs = pullback_sieve(c, &s, f).unwrap().intersection(&pullback_sieve(c, &r, f).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn pullback_contains_generated_pullback_presieve(idx in 0usize..29, seed in any::<u64>()) {
        let c = &cats()[idx % cats().len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_presieve(c, &mut rng);
        let s = generate(c, &p);
        for &f in c.incoming(p.target()) {
            let members: Vec<MorId> = c.incoming(c.dom(f)).iter().copied()
                .filter(|&h| p.contains(c.compose(f, h))).collect();
            let q = Presieve::new(c, c.dom(f), members).unwrap();
            prop_assert!(generate(c, &q).is_subset(&pullback_sieve(c, &s, f).unwrap()));
        }
    }

    #[test]
    fn functor_sieve_operations_give_sieves(seed in any::<u64>(), n in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = skeleton_inclusion(n, &standard_sets()).unwrap();
        let (s, t) = (f.source.clone(), f.target.clone());
        let sieve = random_sieve(&s, &mut rng);
        let pushed = pushforward_sieve(&f, &sieve);
        prop_assert!(is_downward_closed(&t, &pushed.as_presieve()));
        let ts = random_sieve(&t, &mut rng);
        for x in s.objects().filter(|&x| f.obj(x) == ts.target()) {
            let back = functor_pullback_sieve(&f, x, &ts).unwrap();
            prop_assert!(is_downward_closed(&s, &back.as_presieve()));
        }
        for y in t.objects() {
            prop_assert!(is_downward_closed(&t, &image_sieve(&f, y).as_presieve()));
        }
    }

    #[test]
    fn saturation_is_a_monotone_topology(idx in 0usize..29, seed in any::<u64>()) {
        let c = &cats()[idx % cats().len()];
        let caps = Caps::default();
        prop_assume!(c.objects().all(|x| c.incoming(x).len() <= caps.max_sieve_morphisms + 1));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut small = Coverage::empty(c.clone());
        for _ in 0..rng.gen_range(0..4) {
            small.insert(random_presieve(c, &mut rng));
        }
        let mut large = small.clone();
        for _ in 0..2 {
            large.insert(random_presieve(c, &mut rng));
        }
        let ts = saturate(&small, &caps).unwrap();
        let tl = saturate(&large, &caps).unwrap();
        prop_assert!(check_topology(&ts, &caps).unwrap().is_ok());
        prop_assert!(ts.is_subset(&tl));
        for x in c.objects() {
            for s in ts.covering(x) {
                for r in enumerate_sieves(c, x, &caps).unwrap() {
                    if s.is_subset(&r) {
                        prop_assert!(ts.is_covering(&r));
                    }
                }
            }
        }
    }

    #[test]
    fn presheaf_sheaf_condition_matches_generated_sieve(idx in 0usize..29, seed in any::<u64>()) {
        let c = &cats()[idx % cats().len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(p) = random_presheaf(c, 2, &mut rng) else { return Ok(()) };
        let r = random_presieve(c, &mut rng);
        let (Ok(a), Ok(b)) = (
            is_sheaf_for_presieve(&p, &r, Budget::DEFAULT),
            sitecalc::sheaf::is_sheaf_for_sieve(&p, &generate(c, &r), Budget::DEFAULT),
        ) else { return Ok(()) };
        prop_assert_eq!(a, b);
    }

    #[test]
    fn sheaf_condition_is_an_equalizer_when_pullbacks_exist(seed in any::<u64>(), which in 0usize..3) {
        let c = [skel(2), Arc::new(sitecalc::workbench::generators::gen_finset_full(&standard_sets()).unwrap()), skel(1)][which].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(p) = random_presheaf(&c, 2, &mut rng) else { return Ok(()) };
        let r = random_presieve(&c, &mut rng);
        let fam = r.to_vec();
        let mut pullbacks = Vec::new();
        for &fi in &fam {
            for &fj in &fam {
                match find_pullback(&c, fi, fj) {
                    Some(w) => pullbacks.push((fi, fj, w.legs[0], w.legs[1])),
                    None => return Ok(()),
                }
            }
        }
        let sizes: Vec<usize> = fam.iter().map(|&f| p.carrier(c.dom(f))).collect();
        let tuples_all = if fam.is_empty() { vec![vec![]] } else { tuples(&sizes) };
        let pos = |f: MorId| fam.iter().position(|&g| g == f).unwrap();
        let equalized: BTreeSet<Vec<usize>> = tuples_all.into_iter().filter(|t| {
            pullbacks.iter().all(|&(fi, fj, p1, p2)| {
                p.restrict(p1, t[pos(fi)] as u32) == p.restrict(p2, t[pos(fj)] as u32)
            })
        }).collect();
        let images: Vec<Vec<usize>> = (0..p.carrier(r.target()) as u32)
            .map(|x| fam.iter().map(|&f| p.restrict(f, x) as usize).collect()).collect();
        let distinct: BTreeSet<Vec<usize>> = images.iter().cloned().collect();
        let equalizer = distinct.len() == images.len() && distinct == equalized;
        prop_assert_eq!(is_sheaf_for_presieve(&p, &r, Budget::UNLIMITED).unwrap(), equalizer);
    }

    #[test]
    fn extensive_sheaves_preserve_products(seed in any::<u64>(), which in 0usize..2) {
        let c = [skel(2), Arc::new(gen_fintop(1).unwrap())][which].clone();
        prop_assume!(is_finitary_extensive(&c).holds());
        let caps = Caps::default();
        let t = saturate(&extensive_coverage(&c).unwrap(), &caps).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(p) = random_presheaf(&c, 2, &mut rng) else { return Ok(()) };
        prop_assert_eq!(
            is_sheaf_for_topology(&p, &t, Budget::UNLIMITED).unwrap(),
            preserves_finite_products(&p).unwrap()
        );
    }
}

#[test]
fn representables_validate_and_identities_are_fully_faithful() {
    for c in cats() {
        for w in c.objects() {
            assert!(validate_presheaf(&representable(c, w)).is_ok());
        }
        let id = FinFunctor::identity(c.clone());
        assert!(is_fully_faithful(&id));
        assert!(validate_functor(&id).is_ok());
    }
}

#[test]
fn composite_functors_are_valid() {
    let full = Arc::new(sitecalc::workbench::generators::gen_finset_full(&standard_sets()).unwrap());
    let objs: Vec<ObjId> = vec![ObjId(0), ObjId(1), ObjId(2)];
    let (_, incl) = full_subcategory(&full, "sub", &objs).unwrap();
    let composite = incl.then(&FinFunctor::identity(full.clone())).unwrap();
    assert!(validate_functor(&composite).is_ok());
    let f = skeleton_inclusion(2, &standard_sets()).unwrap();
    let twice = FinFunctor::identity(f.source.clone()).then(&f).unwrap();
    assert!(validate_functor(&twice).is_ok());
    assert!(is_fully_faithful(&twice));
}

#[test]
fn epi_hierarchy_on_every_category() {
    for c in cats() {
        for f in c.morphisms() {
            let k = classify(c, f);
            assert!(!k.is_effective_epi || k.is_epi, "{}", c.morphism_name(f));
            assert!(!k.is_regular_epi || k.is_effective_epi);
            if k.is_effective_epi && kernel_pair(c, f).is_some() {
                assert!(k.is_regular_epi, "{} {}", c.name(), c.morphism_name(f));
            }
        }
    }
}

/// Two-member families `(f, g)` into `x` whose domains have a coproduct,
/// together with the induced map out of it.
fn binary_families(c: &FinCat) -> Vec<(Presieve, MorId)> {
    let mut out = Vec::new();
    for x in c.objects() {
        let into = c.incoming(x);
        for (i, &f) in into.iter().enumerate() {
            for &g in &into[i + 1..] {
                let Some(w) = find_binary_coproduct(c, c.dom(f), c.dom(g)) else { continue };
                let u = c.hom(w.apex, x).iter().copied()
                    .find(|&u| c.compose(u, w.legs[0]) == f && c.compose(u, w.legs[1]) == g)
                    .expect("coproduct induces a map");
                out.push((Presieve::new(c, x, [f, g]).unwrap(), u));
            }
        }
    }
    out
}

#[test]
fn effective_families_induce_effective_epis_from_coproducts() {
    for c in cats() {
        for (fam, u) in binary_families(c) {
            if is_effective_epi_family(c, &fam) {
                assert!(is_effective_epi(c, u), "{}: {:?}", c.name(), fam.to_vec());
            }
        }
    }
}

#[test]
fn effective_epis_from_coproducts_give_effective_families_in_finite_sets() {
    for n in 1..=3 {
        let c = skel(n);
        for (fam, u) in binary_families(&c) {
            if is_effective_epi(&c, u) {
                assert!(is_effective_epi_family(&c, &fam), "{n}: {:?}", fam.to_vec());
            }
        }
    }
}

#[test]
fn enumerated_sieves_are_distinct_closed_and_bounded() {
    let caps = Caps::default();
    for c in cats() {
        for x in c.objects() {
            let Ok(all) = enumerate_sieves(c, x, &caps) else { continue };
            let distinct: BTreeSet<&Sieve> = all.iter().collect();
            assert_eq!(distinct.len(), all.len());
            assert!(all.iter().all(|s| is_downward_closed(c, &s.as_presieve())));
            assert!(all.contains(&Sieve::empty(c, x)));
            assert!(all.contains(&top_sieve(c, x)));
        }
    }
}

/// Every family of sieves satisfying the topology axioms, by exhaustion.
fn all_topologies(c: &Arc<FinCat>, caps: &Caps) -> Vec<GrothTopology> {
    let per_object: Vec<Vec<Sieve>> = c.objects().map(|x| enumerate_sieves(c, x, caps).unwrap()).collect();
    let flat: Vec<(usize, &Sieve)> = per_object.iter().enumerate()
        .flat_map(|(i, v)| v.iter().map(move |s| (i, s))).collect();
    assert!(flat.len() <= 16);
    let mut out = Vec::new();
    for mask in 0u32..1 << flat.len() {
        let mut sets = vec![BTreeSet::new(); c.object_count()];
        for (k, (i, s)) in flat.iter().enumerate() {
            if mask >> k & 1 == 1 {
                sets[*i].insert((*s).clone());
            }
        }
        let t = GrothTopology::from_sets(c.clone(), sets).unwrap();
        if check_topology(&t, caps).unwrap().is_ok() {
            out.push(t);
        }
    }
    out
}

#[test]
fn saturation_is_the_intersection_of_containing_topologies() {
    let caps = Caps::default();
    let small: Vec<Arc<FinCat>> = ["walking-arrow", "chain:3", "skeleton:1", "cyclic:2"]
        .iter()
        .map(|s| Arc::new(sitecalc::workbench::generators::builtin(s).unwrap()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(313);
    for c in &small {
        let tops = all_topologies(c, &caps);
        for _ in 0..10 {
            let mut cov = Coverage::empty(c.clone());
            for _ in 0..rng.gen_range(0..3) {
                cov.insert(random_presieve(c, &mut rng));
            }
            let mut meet: Option<Vec<BTreeSet<Sieve>>> = None;
            for t in &tops {
                let contains = c.objects().all(|x| cov.covering(x).iter().all(|p| t.is_covering(&generate(c, p))));
                if !contains {
                    continue;
                }
                let sets: Vec<BTreeSet<Sieve>> = c.objects().map(|x| t.covering(x).clone()).collect();
                meet = Some(match meet {
                    None => sets,
                    Some(m) => m.iter().zip(&sets).map(|(a, b)| a.intersection(b).cloned().collect()).collect(),
                });
            }
            let meet = GrothTopology::from_sets(c.clone(), meet.expect("the maximal topology contains everything")).unwrap();
            assert_eq!(saturate(&cov, &caps).unwrap(), meet, "{}", c.name());
        }
    }
}

#[test]
fn premises_imply_precoherence_on_corpus() {
    let caps = Caps { max_sieve_morphisms: 18, ..Caps::default() };
    for c in cats() {
        if is_preregular(c).holds() && is_finitary_extensive(c).holds() {
            assert!(is_precoherent(c, &caps).unwrap().holds(), "{}", c.name());
        }
    }
}

#[test]
fn skeletons_satisfy_all_three_predicates_from_two_on() {
    let caps = Caps::default();
    for n in [0, 2] {
        let c = skel(n);
        assert!(is_preregular(&c).holds());
        assert!(is_finitary_extensive(&c).holds(), "{n}");
        assert!(is_precoherent(&c, &caps).unwrap().holds());
    }
    // Within the truncation 1 + 1 = 1, so van Kampen fails at n = 1.
    assert!(!is_finitary_extensive(&skel(1)).holds());
}

#[test]
fn projective_skeletons_make_every_presheaf_a_regular_sheaf() {
    let c = skel(2);
    let eff = effective_epis(&c);
    assert!(c.objects().all(|x| is_projective(&c, x, &eff)));
    let reg = regular_coverage(&c).unwrap();
    let coh = saturate(&coherent_coverage(&c, &Caps::default()).unwrap(), &Caps::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    for _ in 0..60 {
        let Some(p) = random_presheaf(&c, 2, &mut rng) else { continue };
        assert!(is_sheaf_for_coverage(&p, &reg, Budget::UNLIMITED).unwrap());
        assert_eq!(
            is_sheaf_for_topology(&p, &coh, Budget::UNLIMITED).unwrap(),
            preserves_finite_products(&p).unwrap()
        );
    }
}

#[test]
fn comparison_functor_is_continuous_and_cocontinuous() {
    let caps = Caps::default();
    let f = skeleton_inclusion(2, &standard_sets()).unwrap();
    let target = saturate(&coherent_coverage(&f.target, &caps).unwrap(), &caps).unwrap();
    assert!(is_cover_dense(&f, &target));
    let induced = induced_topology(&f, &target, &caps).unwrap();
    let m = SiteMap::new(f.clone(), induced.clone(), target).unwrap();
    assert!(is_continuous(&m, 2, Budget::UNLIMITED).unwrap());
    assert!(is_cocontinuous(&m));
    assert!(is_precoherent(&f.source, &caps).unwrap().holds());
    let own = saturate(&coherent_coverage(&f.source, &caps).unwrap(), &caps).unwrap();
    assert_eq!(induced, own);
    let census = verify_sheaf_equivalence(&f, 2, &caps, Budget::UNLIMITED).unwrap();
    assert!(census.lands_in_sheaves());
}

#[test]
fn one_point_skeleton_is_cover_dense_but_not_covering() {
    // {0,1} is covered by its two points, yet receives no single effective epi
    // from the image.
    let caps = Caps::default();
    let f = skeleton_inclusion(1, &standard_sets()).unwrap();
    let target = saturate(&coherent_coverage(&f.target, &caps).unwrap(), &caps).unwrap();
    assert!(is_cover_dense(&f, &target));
    let conditions = check_equivalence_conditions(&f, &caps).unwrap();
    assert!(conditions.not_covered.is_some());
    assert!(!conditions.passes());
}
