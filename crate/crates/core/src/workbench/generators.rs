//! Builtin categories built from finite sets and finite spaces, plus small
//! posets and monoids. A seeded random corpus feeds the tests.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::category::{Caps, FinCat, FinCatBuilder, MorId, ObjId};
use crate::error::{Error, Result};
use crate::functor::FinFunctor;

fn join_digits(d: &[usize]) -> String {
    d.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
}

fn split_digits(s: &str) -> Option<Vec<usize>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split('.').map(|t| t.parse().ok()).collect()
}

/// All functions `0..m → 0..k` as digit strings, lexicographic.
fn functions(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut d = vec![0usize; m];
    if m > 0 && k == 0 {
        return out;
    }
    loop {
        out.push(d.clone());
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            d[i] += 1;
            if d[i] < k {
                break;
            }
            d[i] = 0;
        }
    }
}

fn cap_check(count: u128, caps: &Caps) -> Result<()> {
    if count > caps.max_morphisms as u128 {
        return Err(Error::CapExceeded {
            what: "morphisms",
            limit: caps.max_morphisms,
            actual: usize::try_from(count).unwrap_or(usize::MAX),
        });
    }
    Ok(())
}

/// A category whose objects carry finite point sets and whose morphisms are
/// the functions accepted by `admits`, composed as functions.
fn concrete_category(
    name: &str,
    object_names: &[String],
    sizes: &[usize],
    morphism_name: impl Fn(usize, usize, &[usize]) -> String,
    admits: impl Fn(usize, usize, &[usize]) -> bool,
    caps: &Caps,
) -> Result<FinCat> {
    let n = sizes.len();
    if n > caps.max_objects {
        return Err(Error::CapExceeded {
            what: "objects",
            limit: caps.max_objects,
            actual: n,
        });
    }
    let mut b = FinCatBuilder::new(name).with_caps(*caps);
    let objs: Vec<ObjId> = object_names.iter().map(|s| b.add_object(s.clone())).collect();
    let mut maps: Vec<Vec<usize>> = Vec::new();
    let mut lookup: HashMap<(usize, usize, Vec<usize>), MorId> = HashMap::new();
    let mut ends: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for d in functions(sizes[i], sizes[j]) {
                if !admits(i, j, &d) {
                    continue;
                }
                cap_check(maps.len() as u128 + 1, caps)?;
                let f = b.add_morphism(morphism_name(i, j, &d), objs[i], objs[j]);
                lookup.insert((i, j, d.clone()), f);
                maps.push(d);
                ends.push((i, j));
            }
        }
    }
    for i in 0..n {
        let id: Vec<usize> = (0..sizes[i]).collect();
        b.set_identity(objs[i], lookup[&(i, i, id)]);
    }
    for (fi, (i, j)) in ends.iter().copied().enumerate() {
        for (gi, (j2, l)) in ends.iter().copied().enumerate() {
            if j2 != j {
                continue;
            }
            let composite: Vec<usize> = maps[fi].iter().map(|&x| maps[gi][x]).collect();
            let h = lookup[&(i, l, composite)];
            b.set_compose(MorId(gi as u32), MorId(fi as u32), h);
        }
    }
    b.build()
}

/// Objects `0..=n` (cardinalities) and all functions between them.
/// Morphism `f{m}_{k}_{d}` sends `i` to the `i`-th digit of `d`.
pub fn gen_finset_skeleton(n: usize) -> Result<FinCat> {
    gen_finset_skeleton_with_caps(n, &Caps::default())
}

pub fn gen_finset_skeleton_with_caps(n: usize, caps: &Caps) -> Result<FinCat> {
    let sizes: Vec<usize> = (0..=n).collect();
    let names: Vec<String> = sizes.iter().map(usize::to_string).collect();
    concrete_category(
        &format!("finset_skeleton_{n}"),
        &names,
        &sizes,
        |m, k, d| format!("f{m}_{k}_{}", join_digits(d)),
        |_, _, _| true,
        caps,
    )
}

/// `(m, k, digits)` for a morphism of [`gen_finset_skeleton`].
pub fn decode_skeleton_morphism(c: &FinCat, f: MorId) -> Option<(usize, usize, Vec<usize>)> {
    let rest = c.morphism_name(f).strip_prefix('f')?;
    let mut parts = rest.splitn(3, '_');
    let m = parts.next()?.parse().ok()?;
    let k = parts.next()?.parse().ok()?;
    let d = split_digits(parts.next()?)?;
    (d.len() == m && d.iter().all(|&x| x < k)).then_some((m, k, d))
}

/// The chosen sets `{}`, `{0}`, `{0,1}`, `{5}`, `{3,7}`.
pub fn standard_sets() -> Vec<Vec<u32>> {
    vec![vec![], vec![0], vec![0, 1], vec![5], vec![3, 7]]
}

fn set_name(s: &[u32]) -> String {
    format!("set_{}", s.iter().map(u32::to_string).collect::<Vec<_>>().join("."))
}

/// The full subcategory of finite sets on the given (sorted, distinct) sets.
/// Morphism `m{i}_{j}_{d}` sends the `p`-th element of set `i` to the
/// `d_p`-th element of set `j`.
pub fn gen_finset_full(sets: &[Vec<u32>]) -> Result<FinCat> {
    for s in sets {
        if s.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::MalformedTable(vec![format!(
                "set {s:?} is not sorted and duplicate-free"
            )]));
        }
    }
    let sizes: Vec<usize> = sets.iter().map(Vec::len).collect();
    let names: Vec<String> = sets.iter().map(|s| set_name(s)).collect();
    concrete_category(
        "finset_full",
        &names,
        &sizes,
        |i, j, d| format!("m{i}_{j}_{}", join_digits(d)),
        |_, _, _| true,
        &Caps::default(),
    )
}

/// The inclusion of `gen_finset_skeleton(n)` into `gen_finset_full(sets)`,
/// sending `k` to the set `{0, …, k-1}` (which must be among `sets`).
pub fn skeleton_inclusion(n: usize, sets: &[Vec<u32>]) -> Result<FinFunctor> {
    let skel = Arc::new(gen_finset_skeleton(n)?);
    let full = Arc::new(gen_finset_full(sets)?);
    let object_map: Vec<ObjId> = (0..=n)
        .map(|k| {
            let want: Vec<u32> = (0..k as u32).collect();
            sets.iter()
                .position(|s| *s == want)
                .map(|i| ObjId(i as u32))
                .ok_or_else(|| Error::PreconditionFailed(format!("no set of the form 0..{k}")))
        })
        .collect::<Result<_>>()?;
    let by_name: HashMap<&str, MorId> = full.morphisms().map(|f| (full.morphism_name(f), f)).collect();
    let morphism_map = skel
        .morphisms()
        .map(|f| {
            let (m, k, d) = decode_skeleton_morphism(&skel, f).expect("skeleton names decode");
            let name = format!("m{}_{}_{}", object_map[m].0, object_map[k].0, join_digits(&d));
            by_name[name.as_str()]
        })
        .collect();
    FinFunctor::new("skeleton_inclusion", skel, full, object_map, morphism_map)
}

/// A finite topological space: point count and open sets as point bitmasks,
/// ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinSpace {
    pub points: usize,
    pub opens: Vec<u32>,
}

impl FinSpace {
    fn from_family(points: usize, family: u32) -> Self {
        let opens = (0..1u32 << points).filter(|&u| family >> u & 1 == 1).collect();
        FinSpace { points, opens }
    }

    pub fn is_open(&self, u: u32) -> bool {
        self.opens.binary_search(&u).is_ok()
    }
}

fn preimage(map: &[usize], u: u32) -> u32 {
    map.iter()
        .enumerate()
        .filter(|&(_, &y)| u >> y & 1 == 1)
        .fold(0, |acc, (x, _)| acc | 1 << x)
}

pub fn is_continuous_map(src: &FinSpace, dst: &FinSpace, map: &[usize]) -> bool {
    dst.opens.iter().all(|&u| src.is_open(preimage(map, u)))
}

/// Open sets of the final topology on `points` induced by `map` from `src`.
pub fn final_topology(src: &FinSpace, points: usize, map: &[usize]) -> Vec<u32> {
    (0..1u32 << points)
        .filter(|&u| src.is_open(preimage(map, u)))
        .collect()
}

/// Every topology on `0..points`, as families of open sets (bitmask over
/// subsets), ascending.
pub fn topologies(points: usize) -> Vec<u32> {
    let subsets = 1u32 << points;
    let full = subsets - 1;
    let mut out = Vec::new();
    // families always contain the empty set and the whole set
    let free: Vec<u32> = (1..full).collect();
    for mask in 0u64..(1u64 << free.len()) {
        let mut family: u32 = 1 | 1 << full;
        for (i, &u) in free.iter().enumerate() {
            if mask >> i & 1 == 1 {
                family |= 1 << u;
            }
        }
        let opens: Vec<u32> = (0..subsets).filter(|&u| family >> u & 1 == 1).collect();
        let closed = opens.iter().all(|&a| {
            opens
                .iter()
                .all(|&b| family >> (a | b) & 1 == 1 && family >> (a & b) & 1 == 1)
        });
        if closed {
            out.push(family);
        }
    }
    out.sort_unstable();
    out
}

/// All topologies on sets of size at most `n`, ordered by size then by open
/// family; morphisms are the continuous maps. Object `t{s}_{family}`,
/// morphism `c{i}_{j}_{d}` with `d` the images of the points.
pub fn gen_fintop(n: usize) -> Result<FinCat> {
    gen_fintop_with_caps(n, &Caps::default())
}

pub fn gen_fintop_with_caps(n: usize, caps: &Caps) -> Result<FinCat> {
    let mut spaces = Vec::new();
    let mut names = Vec::new();
    for s in 0..=n {
        for family in topologies(s) {
            names.push(format!("t{s}_{family}"));
            spaces.push(FinSpace::from_family(s, family));
        }
    }
    let sizes: Vec<usize> = spaces.iter().map(|s| s.points).collect();
    concrete_category(
        &format!("fintop_{n}"),
        &names,
        &sizes,
        |i, j, d| format!("c{i}_{j}_{}", join_digits(d)),
        |i, j, d| is_continuous_map(&spaces[i], &spaces[j], d),
        caps,
    )
}

pub fn decode_fintop_object(c: &FinCat, x: ObjId) -> Option<FinSpace> {
    let rest = c.object_name(x).strip_prefix('t')?;
    let (s, family) = rest.split_once('_')?;
    let points: usize = s.parse().ok()?;
    if points > 5 {
        return None;
    }
    Some(FinSpace::from_family(points, family.parse().ok()?))
}

pub fn decode_fintop_morphism(c: &FinCat, f: MorId) -> Option<Vec<usize>> {
    let rest = c.morphism_name(f).strip_prefix('c')?;
    let mut parts = rest.splitn(3, '_');
    parts.next()?;
    parts.next()?;
    split_digits(parts.next()?)
}

/// The thin category of a partial order given by `leq[i][j] ⟺ i ≤ j`.
pub fn gen_poset(name: &str, leq: &[Vec<bool>]) -> Result<FinCat> {
    let n = leq.len();
    let mut problems = Vec::new();
    if leq.iter().any(|row| row.len() != n) {
        return Err(Error::MalformedTable(vec!["relation table is not square".into()]));
    }
    for i in 0..n {
        if !leq[i][i] {
            problems.push(format!("not reflexive at {i}"));
        }
        for j in 0..n {
            if i != j && leq[i][j] && leq[j][i] {
                problems.push(format!("not antisymmetric at {i} {j}"));
            }
            for k in 0..n {
                if leq[i][j] && leq[j][k] && !leq[i][k] {
                    problems.push(format!("not transitive at {i} {j} {k}"));
                }
            }
        }
    }
    if !problems.is_empty() {
        return Err(Error::MalformedTable(problems));
    }
    let mut b = FinCatBuilder::new(name);
    let objs: Vec<ObjId> = (0..n).map(|i| b.add_object(format!("p{i}"))).collect();
    let mut arrow = HashMap::new();
    for i in 0..n {
        for j in 0..n {
            if leq[i][j] {
                arrow.insert((i, j), b.add_morphism(format!("p{i}_{j}"), objs[i], objs[j]));
            }
        }
    }
    for i in 0..n {
        b.set_identity(objs[i], arrow[&(i, i)]);
    }
    for (&(i, j), &f) in &arrow {
        for k in 0..n {
            if let Some(&g) = arrow.get(&(j, k)) {
                b.set_compose(g, f, arrow[&(i, k)]);
            }
        }
    }
    b.build()
}

/// The one-object category of a monoid with `compose(g, f) = table[g][f]`.
pub fn gen_monoid(name: &str, table: &[Vec<usize>]) -> Result<FinCat> {
    let n = table.len();
    if n == 0 || table.iter().any(|row| row.len() != n || row.iter().any(|&v| v >= n)) {
        return Err(Error::MalformedTable(vec!["multiplication table is malformed".into()]));
    }
    let unit = (0..n)
        .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
        .ok_or_else(|| Error::MalformedTable(vec!["no unit element".into()]))?;
    let mut b = FinCatBuilder::new(name);
    let o = b.add_object("o");
    let ms: Vec<MorId> = (0..n).map(|i| b.add_morphism(format!("m{i}"), o, o)).collect();
    b.set_identity(o, ms[unit]);
    for g in 0..n {
        for f in 0..n {
            b.set_compose(ms[g], ms[f], ms[table[g][f]]);
        }
    }
    b.build()
}

/// `a → b` with its two identities.
pub fn walking_arrow() -> FinCat {
    let mut b = FinCatBuilder::new("walking_arrow");
    let a = b.add_object("a");
    let bb = b.add_object("b");
    let ia = b.add_morphism("id_a", a, a);
    let ib = b.add_morphism("id_b", bb, bb);
    let f = b.add_morphism("f", a, bb);
    b.set_identity(a, ia);
    b.set_identity(bb, ib);
    let _ = f;
    b.build().expect("walking arrow is a category")
}

pub fn random_poset<R: Rng>(rng: &mut R, n: usize, name: &str) -> FinCat {
    let mut leq = vec![vec![false; n]; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for i in 0..n {
        leq[i][i] = true;
        for j in i + 1..n {
            if rng.gen_bool(0.4) {
                leq[order[i]][order[j]] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if leq[i][k] && leq[k][j] {
                    leq[i][j] = true;
                }
            }
        }
    }
    gen_poset(name, &leq).expect("transitive closure of a random order is a partial order")
}

/// The monoid of self-maps of `0..points` generated by `generators` random maps.
pub fn random_transformation_monoid<R: Rng>(
    rng: &mut R,
    points: usize,
    generators: usize,
    name: &str,
) -> FinCat {
    let id: Vec<usize> = (0..points).collect();
    let gens: Vec<Vec<usize>> = (0..generators)
        .map(|_| (0..points).map(|_| rng.gen_range(0..points)).collect())
        .collect();
    let mut elements = vec![id];
    let mut i = 0;
    while i < elements.len() {
        for g in &gens {
            let next: Vec<usize> = elements[i].iter().map(|&x| g[x]).collect();
            if !elements.contains(&next) {
                elements.push(next);
            }
        }
        i += 1;
    }
    elements.sort();
    let index: HashMap<&Vec<usize>, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let table: Vec<Vec<usize>> = elements
        .iter()
        .map(|g| {
            elements
                .iter()
                .map(|f| index[&f.iter().map(|&x| g[x]).collect::<Vec<_>>()])
                .collect()
        })
        .collect();
    gen_monoid(name, &table).expect("transformation monoids are monoids")
}

/// The fixed test corpus: small skeletons and spaces, the walking arrow,
/// and seeded random posets and monoids.
pub fn corpus() -> Vec<Arc<FinCat>> {
    let mut out: Vec<Arc<FinCat>> = Vec::new();
    for n in 0..=2 {
        out.push(Arc::new(gen_finset_skeleton(n).expect("small skeleton")));
    }
    for n in 0..=2 {
        out.push(Arc::new(gen_fintop(n).expect("small fintop")));
    }
    out.push(Arc::new(walking_arrow()));
    let mut rng = ChaCha8Rng::seed_from_u64(0x517e_ca1c);
    for i in 0..12 {
        let n = 2 + i % 4;
        out.push(Arc::new(random_poset(&mut rng, n, &format!("poset_{i}"))));
    }
    for i in 0..10 {
        let points = 2 + i % 2;
        let gens = 1 + i % 2;
        out.push(Arc::new(random_transformation_monoid(
            &mut rng,
            points,
            gens,
            &format!("monoid_{i}"),
        )));
    }
    out
}

/// Named builtins: `skeleton:N`, `fintop:N`, `finset-full`, `walking-arrow`,
/// `chain:N`, `cyclic:N`.
pub fn builtin(spec: &str) -> Result<FinCat> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let num = || -> Result<usize> {
        arg.parse()
            .map_err(|_| Error::PreconditionFailed(format!("builtin {kind} needs a size, got {arg:?}")))
    };
    match kind {
        "skeleton" => gen_finset_skeleton(num()?),
        "fintop" => gen_fintop(num()?),
        "finset-full" => gen_finset_full(&standard_sets()),
        "walking-arrow" => Ok(walking_arrow()),
        "chain" => {
            let n = num()?;
            let leq: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect();
            gen_poset(&format!("chain_{n}"), &leq)
        }
        "cyclic" => {
            let n = num()?;
            if n == 0 {
                return Err(Error::PreconditionFailed("cyclic group of order 0".into()));
            }
            let table: Vec<Vec<usize>> = (0..n).map(|g| (0..n).map(|f| (g + f) % n).collect()).collect();
            gen_monoid(&format!("cyclic_{n}"), &table)
        }
        _ => Err(Error::PreconditionFailed(format!("unknown builtin {spec:?}"))),
    }
}
