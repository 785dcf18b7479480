//! Finite categories as explicit composition tables.
//!
//! Morphisms live in one global id space; hom-sets are derived views. The
//! composition table is stored densely per morphism `g` over the morphisms
//! into `dom(g)`, so `compose(g, f)` is two array lookups.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::report::{Law, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MorId(pub u32);

impl ObjId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl MorId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ObjId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for MorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Size limits. Sieve enumeration is exponential in the number of
/// non-identity morphisms into an object, hence `max_sieve_morphisms`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub max_objects: usize,
    pub max_morphisms: usize,
    pub max_sieve_morphisms: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_objects: 64,
            max_morphisms: 4096,
            max_sieve_morphisms: 16,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct FinCat {
    name: String,
    object_names: Vec<String>,
    morphism_names: Vec<String>,
    dom: Vec<ObjId>,
    cod: Vec<ObjId>,
    identity: Vec<MorId>,
    into: Vec<Vec<MorId>>,
    out_of: Vec<Vec<MorId>>,
    hom: Vec<Vec<MorId>>,
    pos_in_into: Vec<u32>,
    row_start: Vec<usize>,
    table: Vec<MorId>,
}

impl fmt::Debug for FinCat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinCat")
            .field("name", &self.name)
            .field("objects", &self.object_count())
            .field("morphisms", &self.morphism_count())
            .finish()
    }
}

impl FinCat {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn object_count(&self) -> usize {
        self.object_names.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.dom.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> + Clone {
        (0..self.object_count() as u32).map(ObjId)
    }

    pub fn morphisms(&self) -> impl Iterator<Item = MorId> + Clone {
        (0..self.morphism_count() as u32).map(MorId)
    }

    pub fn object_name(&self, x: ObjId) -> &str {
        &self.object_names[x.index()]
    }

    pub fn morphism_name(&self, f: MorId) -> &str {
        &self.morphism_names[f.index()]
    }

    pub fn object_by_name(&self, name: &str) -> Option<ObjId> {
        self.object_names
            .iter()
            .position(|n| n == name)
            .map(|i| ObjId(i as u32))
    }

    pub fn morphism_by_name(&self, name: &str) -> Option<MorId> {
        self.morphism_names
            .iter()
            .position(|n| n == name)
            .map(|i| MorId(i as u32))
    }

    #[inline]
    pub fn dom(&self, f: MorId) -> ObjId {
        self.dom[f.index()]
    }

    #[inline]
    pub fn cod(&self, f: MorId) -> ObjId {
        self.cod[f.index()]
    }

    #[inline]
    pub fn identity(&self, x: ObjId) -> MorId {
        self.identity[x.index()]
    }

    pub fn is_identity(&self, f: MorId) -> bool {
        self.identity[self.dom(f).index()] == f
    }

    /// Morphisms with codomain `x`, ascending.
    #[inline]
    pub fn incoming(&self, x: ObjId) -> &[MorId] {
        &self.into[x.index()]
    }

    /// Morphisms with domain `x`, ascending.
    #[inline]
    pub fn out_of(&self, x: ObjId) -> &[MorId] {
        &self.out_of[x.index()]
    }

    /// `Hom(x, y)`, ascending.
    #[inline]
    pub fn hom(&self, x: ObjId, y: ObjId) -> &[MorId] {
        &self.hom[x.index() * self.object_count() + y.index()]
    }

    /// Position of `f` within `into(cod f)`.
    #[inline]
    pub fn local_index(&self, f: MorId) -> usize {
        self.pos_in_into[f.index()] as usize
    }

    /// `g ∘ f`. Panics if `cod f != dom g`.
    #[inline]
    pub fn compose(&self, g: MorId, f: MorId) -> MorId {
        debug_assert_eq!(self.cod(f), self.dom(g), "compose on non-composable pair");
        self.table[self.row_start[g.index()] + self.pos_in_into[f.index()] as usize]
    }

    pub fn try_compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        (self.cod(f) == self.dom(g)).then(|| self.compose(g, f))
    }

    pub fn sum_into_sizes(&self) -> usize {
        self.into.iter().map(Vec::len).sum()
    }

    /// Some `g` with `g ∘ f = id` and `f ∘ g = id`.
    pub fn inverse(&self, f: MorId) -> Option<MorId> {
        let (x, y) = (self.dom(f), self.cod(f));
        self.hom(y, x).iter().copied().find(|&g| {
            self.compose(g, f) == self.identity(x) && self.compose(f, g) == self.identity(y)
        })
    }

    pub fn is_iso(&self, f: MorId) -> bool {
        self.inverse(f).is_some()
    }

    pub fn is_mono(&self, f: MorId) -> bool {
        let x = self.dom(f);
        self.objects().all(|w| {
            let hs = self.hom(w, x);
            let mut seen = std::collections::HashSet::with_capacity(hs.len());
            hs.iter().all(|&h| seen.insert(self.compose(f, h)))
        })
    }

    /// Does `f` factor as `h ∘ k` for some `k`?
    pub fn factors_through(&self, f: MorId, h: MorId) -> bool {
        self.cod(f) == self.cod(h)
            && self
                .hom(self.dom(f), self.dom(h))
                .iter()
                .any(|&k| self.compose(h, k) == f)
    }
}

/// Incremental construction of a [`FinCat`].
///
/// Missing identities are created as `id_<object>`; compositions involving an
/// identity may be omitted and are filled in by [`FinCatBuilder::build`].
#[derive(Debug, Clone, Default)]
pub struct FinCatBuilder {
    name: String,
    objects: Vec<String>,
    morphisms: Vec<(String, ObjId, ObjId)>,
    identities: Vec<Option<MorId>>,
    compositions: HashMap<(MorId, MorId), MorId>,
    duplicates: Vec<String>,
    caps: Caps,
}

impl FinCatBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        FinCatBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn with_caps(mut self, caps: Caps) -> Self {
        self.caps = caps;
        self
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn add_object(&mut self, name: impl Into<String>) -> ObjId {
        self.objects.push(name.into());
        self.identities.push(None);
        ObjId(self.objects.len() as u32 - 1)
    }

    pub fn add_morphism(&mut self, name: impl Into<String>, dom: ObjId, cod: ObjId) -> MorId {
        self.morphisms.push((name.into(), dom, cod));
        MorId(self.morphisms.len() as u32 - 1)
    }

    pub fn set_identity(&mut self, x: ObjId, f: MorId) {
        if let Some(slot) = self.identities.get_mut(x.index()) {
            *slot = Some(f);
        } else {
            self.duplicates
                .push(format!("identity for unknown object {x}"));
        }
    }

    pub fn identity_of(&self, x: ObjId) -> Option<MorId> {
        self.identities.get(x.index()).copied().flatten()
    }

    /// Record `g ∘ f = h`. Returns false when an entry for `(g, f)` already exists.
    pub fn set_compose(&mut self, g: MorId, f: MorId, h: MorId) -> bool {
        if self.compositions.insert((g, f), h).is_some() {
            self.duplicates
                .push(format!("duplicate composition entry ({g}, {f})"));
            false
        } else {
            true
        }
    }

    pub fn dom_cod(&self, f: MorId) -> Option<(ObjId, ObjId)> {
        self.morphisms.get(f.index()).map(|&(_, d, c)| (d, c))
    }

    /// Builds and runs [`validate_category`]; axiom failures become
    /// [`Error::AxiomViolation`].
    pub fn build(self) -> Result<FinCat> {
        let c = self.build_unchecked()?;
        validate_category(&c).into_result()?;
        Ok(c)
    }

    /// Builds the table after structural checks only (ranges, completeness).
    pub fn build_unchecked(mut self) -> Result<FinCat> {
        let n = self.objects.len();
        if n > self.caps.max_objects {
            return Err(Error::CapExceeded {
                what: "object count",
                limit: self.caps.max_objects,
                actual: n,
            });
        }
        let mut problems = std::mem::take(&mut self.duplicates);
        for (name, d, c) in &self.morphisms {
            if d.index() >= n || c.index() >= n {
                problems.push(format!("morphism {name} references an unknown object"));
            }
        }
        if !problems.is_empty() {
            return Err(Error::MalformedTable(problems));
        }
        for x in 0..n {
            if self.identities[x].is_none() {
                let name = format!("id_{}", self.objects[x]);
                let id = self.add_morphism(name, ObjId(x as u32), ObjId(x as u32));
                self.identities[x] = Some(id);
            }
        }
        let m = self.morphisms.len();
        if m > self.caps.max_morphisms {
            return Err(Error::CapExceeded {
                what: "morphism count",
                limit: self.caps.max_morphisms,
                actual: m,
            });
        }
        let identity: Vec<MorId> = self.identities.iter().map(|i| i.unwrap()).collect();
        for &id in &identity {
            if id.index() >= m {
                problems.push(format!("identity {id} out of range"));
            }
        }
        for (&(g, f), &h) in &self.compositions {
            if g.index() >= m || f.index() >= m || h.index() >= m {
                problems.push(format!("composition ({g}, {f}) = {h} out of range"));
            } else if self.morphisms[f.index()].2 != self.morphisms[g.index()].1 {
                problems.push(format!(
                    "composition entry for non-composable pair ({}, {})",
                    self.morphisms[g.index()].0,
                    self.morphisms[f.index()].0
                ));
            }
        }
        if !problems.is_empty() {
            problems.sort();
            return Err(Error::MalformedTable(problems));
        }

        let dom: Vec<ObjId> = self.morphisms.iter().map(|m| m.1).collect();
        let cod: Vec<ObjId> = self.morphisms.iter().map(|m| m.2).collect();
        let mut into = vec![Vec::new(); n];
        let mut out_of = vec![Vec::new(); n];
        let mut hom = vec![Vec::new(); n * n];
        let mut pos_in_into = vec![0u32; m];
        for i in 0..m {
            let f = MorId(i as u32);
            pos_in_into[i] = into[cod[i].index()].len() as u32;
            into[cod[i].index()].push(f);
            out_of[dom[i].index()].push(f);
            hom[dom[i].index() * n + cod[i].index()].push(f);
        }
        let mut row_start = Vec::with_capacity(m);
        let mut table = Vec::new();
        let mut missing = Vec::new();
        for gi in 0..m {
            let g = MorId(gi as u32);
            row_start.push(table.len());
            for &f in &into[dom[gi].index()] {
                let h = match self.compositions.get(&(g, f)) {
                    Some(&h) => h,
                    None if identity[dom[gi].index()] == f => g,
                    None if identity[cod[f.index()].index()] == g => f,
                    None => {
                        missing.push(format!(
                            "missing composition ({}, {})",
                            self.morphisms[gi].0,
                            self.morphisms[f.index()].0
                        ));
                        MorId(u32::MAX)
                    }
                };
                table.push(h);
            }
        }
        if !missing.is_empty() {
            return Err(Error::MalformedTable(missing));
        }
        Ok(FinCat {
            name: self.name,
            object_names: self.objects,
            morphism_names: self.morphisms.into_iter().map(|m| m.0).collect(),
            dom,
            cod,
            identity,
            into,
            out_of,
            hom,
            pos_in_into,
            row_start,
            table,
        })
    }
}

/// Every violated category axiom instance. Typing failures are reported
/// first; associativity is only checked where the composites are typed.
pub fn validate_category(c: &FinCat) -> ValidationReport {
    let mut report = ValidationReport::default();
    for x in c.objects() {
        let id = c.identity(x);
        if c.dom(id) != x || c.cod(id) != x {
            report.push(Law::IdentityTyping, vec![id]);
        }
    }
    let mut well_typed = true;
    for g in c.morphisms() {
        for &f in c.incoming(c.dom(g)) {
            let h = c.compose(g, f);
            if c.dom(h) != c.dom(f) || c.cod(h) != c.cod(g) {
                report.push(Law::CompositeTyping, vec![g, f, h]);
                well_typed = false;
            }
        }
    }
    for f in c.morphisms() {
        let (x, y) = (c.dom(f), c.cod(f));
        let idy = c.identity(y);
        let idx = c.identity(x);
        if c.dom(idy) == y && c.compose(idy, f) != f {
            report.push(Law::LeftIdentity, vec![idy, f]);
        }
        if c.cod(idx) == x && c.compose(f, idx) != f {
            report.push(Law::RightIdentity, vec![f, idx]);
        }
    }
    for h in c.morphisms() {
        for &g in c.incoming(c.dom(h)) {
            let hg = c.compose(h, g);
            for &f in c.incoming(c.dom(g)) {
                let gf = c.compose(g, f);
                let (Some(l), Some(r)) = (c.try_compose(h, gf), c.try_compose(hg, f)) else {
                    if well_typed {
                        report.push(Law::Associativity, vec![h, g, f]);
                    }
                    continue;
                };
                if l != r {
                    report.push(Law::Associativity, vec![h, g, f]);
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walking_arrow() -> FinCatBuilder {
        let mut b = FinCatBuilder::new("arrow");
        let a = b.add_object("a");
        let bb = b.add_object("b");
        let ida = b.add_morphism("id_a", a, a);
        let idb = b.add_morphism("id_b", bb, bb);
        b.add_morphism("f", a, bb);
        b.set_identity(a, ida);
        b.set_identity(bb, idb);
        b
    }

    #[test]
    fn walking_arrow_is_valid() {
        let c = walking_arrow().build().unwrap();
        assert_eq!(c.object_count(), 2);
        assert_eq!(c.morphism_count(), 3);
        assert_eq!(c.hom(ObjId(0), ObjId(1)), &[MorId(2)]);
        assert!(c.hom(ObjId(1), ObjId(0)).is_empty());
    }

    #[test]
    fn bad_identity_composite_is_reported() {
        let mut b = walking_arrow();
        b.set_compose(MorId(1), MorId(2), MorId(1));
        let c = b.build_unchecked().unwrap();
        let report = validate_category(&c);
        assert!(report.has(Law::CompositeTyping));
        assert!(report.has(Law::LeftIdentity));
        assert!(matches!(
            walking_arrow_with_bad_entry().build(),
            Err(Error::AxiomViolation(_))
        ));
    }

    fn walking_arrow_with_bad_entry() -> FinCatBuilder {
        let mut b = walking_arrow();
        b.set_compose(MorId(1), MorId(2), MorId(1));
        b
    }

    #[test]
    fn duplicate_and_out_of_range_entries_are_malformed() {
        let mut b = walking_arrow();
        b.set_compose(MorId(2), MorId(0), MorId(2));
        b.set_compose(MorId(2), MorId(0), MorId(2));
        assert!(matches!(b.build(), Err(Error::MalformedTable(_))));

        let mut b = walking_arrow();
        b.add_morphism("g", ObjId(0), ObjId(7));
        assert!(matches!(b.build(), Err(Error::MalformedTable(_))));

        let mut b = walking_arrow();
        b.set_compose(MorId(2), MorId(2), MorId(2));
        assert!(matches!(b.build(), Err(Error::MalformedTable(_))));
    }

    #[test]
    fn missing_composition_is_malformed() {
        let mut b = FinCatBuilder::new("loop");
        let x = b.add_object("x");
        b.add_morphism("e", x, x);
        assert!(matches!(b.build(), Err(Error::MalformedTable(_))));
    }

    #[test]
    fn caps_are_enforced() {
        let mut b = FinCatBuilder::new("big").with_caps(Caps {
            max_objects: 1,
            ..Caps::default()
        });
        b.add_object("x");
        b.add_object("y");
        assert!(matches!(b.build(), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn implied_identities_are_named() {
        let mut b = FinCatBuilder::new("pt");
        b.add_object("p");
        let c = b.build().unwrap();
        assert_eq!(c.morphism_name(c.identity(ObjId(0))), "id_p");
    }
}
