//! Functors between finite categories.

use std::sync::Arc;

use crate::category::{FinCat, FinCatBuilder, MorId, ObjId};
use crate::error::{Error, Result};
use crate::report::{Law, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinFunctor {
    pub name: String,
    pub source: Arc<FinCat>,
    pub target: Arc<FinCat>,
    pub object_map: Vec<ObjId>,
    pub morphism_map: Vec<MorId>,
}

impl FinFunctor {
    /// Checks table sizes and id ranges; functoriality is left to
    /// [`validate_functor`].
    pub fn new(
        name: impl Into<String>,
        source: Arc<FinCat>,
        target: Arc<FinCat>,
        object_map: Vec<ObjId>,
        morphism_map: Vec<MorId>,
    ) -> Result<Self> {
        let mut problems = Vec::new();
        if object_map.len() != source.object_count() {
            problems.push(format!(
                "object map has {} entries, source has {} objects",
                object_map.len(),
                source.object_count()
            ));
        }
        if morphism_map.len() != source.morphism_count() {
            problems.push(format!(
                "morphism map has {} entries, source has {} morphisms",
                morphism_map.len(),
                source.morphism_count()
            ));
        }
        if object_map.iter().any(|x| x.index() >= target.object_count())
            || morphism_map
                .iter()
                .any(|f| f.index() >= target.morphism_count())
        {
            problems.push("functor maps outside the target".to_string());
        }
        if !problems.is_empty() {
            return Err(Error::MalformedTable(problems));
        }
        Ok(FinFunctor {
            name: name.into(),
            source,
            target,
            object_map,
            morphism_map,
        })
    }

    pub fn identity(c: Arc<FinCat>) -> Self {
        FinFunctor {
            name: format!("id_{}", c.name()),
            object_map: c.objects().collect(),
            morphism_map: c.morphisms().collect(),
            source: c.clone(),
            target: c,
        }
    }

    /// Sends every object to `x` and every morphism to `id_x`.
    pub fn constant(source: Arc<FinCat>, target: Arc<FinCat>, x: ObjId) -> Self {
        let id = target.identity(x);
        FinFunctor {
            name: format!("const_{}", target.object_name(x)),
            object_map: vec![x; source.object_count()],
            morphism_map: vec![id; source.morphism_count()],
            source,
            target,
        }
    }

    #[inline]
    pub fn obj(&self, x: ObjId) -> ObjId {
        self.object_map[x.index()]
    }

    #[inline]
    pub fn mor(&self, f: MorId) -> MorId {
        self.morphism_map[f.index()]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &FinFunctor) -> Result<FinFunctor> {
        if *self.target != *other.source {
            return Err(Error::TypeMismatch(format!(
                "cannot compose {} with {}: target and source differ",
                self.name, other.name
            )));
        }
        Ok(FinFunctor {
            name: format!("{}.{}", other.name, self.name),
            source: self.source.clone(),
            target: other.target.clone(),
            object_map: self.object_map.iter().map(|&x| other.obj(x)).collect(),
            morphism_map: self.morphism_map.iter().map(|&f| other.mor(f)).collect(),
        })
    }
}

pub fn validate_functor(functor: &FinFunctor) -> ValidationReport {
    let (s, t) = (&*functor.source, &*functor.target);
    let mut report = ValidationReport::default();
    for f in s.morphisms() {
        let g = functor.mor(f);
        if t.dom(g) != functor.obj(s.dom(f)) || t.cod(g) != functor.obj(s.cod(f)) {
            report.push(Law::FunctorTyping, vec![f]);
        }
    }
    for x in s.objects() {
        if functor.mor(s.identity(x)) != t.identity(functor.obj(x)) {
            report.push(Law::FunctorIdentity, vec![s.identity(x)]);
        }
    }
    for g in s.morphisms() {
        for &f in s.incoming(s.dom(g)) {
            let lhs = functor.mor(s.compose(g, f));
            let rhs = t.try_compose(functor.mor(g), functor.mor(f));
            if rhs != Some(lhs) {
                report.push(Law::FunctorComposition, vec![g, f]);
            }
        }
    }
    report
}

/// Bijective on every hom-set.
pub fn is_fully_faithful(functor: &FinFunctor) -> bool {
    let (s, t) = (&*functor.source, &*functor.target);
    for x in s.objects() {
        for y in s.objects() {
            let src = s.hom(x, y);
            let tgt = t.hom(functor.obj(x), functor.obj(y));
            if src.len() != tgt.len() {
                return false;
            }
            let mut image: Vec<MorId> = src.iter().map(|&f| functor.mor(f)).collect();
            image.sort_unstable();
            image.dedup();
            if image.len() != src.len() {
                return false;
            }
        }
    }
    true
}

/// The full subcategory on `objects` (in the given order) with its inclusion.
pub fn full_subcategory(
    c: &Arc<FinCat>,
    name: impl Into<String>,
    objects: &[ObjId],
) -> Result<(Arc<FinCat>, FinFunctor)> {
    let mut b = FinCatBuilder::new(name);
    let mut new_obj = vec![None; c.object_count()];
    for &x in objects {
        if x.index() >= c.object_count() {
            return Err(Error::NoSuchObject(x));
        }
        new_obj[x.index()] = Some(b.add_object(c.object_name(x)));
    }
    let mut new_mor = vec![None; c.morphism_count()];
    let mut morphism_map = Vec::new();
    for f in c.morphisms() {
        if let (Some(d), Some(e)) = (new_obj[c.dom(f).index()], new_obj[c.cod(f).index()]) {
            new_mor[f.index()] = Some(b.add_morphism(c.morphism_name(f), d, e));
            morphism_map.push(f);
        }
    }
    for &x in objects {
        b.set_identity(new_obj[x.index()].unwrap(), new_mor[c.identity(x).index()].unwrap());
    }
    for &g in &morphism_map {
        for &f in c.incoming(c.dom(g)) {
            if let Some(nf) = new_mor[f.index()] {
                let h = new_mor[c.compose(g, f).index()].unwrap();
                b.set_compose(new_mor[g.index()].unwrap(), nf, h);
            }
        }
    }
    let sub = Arc::new(b.build()?);
    let inclusion = FinFunctor::new(
        format!("incl_{}", sub.name()),
        sub.clone(),
        c.clone(),
        objects.to_vec(),
        morphism_map,
    )?;
    Ok((sub, inclusion))
}
