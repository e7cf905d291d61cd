//! Finite categories, strict functors, natural transformations and adjoint
//! equivalences. Every judgment here is decided by exhausting the finite data.
//!
//! Objects and morphisms carry opaque string identifiers. Internally they are
//! addressed by dense indices, and those indices follow the lexicographic
//! order of the identifiers, so every "first" choice made by a search is
//! reproducible.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bound::Budget;
use crate::validation::ValidationReport;
use crate::{Error, Result};

pub mod standard;

/// Unambiguous identifier for a tuple of identifiers.
pub fn tuple_id<S: AsRef<str>>(parts: &[S]) -> String {
    let v: Vec<&str> = parts.iter().map(|s| s.as_ref()).collect();
    serde_json::to_string(&v).expect("string slices serialize")
}

/// A finite category given by explicit tables.
#[derive(Clone)]
pub struct FinCategory {
    objects: Vec<String>,
    object_index: HashMap<String, usize>,
    morphisms: Vec<String>,
    morphism_index: HashMap<String, usize>,
    dom: Vec<usize>,
    cod: Vec<usize>,
    identity: Vec<Option<usize>>,
    incoming: Vec<Vec<usize>>,
    in_pos: Vec<usize>,
    comp: Vec<Vec<Option<usize>>>,
    hom: HashMap<(usize, usize), Vec<usize>>,
    inverse: Vec<Option<usize>>,
}

/// Raw description of a category, as read from a file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategorySpec {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismSpec>,
    /// object id -> identity morphism id
    pub identities: Vec<(String, String)>,
    /// (g, f, g∘f)
    pub compose: Vec<(String, String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismSpec {
    pub id: String,
    pub dom: String,
    pub cod: String,
}

/// Index permutations produced when a category is assembled: `objects[i]` is
/// the final index of the i-th object handed to [`FinCategory::assemble`].
#[derive(Debug, Clone)]
pub struct Assembled {
    pub category: Arc<FinCategory>,
    pub objects: Vec<usize>,
    pub morphisms: Vec<usize>,
}

impl FinCategory {
    /// Builds a category from index-addressed data. Objects and morphisms are
    /// re-sorted by identifier; the returned permutations translate the
    /// caller's indices into the final ones.
    pub fn assemble<F>(
        objects: Vec<String>,
        morphisms: Vec<(String, usize, usize)>,
        identity: Vec<Option<usize>>,
        mut compose: F,
    ) -> Result<Assembled>
    where
        F: FnMut(usize, usize) -> Option<usize>,
    {
        let n_obj = objects.len();
        let n_mor = morphisms.len();
        if identity.len() != n_obj {
            return Err(Error::shape("identity table length differs from object count"));
        }
        let mut obj_order: Vec<usize> = (0..n_obj).collect();
        obj_order.sort_by(|&a, &b| objects[a].cmp(&objects[b]));
        let mut obj_perm = vec![0; n_obj];
        for (new, &old) in obj_order.iter().enumerate() {
            obj_perm[old] = new;
        }
        let mut mor_order: Vec<usize> = (0..n_mor).collect();
        mor_order.sort_by(|&a, &b| morphisms[a].0.cmp(&morphisms[b].0));
        let mut mor_perm = vec![0; n_mor];
        for (new, &old) in mor_order.iter().enumerate() {
            mor_perm[old] = new;
        }

        let sorted_objects: Vec<String> = obj_order.iter().map(|&o| objects[o].clone()).collect();
        let mut object_index = HashMap::with_capacity(n_obj);
        for (i, id) in sorted_objects.iter().enumerate() {
            if object_index.insert(id.clone(), i).is_some() {
                return Err(Error::Parse {
                    location: format!("object {id}"),
                    message: "duplicate object identifier".into(),
                });
            }
        }
        let mut sorted_morphisms = Vec::with_capacity(n_mor);
        let mut dom = Vec::with_capacity(n_mor);
        let mut cod = Vec::with_capacity(n_mor);
        let mut morphism_index = HashMap::with_capacity(n_mor);
        for (i, &old) in mor_order.iter().enumerate() {
            let (id, d, c) = &morphisms[old];
            if *d >= n_obj || *c >= n_obj {
                return Err(Error::Parse {
                    location: format!("morphism {id}"),
                    message: "dangling object reference".into(),
                });
            }
            if morphism_index.insert(id.clone(), i).is_some() {
                return Err(Error::Parse {
                    location: format!("morphism {id}"),
                    message: "duplicate morphism identifier".into(),
                });
            }
            sorted_morphisms.push(id.clone());
            dom.push(obj_perm[*d]);
            cod.push(obj_perm[*c]);
        }
        let mut new_identity = vec![None; n_obj];
        for (old, id) in identity.iter().enumerate() {
            if let Some(m) = id {
                if *m >= n_mor {
                    return Err(Error::shape("identity refers to a missing morphism"));
                }
                new_identity[obj_perm[old]] = Some(mor_perm[*m]);
            }
        }

        let mut incoming = vec![Vec::new(); n_obj];
        let mut in_pos = vec![0; n_mor];
        for m in 0..n_mor {
            in_pos[m] = incoming[cod[m]].len();
            incoming[cod[m]].push(m);
        }
        let mut comp = Vec::with_capacity(n_mor);
        for g in 0..n_mor {
            let ins = &incoming[dom[g]];
            let mut row = Vec::with_capacity(ins.len());
            for &f in ins {
                let r = compose(mor_order[g], mor_order[f]);
                match r {
                    Some(gf) if gf >= n_mor => return Err(Error::shape("composite refers to a missing morphism")),
                    Some(gf) => row.push(Some(mor_perm[gf])),
                    None => row.push(None),
                }
            }
            comp.push(row);
        }
        let mut hom: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for m in 0..n_mor {
            hom.entry((dom[m], cod[m])).or_default().push(m);
        }
        let mut cat = FinCategory {
            objects: sorted_objects,
            object_index,
            morphisms: sorted_morphisms,
            morphism_index,
            dom,
            cod,
            identity: new_identity,
            incoming,
            in_pos,
            comp,
            hom,
            inverse: vec![None; n_mor],
        };
        cat.compute_inverses();
        Ok(Assembled {
            category: Arc::new(cat),
            objects: obj_perm,
            morphisms: mor_perm,
        })
    }

    /// Builds a category from identifier tables without checking the axioms.
    /// Dangling references are reported as parse errors.
    pub fn from_spec_unchecked(spec: &CategorySpec) -> Result<Arc<FinCategory>> {
        let obj_idx: HashMap<&str, usize> = spec.objects.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
        let lookup_obj = |id: &str, ctx: &str| {
            obj_idx.get(id).copied().ok_or_else(|| Error::Parse {
                location: ctx.to_string(),
                message: format!("unknown object `{id}`"),
            })
        };
        let mut morphisms = Vec::with_capacity(spec.morphisms.len());
        for m in &spec.morphisms {
            let ctx = format!("morphism {}", m.id);
            morphisms.push((m.id.clone(), lookup_obj(&m.dom, &ctx)?, lookup_obj(&m.cod, &ctx)?));
        }
        let mor_idx: HashMap<&str, usize> = spec
            .morphisms
            .iter()
            .enumerate()
            .map(|(i, m)| (m.id.as_str(), i))
            .collect();
        let lookup_mor = |id: &str, ctx: &str| {
            mor_idx.get(id).copied().ok_or_else(|| Error::Parse {
                location: ctx.to_string(),
                message: format!("unknown morphism `{id}`"),
            })
        };
        let mut identity = vec![None; spec.objects.len()];
        for (o, m) in &spec.identities {
            let ctx = format!("identity of {o}");
            identity[lookup_obj(o, &ctx)?] = Some(lookup_mor(m, &ctx)?);
        }
        let mut table = HashMap::new();
        for (g, f, gf) in &spec.compose {
            let ctx = format!("composite {g}∘{f}");
            table.insert((lookup_mor(g, &ctx)?, lookup_mor(f, &ctx)?), lookup_mor(gf, &ctx)?);
        }
        let assembled = FinCategory::assemble(spec.objects.clone(), morphisms, identity, |g, f| {
            table.get(&(g, f)).copied()
        })?;
        Ok(assembled.category)
    }

    /// Builds and validates.
    pub fn from_spec(spec: &CategorySpec) -> Result<Arc<FinCategory>> {
        let c = Self::from_spec_unchecked(spec)?;
        validate_category(&c).into_result("category")?;
        Ok(c)
    }

    pub fn to_spec(&self) -> CategorySpec {
        let mut compose = Vec::new();
        for g in 0..self.num_morphisms() {
            for &f in &self.incoming[self.dom[g]] {
                if let Some(gf) = self.compose(g, f) {
                    compose.push((
                        self.morphisms[g].clone(),
                        self.morphisms[f].clone(),
                        self.morphisms[gf].clone(),
                    ));
                }
            }
        }
        CategorySpec {
            objects: self.objects.clone(),
            morphisms: (0..self.num_morphisms())
                .map(|m| MorphismSpec {
                    id: self.morphisms[m].clone(),
                    dom: self.objects[self.dom[m]].clone(),
                    cod: self.objects[self.cod[m]].clone(),
                })
                .collect(),
            identities: (0..self.num_objects())
                .filter_map(|o| self.identity[o].map(|m| (self.objects[o].clone(), self.morphisms[m].clone())))
                .collect(),
            compose,
        }
    }

    fn compute_inverses(&mut self) {
        for m in 0..self.morphisms.len() {
            let (a, b) = (self.dom[m], self.cod[m]);
            let (Some(ia), Some(ib)) = (self.identity[a], self.identity[b]) else {
                continue;
            };
            let found = self
                .hom(b, a)
                .iter()
                .copied()
                .find(|&n| self.compose(n, m) == Some(ia) && self.compose(m, n) == Some(ib));
            self.inverse[m] = found;
        }
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> std::ops::Range<usize> {
        0..self.objects.len()
    }

    pub fn morphisms(&self) -> std::ops::Range<usize> {
        0..self.morphisms.len()
    }

    pub fn object_id(&self, o: usize) -> &str {
        &self.objects[o]
    }

    pub fn morphism_id(&self, m: usize) -> &str {
        &self.morphisms[m]
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.object_index.get(id).copied()
    }

    pub fn morphism_index(&self, id: &str) -> Option<usize> {
        self.morphism_index.get(id).copied()
    }

    pub fn dom(&self, m: usize) -> usize {
        self.dom[m]
    }

    pub fn cod(&self, m: usize) -> usize {
        self.cod[m]
    }

    pub fn identity_opt(&self, o: usize) -> Option<usize> {
        self.identity[o]
    }

    /// Identity at `o`. Panics on a category missing identities; such
    /// categories only exist before validation.
    pub fn identity(&self, o: usize) -> usize {
        self.identity[o].expect("identity present in a validated category")
    }

    pub fn is_identity(&self, m: usize) -> bool {
        self.identity[self.dom[m]] == Some(m)
    }

    /// `g ∘ f`, when `cod(f) = dom(g)` and the table defines it.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        if self.cod[f] != self.dom[g] {
            return None;
        }
        self.comp[g][self.in_pos[f]]
    }

    /// `g ∘ f` on a validated category with composable arguments.
    pub fn comp(&self, g: usize, f: usize) -> usize {
        match self.compose(g, f) {
            Some(x) => x,
            None => panic!("composite {}∘{} undefined", self.morphisms[g], self.morphisms[f]),
        }
    }

    /// Composite of a path given in application order: `path[0]` first.
    pub fn comp_path(&self, path: &[usize]) -> usize {
        let mut acc = path[0];
        for &m in &path[1..] {
            acc = self.comp(m, acc);
        }
        acc
    }

    pub fn hom(&self, a: usize, b: usize) -> &[usize] {
        self.hom.get(&(a, b)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Morphisms with codomain `b`.
    pub fn incoming(&self, b: usize) -> &[usize] {
        &self.incoming[b]
    }

    /// Position of `m` within [`Self::incoming`] of its codomain.
    pub fn incoming_position(&self, m: usize) -> usize {
        self.in_pos[m]
    }

    /// Two-sided inverse of `m`, when it exists.
    pub fn inverse(&self, m: usize) -> Option<usize> {
        self.inverse[m]
    }

    pub fn inv(&self, m: usize) -> usize {
        self.inverse[m].unwrap_or_else(|| panic!("{} is not invertible", self.morphisms[m]))
    }

    pub fn is_iso(&self, m: usize) -> bool {
        self.inverse[m].is_some()
    }

    /// Isomorphisms `a → b`.
    pub fn isos(&self, a: usize, b: usize) -> impl Iterator<Item = usize> + '_ {
        self.hom(a, b).iter().copied().filter(|&m| self.is_iso(m))
    }

    pub fn isomorphic(&self, a: usize, b: usize) -> bool {
        self.isos(a, b).next().is_some()
    }
}

impl PartialEq for FinCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.dom == other.dom
            && self.cod == other.cod
            && self.identity == other.identity
            && self.comp == other.comp
    }
}

impl Eq for FinCategory {}

impl fmt::Debug for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FinCategory({} objects, {} morphisms)",
            self.objects.len(),
            self.morphisms.len()
        )
    }
}

pub(crate) fn same_category(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Checks the category axioms by exhaustion, naming each failure.
pub fn validate_category(c: &FinCategory) -> ValidationReport {
    let mut r = ValidationReport::new();
    for o in c.objects() {
        match c.identity_opt(o) {
            None => r.push("missing identity", [c.object_id(o)]),
            Some(i) => {
                if c.dom(i) != o || c.cod(i) != o {
                    r.push("identity has wrong type", [c.object_id(o), c.morphism_id(i)]);
                }
            }
        }
    }
    for g in c.morphisms() {
        for &f in c.incoming(c.dom(g)) {
            match c.compose(g, f) {
                None => r.push("missing composite", [c.morphism_id(g), c.morphism_id(f)]),
                Some(gf) => {
                    if c.dom(gf) != c.dom(f) || c.cod(gf) != c.cod(g) {
                        r.push(
                            "composite has wrong type",
                            [c.morphism_id(g), c.morphism_id(f), c.morphism_id(gf)],
                        );
                    }
                }
            }
        }
    }
    if !r.is_valid() {
        return r;
    }
    for m in c.morphisms() {
        let l = c.identity(c.cod(m));
        let rr = c.identity(c.dom(m));
        if c.compose(l, m) != Some(m) {
            r.push("left unit law", [c.morphism_id(m)]);
        }
        if c.compose(m, rr) != Some(m) {
            r.push("right unit law", [c.morphism_id(m)]);
        }
    }
    for h in c.morphisms() {
        for &g in c.incoming(c.dom(h)) {
            let hg = c.comp(h, g);
            for &f in c.incoming(c.dom(g)) {
                let lhs = c.comp(hg, f);
                let rhs = c.comp(h, c.comp(g, f));
                if lhs != rhs {
                    r.push("associativity", [c.morphism_id(h), c.morphism_id(g), c.morphism_id(f)]);
                }
            }
        }
    }
    r
}

/// The unique two-sided inverse of `m`, if any.
pub fn is_iso(c: &FinCategory, m: usize) -> Option<usize> {
    c.inverse(m)
}

/// A strict functor between finite categories.
#[derive(Clone)]
pub struct Functor {
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub obj_map: Vec<usize>,
    pub mor_map: Vec<usize>,
}

impl fmt::Debug for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Functor")
            .field("obj_map", &self.obj_map)
            .field("mor_map", &self.mor_map)
            .finish()
    }
}

impl PartialEq for Functor {
    fn eq(&self, other: &Self) -> bool {
        self.obj_map == other.obj_map
            && self.mor_map == other.mor_map
            && same_category(&self.source, &other.source)
            && same_category(&self.target, &other.target)
    }
}

impl Eq for Functor {}

impl Functor {
    pub fn identity(c: &Arc<FinCategory>) -> Functor {
        Functor {
            source: c.clone(),
            target: c.clone(),
            obj_map: c.objects().collect(),
            mor_map: c.morphisms().collect(),
        }
    }

    /// The functor sending everything to the single object of a one-object target.
    pub fn constant(source: &Arc<FinCategory>, target: &Arc<FinCategory>, obj: usize) -> Functor {
        let id = target.identity(obj);
        Functor {
            source: source.clone(),
            target: target.clone(),
            obj_map: vec![obj; source.num_objects()],
            mor_map: vec![id; source.num_morphisms()],
        }
    }

    /// Builds a functor from identifier pairs. Identities follow their
    /// objects; every other morphism must be listed. The result is validated.
    pub fn from_ids(
        source: &Arc<FinCategory>,
        target: &Arc<FinCategory>,
        objects: &[(&str, &str)],
        morphisms: &[(&str, &str)],
    ) -> Result<Functor> {
        let unknown = |what: &str, id: &str| Error::UnknownEntity(format!("{what} {id}"));
        let mut obj_map = vec![usize::MAX; source.num_objects()];
        for &(a, b) in objects {
            let x = source.object_index(a).ok_or_else(|| unknown("object", a))?;
            obj_map[x] = target.object_index(b).ok_or_else(|| unknown("object", b))?;
        }
        if obj_map.contains(&usize::MAX) {
            return Err(Error::shape("functor object map is not total"));
        }
        let mut mor_map = vec![usize::MAX; source.num_morphisms()];
        for x in source.objects() {
            mor_map[source.identity(x)] = target.identity(obj_map[x]);
        }
        for &(u, v) in morphisms {
            let m = source.morphism_index(u).ok_or_else(|| unknown("morphism", u))?;
            mor_map[m] = target.morphism_index(v).ok_or_else(|| unknown("morphism", v))?;
        }
        if mor_map.contains(&usize::MAX) {
            return Err(Error::shape("functor morphism map is not total"));
        }
        let f = Functor {
            source: source.clone(),
            target: target.clone(),
            obj_map,
            mor_map,
        };
        f.validate().into_result("functor")?;
        Ok(f)
    }

    pub fn obj(&self, o: usize) -> usize {
        self.obj_map[o]
    }

    pub fn mor(&self, m: usize) -> usize {
        self.mor_map[m]
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Functor) -> Functor {
        debug_assert!(same_category(&first.target, &self.source));
        Functor {
            source: first.source.clone(),
            target: self.target.clone(),
            obj_map: first.obj_map.iter().map(|&o| self.obj_map[o]).collect(),
            mor_map: first.mor_map.iter().map(|&m| self.mor_map[m]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        same_category(&self.source, &self.target)
            && self.obj_map.iter().enumerate().all(|(i, &o)| i == o)
            && self.mor_map.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn validate(&self) -> ValidationReport {
        let (s, t) = (&*self.source, &*self.target);
        let mut r = ValidationReport::new();
        if self.obj_map.len() != s.num_objects() || self.mor_map.len() != s.num_morphisms() {
            r.push("functor table size", Vec::<String>::new());
            return r;
        }
        for m in s.morphisms() {
            let fm = self.mor_map[m];
            if t.dom(fm) != self.obj_map[s.dom(m)] || t.cod(fm) != self.obj_map[s.cod(m)] {
                r.push("functor breaks dom/cod", [s.morphism_id(m)]);
            }
        }
        if !r.is_valid() {
            return r;
        }
        for o in s.objects() {
            if self.mor_map[s.identity(o)] != t.identity(self.obj_map[o]) {
                r.push("functor breaks identity", [s.object_id(o)]);
            }
        }
        for g in s.morphisms() {
            for &f in s.incoming(s.dom(g)) {
                let lhs = self.mor_map[s.comp(g, f)];
                let rhs = t.comp(self.mor_map[g], self.mor_map[f]);
                if lhs != rhs {
                    r.push("functor breaks composition", [s.morphism_id(g), s.morphism_id(f)]);
                }
            }
        }
        r
    }
}

/// A natural transformation between parallel strict functors.
#[derive(Clone, PartialEq, Eq)]
pub struct NatTrans {
    pub source: Functor,
    pub target: Functor,
    pub components: Vec<usize>,
}

impl fmt::Debug for NatTrans {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NatTrans")
            .field("components", &self.components)
            .finish()
    }
}

impl NatTrans {
    pub fn identity(f: &Functor) -> NatTrans {
        NatTrans {
            source: f.clone(),
            target: f.clone(),
            components: f.obj_map.iter().map(|&o| f.target.identity(o)).collect(),
        }
    }

    pub fn at(&self, o: usize) -> usize {
        self.components[o]
    }

    pub fn category(&self) -> &Arc<FinCategory> {
        &self.source.target
    }

    pub fn is_iso(&self) -> bool {
        let c = self.category();
        self.components.iter().all(|&m| c.is_iso(m))
    }

    pub fn is_identity(&self) -> bool {
        let c = self.category();
        self.components.iter().all(|&m| c.is_identity(m))
    }

    pub fn inverse(&self) -> Option<NatTrans> {
        let c = self.category();
        let comps = self
            .components
            .iter()
            .map(|&m| c.inverse(m))
            .collect::<Option<Vec<_>>>()?;
        Some(NatTrans {
            source: self.target.clone(),
            target: self.source.clone(),
            components: comps,
        })
    }

    /// `other · self`: vertical composite, `self` first.
    pub fn then(&self, other: &NatTrans) -> NatTrans {
        let c = self.category();
        NatTrans {
            source: self.source.clone(),
            target: other.target.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(&a, &b)| c.comp(b, a))
                .collect(),
        }
    }

    /// `h ∗ self`: post-whisker by a functor out of the target category.
    pub fn whisker_after(&self, h: &Functor) -> NatTrans {
        NatTrans {
            source: h.after(&self.source),
            target: h.after(&self.target),
            components: self.components.iter().map(|&m| h.mor(m)).collect(),
        }
    }

    /// `self ∗ k`: pre-whisker by a functor into the source category.
    pub fn whisker_before(&self, k: &Functor) -> NatTrans {
        NatTrans {
            source: self.source.after(k),
            target: self.target.after(k),
            components: k.obj_map.iter().map(|&o| self.components[o]).collect(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        let (f, g) = (&self.source, &self.target);
        if !same_category(&f.source, &g.source) || !same_category(&f.target, &g.target) {
            r.push(
                "natural transformation between non-parallel functors",
                Vec::<String>::new(),
            );
            return r;
        }
        let (s, t) = (&*f.source, &*f.target);
        if self.components.len() != s.num_objects() {
            r.push("component table size", Vec::<String>::new());
            return r;
        }
        for o in s.objects() {
            let c = self.components[o];
            if c >= t.num_morphisms() || t.dom(c) != f.obj(o) || t.cod(c) != g.obj(o) {
                r.push("component has wrong type", [s.object_id(o)]);
            }
        }
        if !r.is_valid() {
            return r;
        }
        for m in s.morphisms() {
            let (a, b) = (s.dom(m), s.cod(m));
            let lhs = t.comp(g.mor(m), self.components[a]);
            let rhs = t.comp(self.components[b], f.mor(m));
            if lhs != rhs {
                r.push("naturality", [s.morphism_id(m)]);
            }
        }
        r
    }
}

/// Per-criterion outcome of an equivalence check, with a counterexample
/// for each failing criterion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceDecision {
    /// `(a, b, missing morphism Fa → Fb)`.
    pub not_full: Option<(String, String, String)>,
    /// `(u, v)` distinct parallel morphisms with equal images.
    pub not_faithful: Option<(String, String)>,
    /// target object outside the essential image.
    pub not_essentially_surjective: Option<String>,
}

impl EquivalenceDecision {
    pub fn full(&self) -> bool {
        self.not_full.is_none()
    }
    pub fn faithful(&self) -> bool {
        self.not_faithful.is_none()
    }
    pub fn essentially_surjective(&self) -> bool {
        self.not_essentially_surjective.is_none()
    }
    pub fn is_equivalence(&self) -> bool {
        self.full() && self.faithful() && self.essentially_surjective()
    }
}

/// Decides fullness, faithfulness and essential surjectivity.
pub fn is_equivalence(f: &Functor) -> EquivalenceDecision {
    let (s, t) = (&*f.source, &*f.target);
    let mut not_full = None;
    let mut not_faithful = None;
    'outer: for a in s.objects() {
        for b in s.objects() {
            let mut seen: HashMap<usize, usize> = HashMap::new();
            for &u in s.hom(a, b) {
                if let Some(&v) = seen.get(&f.mor(u)) {
                    if not_faithful.is_none() {
                        not_faithful = Some((s.morphism_id(v).to_string(), s.morphism_id(u).to_string()));
                    }
                } else {
                    seen.insert(f.mor(u), u);
                }
            }
            if not_full.is_none() {
                if let Some(&m) = t.hom(f.obj(a), f.obj(b)).iter().find(|m| !seen.contains_key(m)) {
                    not_full = Some((
                        s.object_id(a).to_string(),
                        s.object_id(b).to_string(),
                        t.morphism_id(m).to_string(),
                    ));
                }
            }
            if not_full.is_some() && not_faithful.is_some() {
                break 'outer;
            }
        }
    }
    let not_essentially_surjective = t
        .objects()
        .find(|&d| !s.objects().any(|c| t.isomorphic(f.obj(c), d)))
        .map(|d| t.object_id(d).to_string());
    EquivalenceDecision {
        not_full,
        not_faithful,
        not_essentially_surjective,
    }
}

/// Unique `u` with `F(u) = v`, for `F` faithful; `None` when no preimage exists.
pub fn unique_preimage(f: &Functor, a: usize, b: usize, v: usize) -> Option<usize> {
    let mut found = None;
    for &u in f.source.hom(a, b) {
        if f.mor(u) == v {
            debug_assert!(found.is_none(), "preimage is not unique: functor not faithful");
            found = Some(u);
            if !cfg!(debug_assertions) {
                break;
            }
        }
    }
    found
}

/// An adjoint equivalence `forward ⊣ backward` with invertible unit and counit.
#[derive(Clone, Debug)]
pub struct AdjointEquivalence {
    pub forward: Functor,
    pub backward: Functor,
    /// `1 ⇒ backward ∘ forward`
    pub unit: NatTrans,
    /// `forward ∘ backward ⇒ 1`
    pub counit: NatTrans,
}

impl AdjointEquivalence {
    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        r.extend_prefixed("backward", self.backward.validate());
        r.extend_prefixed("unit", self.unit.validate());
        r.extend_prefixed("counit", self.counit.validate());
        if !r.is_valid() {
            return r;
        }
        if !self.unit.is_iso() {
            r.push("unit not invertible", Vec::<String>::new());
        }
        if !self.counit.is_iso() {
            r.push("counit not invertible", Vec::<String>::new());
        }
        let (c, d) = (&*self.forward.source, &*self.forward.target);
        // ε_{F c} ∘ F(η_c) = 1_{F c}
        for o in c.objects() {
            let fo = self.forward.obj(o);
            let lhs = d.comp(self.counit.at(fo), self.forward.mor(self.unit.at(o)));
            if lhs != d.identity(fo) {
                r.push("first triangle identity", [c.object_id(o)]);
            }
        }
        // G(ε_d) ∘ η_{G d} = 1_{G d}
        for o in d.objects() {
            let go = self.backward.obj(o);
            let lhs = c.comp(self.backward.mor(self.counit.at(o)), self.unit.at(go));
            if lhs != c.identity(go) {
                r.push("second triangle identity", [d.object_id(o)]);
            }
        }
        r
    }
}

/// Upgrades an equivalence to an adjoint equivalence. For every target object
/// the first source object (canonical order) mapping onto it is chosen, with an
/// identity counit component; failing that, the first source object with an
/// isomorphic image, together with the first such isomorphism.
pub fn promote_to_adjoint_equivalence(f: &Functor) -> Result<AdjointEquivalence> {
    let decision = is_equivalence(f);
    if !decision.is_equivalence() {
        return Err(Error::NotAnEquivalence(format!("{decision:?}")));
    }
    let (c, d) = (&f.source, &f.target);
    let mut back_obj = Vec::with_capacity(d.num_objects());
    let mut counit = Vec::with_capacity(d.num_objects());
    for y in d.objects() {
        let (x, e) = c
            .objects()
            .find(|&x| f.obj(x) == y)
            .map(|x| (x, d.identity(y)))
            .or_else(|| c.objects().find_map(|x| d.isos(f.obj(x), y).next().map(|e| (x, e))))
            .expect("essentially surjective");
        back_obj.push(x);
        counit.push(e);
    }
    let mut back_mor = Vec::with_capacity(d.num_morphisms());
    for v in d.morphisms() {
        let (y0, y1) = (d.dom(v), d.cod(v));
        let target = d.comp(d.inv(counit[y1]), d.comp(v, counit[y0]));
        let u = unique_preimage(f, back_obj[y0], back_obj[y1], target).expect("full functor has a preimage");
        back_mor.push(u);
    }
    let backward = Functor {
        source: d.clone(),
        target: c.clone(),
        obj_map: back_obj,
        mor_map: back_mor,
    };
    let gf = backward.after(f);
    let fg = f.after(&backward);
    let mut unit = Vec::with_capacity(c.num_objects());
    for x in c.objects() {
        let fx = f.obj(x);
        let target = d.inv(counit[fx]);
        let u = unique_preimage(f, x, gf.obj(x), target).expect("full functor has a preimage");
        unit.push(u);
    }
    let adj = AdjointEquivalence {
        forward: f.clone(),
        unit: NatTrans {
            source: Functor::identity(c),
            target: gf,
            components: unit,
        },
        counit: NatTrans {
            source: fg,
            target: Functor::identity(d),
            components: counit,
        },
        backward,
    };
    debug_assert!(adj.validate().is_valid(), "{}", adj.validate());
    Ok(adj)
}

/// Visits every strict functor `c → d` in canonical (lexicographic) order.
/// The bound limits the number of search nodes.
pub fn for_each_functor<F>(c: &Arc<FinCategory>, d: &Arc<FinCategory>, bound: u64, mut visit: F) -> Result<()>
where
    F: FnMut(&Functor) -> ControlFlow<()>,
{
    let budget = Budget::new(bound, "enumerating functors");
    let n_obj = c.num_objects();
    let n_mor = c.num_morphisms();
    // composition constraints keyed by the largest morphism index involved
    let mut checks: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n_mor];
    for g in c.morphisms() {
        for &f in c.incoming(c.dom(g)) {
            let gf = c.comp(g, f);
            let key = g.max(f).max(gf);
            checks[key].push((g, f, gf));
        }
    }
    let mut obj_map = vec![0; n_obj];
    let mut mor_map = vec![0; n_mor];

    struct Ctx<'a, F> {
        c: &'a FinCategory,
        d: &'a FinCategory,
        checks: &'a [Vec<(usize, usize, usize)>],
        budget: &'a Budget,
        visit: F,
        cs: &'a Arc<FinCategory>,
        ds: &'a Arc<FinCategory>,
    }

    fn objs<F: FnMut(&Functor) -> ControlFlow<()>>(
        ctx: &mut Ctx<'_, F>,
        i: usize,
        obj_map: &mut Vec<usize>,
        mor_map: &mut Vec<usize>,
    ) -> Result<ControlFlow<()>> {
        ctx.budget.tick()?;
        if i == ctx.c.num_objects() {
            return mors(ctx, 0, obj_map, mor_map);
        }
        for y in ctx.d.objects() {
            obj_map[i] = y;
            if objs(ctx, i + 1, obj_map, mor_map)?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    fn mors<F: FnMut(&Functor) -> ControlFlow<()>>(
        ctx: &mut Ctx<'_, F>,
        m: usize,
        obj_map: &mut Vec<usize>,
        mor_map: &mut Vec<usize>,
    ) -> Result<ControlFlow<()>> {
        ctx.budget.tick()?;
        if m == ctx.c.num_morphisms() {
            let f = Functor {
                source: ctx.cs.clone(),
                target: ctx.ds.clone(),
                obj_map: obj_map.clone(),
                mor_map: mor_map.clone(),
            };
            return Ok((ctx.visit)(&f));
        }
        let (a, b) = (obj_map[ctx.c.dom(m)], obj_map[ctx.c.cod(m)]);
        let candidates: Vec<usize> = if ctx.c.is_identity(m) {
            vec![ctx.d.identity(a)]
        } else {
            ctx.d.hom(a, b).to_vec()
        };
        for y in candidates {
            mor_map[m] = y;
            let ok = ctx.checks[m]
                .iter()
                .all(|&(g, f, gf)| ctx.d.comp(mor_map[g], mor_map[f]) == mor_map[gf]);
            if ok && mors(ctx, m + 1, obj_map, mor_map)?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    let mut ctx = Ctx {
        c,
        d,
        checks: &checks,
        budget: &budget,
        visit: &mut visit,
        cs: c,
        ds: d,
    };
    objs(&mut ctx, 0, &mut obj_map, &mut mor_map).map(|_| ())
}

/// Every strict functor `c → d`, in canonical order.
pub fn enumerate_functors(c: &Arc<FinCategory>, d: &Arc<FinCategory>, bound: u64) -> Result<Vec<Functor>> {
    let mut out = Vec::new();
    for_each_functor(c, d, bound, |f| {
        out.push(f.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Every natural transformation `f ⇒ g`, in canonical order. With
/// `isos_only` the components are restricted to isomorphisms.
pub fn enumerate_nat_transformations_filtered(
    f: &Functor,
    g: &Functor,
    isos_only: bool,
    bound: u64,
) -> Result<Vec<NatTrans>> {
    let budget = Budget::new(bound, "enumerating natural transformations");
    let (s, t) = (&*f.source, &*f.target);
    let n = s.num_objects();
    // naturality squares keyed by the larger endpoint
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for m in s.morphisms() {
        checks[s.dom(m).max(s.cod(m))].push(m);
    }
    let mut comps = vec![0; n];
    let mut out = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        s: &FinCategory,
        t: &FinCategory,
        f: &Functor,
        g: &Functor,
        isos_only: bool,
        checks: &[Vec<usize>],
        comps: &mut Vec<usize>,
        out: &mut Vec<NatTrans>,
        budget: &Budget,
    ) -> Result<()> {
        budget.tick()?;
        if i == s.num_objects() {
            out.push(NatTrans {
                source: f.clone(),
                target: g.clone(),
                components: comps.clone(),
            });
            return Ok(());
        }
        for &c in t.hom(f.obj(i), g.obj(i)) {
            if isos_only && !t.is_iso(c) {
                continue;
            }
            comps[i] = c;
            let ok = checks[i].iter().all(|&m| {
                let (a, b) = (s.dom(m), s.cod(m));
                t.comp(g.mor(m), comps[a]) == t.comp(comps[b], f.mor(m))
            });
            if ok {
                go(i + 1, s, t, f, g, isos_only, checks, comps, out, budget)?;
            }
        }
        Ok(())
    }

    go(0, s, t, f, g, isos_only, &checks, &mut comps, &mut out, &budget)?;
    Ok(out)
}

/// Every natural transformation `f ⇒ g`, in canonical order.
pub fn enumerate_nat_transformations(f: &Functor, g: &Functor) -> Result<Vec<NatTrans>> {
    enumerate_nat_transformations_filtered(f, g, false, crate::bound::default_bound())
}

#[cfg(test)]
mod tests {
    use super::standard::*;
    use super::*;

    #[test]
    fn terminal_and_walking_iso_are_valid() {
        assert!(validate_category(&terminal()).is_valid());
        assert!(validate_category(&walking_iso()).is_valid());
        assert!(validate_category(&empty()).is_valid());
    }

    #[test]
    fn missing_composite_is_reported_with_the_pair() {
        let spec = CategorySpec {
            objects: vec!["a".into(), "b".into()],
            morphisms: vec![
                MorphismSpec {
                    id: "1a".into(),
                    dom: "a".into(),
                    cod: "a".into(),
                },
                MorphismSpec {
                    id: "1b".into(),
                    dom: "b".into(),
                    cod: "b".into(),
                },
                MorphismSpec {
                    id: "u".into(),
                    dom: "a".into(),
                    cod: "b".into(),
                },
            ],
            identities: vec![("a".into(), "1a".into()), ("b".into(), "1b".into())],
            compose: vec![
                ("1a".into(), "1a".into(), "1a".into()),
                ("1b".into(), "1b".into(), "1b".into()),
                ("u".into(), "1a".into(), "u".into()),
            ],
        };
        let c = FinCategory::from_spec_unchecked(&spec).unwrap();
        let r = validate_category(&c);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].rule, "missing composite");
        assert_eq!(r.violations[0].witness, vec!["1b".to_string(), "u".to_string()]);
        assert!(FinCategory::from_spec(&spec).is_err());
    }

    #[test]
    fn dangling_reference_is_a_parse_error() {
        let spec = CategorySpec {
            objects: vec!["a".into()],
            morphisms: vec![MorphismSpec {
                id: "f".into(),
                dom: "a".into(),
                cod: "z".into(),
            }],
            identities: vec![],
            compose: vec![],
        };
        assert!(matches!(
            FinCategory::from_spec_unchecked(&spec),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn inverses() {
        let c = terminal();
        assert_eq!(is_iso(&c, 0), Some(0));
        let w = walking_iso();
        let f = w.morphism_index("f").unwrap();
        let g = w.morphism_index("g").unwrap();
        assert_eq!(is_iso(&w, f), Some(g));
        assert_eq!(is_iso(&w, g), Some(f));
        let two = walking_arrow();
        let u = two.morphism_index("u").unwrap();
        assert_eq!(is_iso(&two, u), None);
        // the oracle: no morphism b → a at all
        assert!(two.hom(two.cod(u), two.dom(u)).is_empty());
    }

    #[test]
    fn equivalence_examples() {
        let w = walking_iso();
        assert!(is_equivalence(&Functor::identity(&w)).is_equivalence());
        let t = terminal();
        let to_t = Functor::constant(&w, &t, 0);
        assert!(is_equivalence(&to_t).is_equivalence());
        let d2 = discrete(&["x", "y"]);
        let d_to_t = Functor::constant(&d2, &t, 0);
        let dec = is_equivalence(&d_to_t);
        assert!(dec.faithful() && dec.essentially_surjective());
        assert!(!dec.full());
        let pp = parallel_pair();
        let dec = is_equivalence(&Functor::constant(&pp, &t, 0));
        assert_eq!(dec.not_faithful, Some(("u".to_string(), "v".to_string())));
    }

    #[test]
    fn promotion() {
        let w = walking_iso();
        let id = promote_to_adjoint_equivalence(&Functor::identity(&w)).unwrap();
        assert!(id.backward.is_identity());
        assert!(id.unit.is_identity() && id.counit.is_identity());
        let t = terminal();
        let adj = promote_to_adjoint_equivalence(&Functor::constant(&w, &t, 0)).unwrap();
        assert!(adj.validate().is_valid());
        assert_eq!(adj.backward.obj(0), 0);
        let pp = parallel_pair();
        assert!(matches!(
            promote_to_adjoint_equivalence(&Functor::constant(&pp, &t, 0)),
            Err(Error::NotAnEquivalence(_))
        ));
    }

    #[test]
    fn functor_counts() {
        let t = terminal();
        let d3 = discrete(&["a", "b", "c"]);
        assert_eq!(enumerate_functors(&t, &d3, 1000).unwrap().len(), 3);
        assert_eq!(enumerate_functors(&t, &t, 1000).unwrap().len(), 1);
        let two = walking_arrow();
        let w = walking_iso();
        // object images (4 pairs) each force the arrow image: hom-sets of w are singletons
        assert_eq!(enumerate_functors(&two, &w, 1000).unwrap().len(), 4);
        assert!(matches!(
            enumerate_functors(&two, &w, 3),
            Err(Error::BoundExceeded { .. })
        ));
        let e = empty();
        assert_eq!(enumerate_functors(&e, &w, 10).unwrap().len(), 1);
        assert_eq!(enumerate_functors(&w, &e, 10).unwrap().len(), 0);
    }

    #[test]
    fn nat_trans_counts() {
        let t = terminal();
        let idt = Functor::identity(&t);
        assert_eq!(enumerate_nat_transformations(&idt, &idt).unwrap().len(), 1);
        let d2 = discrete(&["x", "y"]);
        let idd = Functor::identity(&d2);
        assert_eq!(enumerate_nat_transformations(&idd, &idd).unwrap().len(), 1);
        // walking iso: components (α_a, α_b) ∈ {1_a}×{1_b}; hom(a,a) is a singleton
        let w = walking_iso();
        let idw = Functor::identity(&w);
        assert_eq!(enumerate_nat_transformations(&idw, &idw).unwrap().len(), 1);
        // the cyclic group of order two: both central elements are natural
        let z2 = cyclic_group(2);
        let idz = Functor::identity(&z2);
        assert_eq!(enumerate_nat_transformations(&idz, &idz).unwrap().len(), 2);
    }

    #[test]
    fn arrow_category_is_valid() {
        for c in [walking_arrow(), walking_iso(), parallel_pair(), cyclic_group(2)] {
            let a = arrow_category(&c);
            assert!(validate_category(&a).is_valid());
            assert_eq!(a.num_objects(), c.num_morphisms());
        }
    }

    #[test]
    fn product_is_valid() {
        let p = product(&walking_arrow(), &cyclic_group(2));
        assert!(validate_category(&p).is_valid());
        assert_eq!(p.num_objects(), 2);
        assert_eq!(p.num_morphisms(), 6);
    }
}
