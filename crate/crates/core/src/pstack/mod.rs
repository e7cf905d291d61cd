//! Pseudofunctors from a finite site into finite categories, pseudonatural
//! transformations between them and modifications.
//!
//! Orientation conventions. For site arrows `f: V → U` and `g: W → V`:
//! - `restrict(f)` is the functor `F(U) → F(V)`, written `x·f`;
//! - `upsilon(U)` has components `F(1_U)(x) → x`;
//! - `phi(f, g)` has components `F(f∘g)(x) → F(g)(F(f)(x))` in `F(W)`.
//!
//! A pseudonatural `p: E → B` carries, for every `t: V → U`, a natural
//! isomorphism with components `p_V(e·t) → p_U(e)·t`.

use std::fmt;
use std::sync::Arc;

use crate::fincat::{same_category, validate_category, FinCategory, Functor, NatTrans};
use crate::site::{same_site, Site};
use crate::validation::ValidationReport;
use crate::{Error, Result};

mod constructions;
mod enumerate;
mod prestack;

pub use constructions::*;
pub use enumerate::*;
pub use prestack::*;

/// A pseudofunctor `C^op → Cat` with explicit coherence tables.
#[derive(Clone)]
pub struct Pseudofunctor {
    site: Arc<Site>,
    fibers: Vec<Arc<FinCategory>>,
    restrict: Vec<Functor>,
    upsilon: Vec<NatTrans>,
    /// `phi[f][incoming_position(g)]`
    phi: Vec<Vec<NatTrans>>,
}

impl fmt::Debug for Pseudofunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<usize> = self.fibers.iter().map(|c| c.num_objects()).collect();
        write!(f, "Pseudofunctor(fiber sizes {sizes:?})")
    }
}

impl PartialEq for Pseudofunctor {
    fn eq(&self, other: &Self) -> bool {
        same_site(&self.site, &other.site)
            && self.fibers.len() == other.fibers.len()
            && self.fibers.iter().zip(&other.fibers).all(|(a, b)| same_category(a, b))
            && self.restrict == other.restrict
            && self.upsilon == other.upsilon
            && self.phi == other.phi
    }
}

impl Eq for Pseudofunctor {}

pub(crate) fn same_pf(a: &Arc<Pseudofunctor>, b: &Arc<Pseudofunctor>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Pseudofunctor {
    /// Assembles the tables without checking any law. Table shapes are
    /// checked; laws are left to [`validate_pseudofunctor`].
    pub fn new_unchecked(
        site: Arc<Site>,
        fibers: Vec<Arc<FinCategory>>,
        restrict: Vec<Functor>,
        upsilon: Vec<NatTrans>,
        phi: Vec<Vec<NatTrans>>,
    ) -> Result<Pseudofunctor> {
        let c = site.cat();
        if fibers.len() != c.num_objects()
            || restrict.len() != c.num_morphisms()
            || upsilon.len() != c.num_objects()
            || phi.len() != c.num_morphisms()
        {
            return Err(Error::shape("pseudofunctor tables do not match the site"));
        }
        for f in c.morphisms() {
            if phi[f].len() != c.incoming(c.dom(f)).len() {
                return Err(Error::shape("phi table does not match the site"));
            }
        }
        Ok(Pseudofunctor {
            site,
            fibers,
            restrict,
            upsilon,
            phi,
        })
    }

    /// Assembles and validates.
    pub fn new(
        site: Arc<Site>,
        fibers: Vec<Arc<FinCategory>>,
        restrict: Vec<Functor>,
        upsilon: Vec<NatTrans>,
        phi: Vec<Vec<NatTrans>>,
    ) -> Result<Pseudofunctor> {
        let f = Self::new_unchecked(site, fibers, restrict, upsilon, phi)?;
        validate_pseudofunctor(&f).into_result("pseudofunctor")?;
        Ok(f)
    }

    /// Coherence chosen from the restriction functors alone: identities
    /// where the functors agree on the nose, otherwise the first natural
    /// isomorphism in canonical order. The result is validated.
    pub fn from_restrictions(
        site: Arc<Site>,
        fibers: Vec<Arc<FinCategory>>,
        restrict: Vec<Functor>,
    ) -> Result<Pseudofunctor> {
        let c = site.cat().clone();
        let pick = |from: &Functor, to: &Functor| -> Result<NatTrans> {
            if from == to {
                return Ok(NatTrans::identity(from));
            }
            let found =
                crate::fincat::enumerate_nat_transformations_filtered(from, to, true, crate::bound::default_bound())?;
            found
                .into_iter()
                .next()
                .ok_or_else(|| Error::shape("restriction functors are not coherently isomorphic"))
        };
        let mut upsilon = Vec::with_capacity(c.num_objects());
        for u in c.objects() {
            let id = Functor::identity(&fibers[u]);
            upsilon.push(pick(&restrict[c.identity(u)], &id)?);
        }
        let mut phi = Vec::with_capacity(c.num_morphisms());
        for f in c.morphisms() {
            let mut row = Vec::new();
            for &g in c.incoming(c.dom(f)) {
                let fg = c.comp(f, g);
                row.push(pick(&restrict[fg], &restrict[g].after(&restrict[f]))?);
            }
            phi.push(row);
        }
        Pseudofunctor::new(site, fibers, restrict, upsilon, phi)
    }

    pub fn site(&self) -> &Arc<Site> {
        &self.site
    }

    pub fn cat(&self) -> &Arc<FinCategory> {
        self.site.cat()
    }

    pub fn fiber(&self, u: usize) -> &Arc<FinCategory> {
        &self.fibers[u]
    }

    pub fn fibers(&self) -> &[Arc<FinCategory>] {
        &self.fibers
    }

    pub fn restriction(&self, f: usize) -> &Functor {
        &self.restrict[f]
    }

    pub fn restrictions(&self) -> &[Functor] {
        &self.restrict
    }

    pub fn upsilon(&self, u: usize) -> &NatTrans {
        &self.upsilon[u]
    }

    pub fn upsilons(&self) -> &[NatTrans] {
        &self.upsilon
    }

    /// `phi(f, g)`, for `cod(g) = dom(f)`.
    pub fn phi(&self, f: usize, g: usize) -> &NatTrans {
        debug_assert_eq!(self.cat().cod(g), self.cat().dom(f));
        &self.phi[f][self.cat().incoming_position(g)]
    }

    pub fn phi_table(&self) -> &[Vec<NatTrans>] {
        &self.phi
    }

    /// `x·f`
    pub fn res_obj(&self, f: usize, x: usize) -> usize {
        self.restrict[f].obj(x)
    }

    /// `m·f`
    pub fn res_mor(&self, f: usize, m: usize) -> usize {
        self.restrict[f].mor(m)
    }

    /// Component of `phi(f, g)` at `x ∈ F(cod f)`.
    pub fn phi_at(&self, f: usize, g: usize, x: usize) -> usize {
        self.phi(f, g).at(x)
    }

    pub fn upsilon_at(&self, u: usize, x: usize) -> usize {
        self.upsilon[u].at(x)
    }

    /// Restriction of `x ∈ F(u)` along a path of site arrows; `path[0]` is
    /// applied first and has codomain `u`.
    pub fn res_path(&self, x: usize, path: &[usize]) -> usize {
        path.iter().fold(x, |acc, &f| self.res_obj(f, acc))
    }

    /// Restriction of a morphism along a path.
    pub fn res_path_mor(&self, m: usize, path: &[usize]) -> usize {
        path.iter().fold(m, |acc, &f| self.res_mor(f, acc))
    }

    /// Composite site arrow of a path (`path[0] ∘ path[1] ∘ …`).
    pub fn path_arrow(&self, u: usize, path: &[usize]) -> usize {
        let c = self.cat();
        match path.split_first() {
            None => c.identity(u),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &g| c.comp(acc, g)),
        }
    }

    /// The canonical isomorphism `x·(composite of path) → x·path` built from
    /// `phi` (and `upsilon` for the empty path).
    pub fn can(&self, u: usize, x: usize, path: &[usize]) -> usize {
        match path.len() {
            0 => self.upsilon_at(u, x),
            1 => self.fiber(self.cat().dom(path[0])).identity(self.res_obj(path[0], x)),
            n => {
                let last = path[n - 1];
                let prefix = &path[..n - 1];
                let head = self.path_arrow(u, prefix);
                let inner = self.can(u, x, prefix);
                let fib = self.fiber(self.cat().dom(last));
                fib.comp(self.res_mor(last, inner), self.phi_at(head, last, x))
            }
        }
    }

    /// The canonical isomorphism `x·p1 → x·p2` between restrictions along two
    /// paths with the same composite.
    pub fn reassoc(&self, u: usize, x: usize, p1: &[usize], p2: &[usize]) -> usize {
        debug_assert_eq!(self.path_arrow(u, p1), self.path_arrow(u, p2));
        let w = self.cat().dom(self.path_arrow(u, p1));
        let fib = self.fiber(w);
        fib.comp(self.can(u, x, p2), fib.inv(self.can(u, x, p1)))
    }

    /// `σ(x): x|_first|_{12} → x|_second|_{12}` where the overlap is the chosen
    /// pullback of `(first, second)`.
    pub fn sigma(&self, x: usize, first: usize, second: usize) -> usize {
        let pb = self.site.pullback(first, second);
        let u = self.cat().cod(first);
        self.reassoc(u, x, &[first, pb.p1], &[second, pb.p2])
    }
}

/// Checks every pseudofunctor law exhaustively.
pub fn validate_pseudofunctor(f: &Pseudofunctor) -> ValidationReport {
    let c = f.cat().clone();
    let mut r = ValidationReport::new();
    for u in c.objects() {
        let v = validate_category(f.fiber(u));
        if !v.is_valid() {
            r.extend_prefixed(&format!("fiber {}", c.object_id(u)), v);
        }
    }
    if !r.is_valid() {
        return r;
    }
    for m in c.morphisms() {
        let fun = f.restriction(m);
        if !same_category(&fun.source, f.fiber(c.cod(m))) || !same_category(&fun.target, f.fiber(c.dom(m))) {
            r.push("restriction functor has wrong type", [c.morphism_id(m)]);
            continue;
        }
        r.extend_prefixed(&format!("restriction {}", c.morphism_id(m)), fun.validate());
    }
    if !r.is_valid() {
        return r;
    }
    for u in c.objects() {
        let ups = f.upsilon(u);
        let id = Functor::identity(f.fiber(u));
        if ups.source != *f.restriction(c.identity(u)) || ups.target != id {
            r.push("upsilon has wrong type", [c.object_id(u)]);
            continue;
        }
        let v = ups.validate();
        if !v.is_valid() {
            r.extend_prefixed(&format!("upsilon {}", c.object_id(u)), v);
        } else if !ups.is_iso() {
            r.push("upsilon not invertible", [c.object_id(u)]);
        }
    }
    for a in c.morphisms() {
        for &b in c.incoming(c.dom(a)) {
            let ph = f.phi(a, b);
            let w = [c.morphism_id(a), c.morphism_id(b)];
            if ph.source != *f.restriction(c.comp(a, b)) || ph.target != f.restriction(b).after(f.restriction(a)) {
                r.push("phi has wrong type", w);
                continue;
            }
            let v = ph.validate();
            if !v.is_valid() {
                r.extend_prefixed(&format!("phi {}", w.join(",")), v);
            } else if !ph.is_iso() {
                r.push("phi not invertible", w);
            }
        }
    }
    if !r.is_valid() {
        return r;
    }
    // unit coherence
    for m in c.morphisms() {
        let (v, u) = (c.dom(m), c.cod(m));
        let fv = f.fiber(v);
        for x in f.fiber(u).objects() {
            let left = fv.comp(f.res_mor(m, f.upsilon_at(u, x)), f.phi_at(c.identity(u), m, x));
            if !fv.is_identity(left) {
                r.push("unit coherence (left)", [c.morphism_id(m), f.fiber(u).object_id(x)]);
            }
            let right = fv.comp(f.upsilon_at(v, f.res_obj(m, x)), f.phi_at(m, c.identity(v), x));
            if !fv.is_identity(right) {
                r.push("unit coherence (right)", [c.morphism_id(m), f.fiber(u).object_id(x)]);
            }
        }
    }
    // associativity coherence
    for a in c.morphisms() {
        for &b in c.incoming(c.dom(a)) {
            let ab = c.comp(a, b);
            for &h in c.incoming(c.dom(b)) {
                let bh = c.comp(b, h);
                let fz = f.fiber(c.dom(h));
                for x in f.fiber(c.cod(a)).objects() {
                    let path1 = fz.comp(f.res_mor(h, f.phi_at(a, b, x)), f.phi_at(ab, h, x));
                    let path2 = fz.comp(f.phi_at(b, h, f.res_obj(a, x)), f.phi_at(a, bh, x));
                    if path1 != path2 {
                        r.push(
                            "associativity coherence",
                            [
                                c.morphism_id(a).to_string(),
                                c.morphism_id(b).to_string(),
                                c.morphism_id(h).to_string(),
                                f.fiber(c.cod(a)).object_id(x).to_string(),
                            ],
                        );
                    }
                }
            }
        }
    }
    r
}

/// A pseudonatural transformation `source → target`.
#[derive(Clone)]
pub struct PseudoNat {
    pub source: Arc<Pseudofunctor>,
    pub target: Arc<Pseudofunctor>,
    /// per site object `U`: `source(U) → target(U)`
    pub components: Vec<Functor>,
    /// per site arrow `t: V → U`: `p_V ∘ source(t) ⇒ target(t) ∘ p_U`
    pub coherence: Vec<NatTrans>,
}

impl fmt::Debug for PseudoNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PseudoNat")
            .field("components", &self.components)
            .finish()
    }
}

impl PartialEq for PseudoNat {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components
            && self.coherence == other.coherence
            && same_pf(&self.source, &other.source)
            && same_pf(&self.target, &other.target)
    }
}

impl Eq for PseudoNat {}

impl PseudoNat {
    pub fn site(&self) -> &Arc<Site> {
        self.source.site()
    }

    pub fn obj(&self, u: usize, e: usize) -> usize {
        self.components[u].obj(e)
    }

    pub fn mor(&self, u: usize, m: usize) -> usize {
        self.components[u].mor(m)
    }

    /// Component `p_V(e·t) → p_U(e)·t` of the coherence at `t`.
    pub fn coh(&self, t: usize, e: usize) -> usize {
        self.coherence[t].at(e)
    }

    pub fn identity(a: &Arc<Pseudofunctor>) -> PseudoNat {
        let c = a.cat();
        PseudoNat {
            source: a.clone(),
            target: a.clone(),
            components: c.objects().map(|u| Functor::identity(a.fiber(u))).collect(),
            coherence: c.morphisms().map(|t| NatTrans::identity(a.restriction(t))).collect(),
        }
    }

    /// The pseudonatural transformation whose coherence is an identity
    /// everywhere; requires the squares to commute on the nose.
    pub fn strict(
        source: &Arc<Pseudofunctor>,
        target: &Arc<Pseudofunctor>,
        components: Vec<Functor>,
    ) -> Result<PseudoNat> {
        let c = source.cat().clone();
        let mut coherence = Vec::with_capacity(c.num_morphisms());
        for t in c.morphisms() {
            let lhs = components[c.dom(t)].after(source.restriction(t));
            let rhs = target.restriction(t).after(&components[c.cod(t)]);
            if lhs != rhs {
                return Err(Error::shape(format!(
                    "components do not commute strictly with restriction along {}",
                    c.morphism_id(t)
                )));
            }
            coherence.push(NatTrans::identity(&lhs));
        }
        let p = PseudoNat {
            source: source.clone(),
            target: target.clone(),
            components,
            coherence,
        };
        validate_pseudonat(&p).into_result("pseudonatural transformation")?;
        Ok(p)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &PseudoNat) -> PseudoNat {
        let c = self.site().cat().clone();
        let components: Vec<Functor> = c
            .objects()
            .map(|u| self.components[u].after(&first.components[u]))
            .collect();
        let d = &self.target;
        let coherence = c
            .morphisms()
            .map(|t| {
                let (v, u) = (c.dom(t), c.cod(t));
                let fv = d.fiber(v);
                let comps = first
                    .source
                    .fiber(u)
                    .objects()
                    .map(|e| {
                        let pe = first.obj(u, e);
                        fv.comp(self.coh(t, pe), self.mor(v, first.coh(t, e)))
                    })
                    .collect();
                NatTrans {
                    source: components[v].after(first.source.restriction(t)),
                    target: d.restriction(t).after(&components[u]),
                    components: comps,
                }
            })
            .collect();
        PseudoNat {
            source: first.source.clone(),
            target: self.target.clone(),
            components,
            coherence,
        }
    }

    pub fn is_identity(&self) -> bool {
        same_pf(&self.source, &self.target)
            && self.components.iter().all(|f| f.is_identity())
            && self.coherence.iter().all(|n| n.is_identity())
    }
}

/// Checks the pseudonaturality laws exhaustively.
pub fn validate_pseudonat(p: &PseudoNat) -> ValidationReport {
    let mut r = ValidationReport::new();
    if !same_site(p.source.site(), p.target.site()) {
        r.push(
            "pseudonatural transformation between different sites",
            Vec::<String>::new(),
        );
        return r;
    }
    let c = p.site().cat().clone();
    let (e, b) = (&p.source, &p.target);
    if p.components.len() != c.num_objects() || p.coherence.len() != c.num_morphisms() {
        r.push("pseudonatural table size", Vec::<String>::new());
        return r;
    }
    for u in c.objects() {
        let f = &p.components[u];
        if !same_category(&f.source, e.fiber(u)) || !same_category(&f.target, b.fiber(u)) {
            r.push("component has wrong type", [c.object_id(u)]);
            continue;
        }
        r.extend_prefixed(&format!("component {}", c.object_id(u)), f.validate());
    }
    if !r.is_valid() {
        return r;
    }
    for t in c.morphisms() {
        let (v, u) = (c.dom(t), c.cod(t));
        let n = &p.coherence[t];
        let src = p.components[v].after(e.restriction(t));
        let tgt = b.restriction(t).after(&p.components[u]);
        if n.source != src || n.target != tgt {
            r.push("coherence has wrong type", [c.morphism_id(t)]);
            continue;
        }
        let val = n.validate();
        if !val.is_valid() {
            r.extend_prefixed(&format!("coherence {}", c.morphism_id(t)), val);
        } else if !n.is_iso() {
            r.push("coherence not invertible", [c.morphism_id(t)]);
        }
    }
    if !r.is_valid() {
        return r;
    }
    // unit: υ^B_{p e} ∘ coh(1_U, e) = p_U(υ^E_e)
    for u in c.objects() {
        let iu = c.identity(u);
        let bu = b.fiber(u);
        for x in e.fiber(u).objects() {
            let lhs = bu.comp(b.upsilon_at(u, p.obj(u, x)), p.coh(iu, x));
            let rhs = p.mor(u, e.upsilon_at(u, x));
            if lhs != rhs {
                r.push("pseudonaturality unit", [c.object_id(u), e.fiber(u).object_id(x)]);
            }
        }
    }
    // composite: φ^B(t,s)_{p e} ∘ coh(ts, e) = (coh(t,e))·s ∘ coh(s, e·t) ∘ p_W(φ^E(t,s)_e)
    for t in c.morphisms() {
        let u = c.cod(t);
        for &s in c.incoming(c.dom(t)) {
            let ts = c.comp(t, s);
            let w = c.dom(s);
            let bw = b.fiber(w);
            for x in e.fiber(u).objects() {
                let lhs = bw.comp(b.phi_at(t, s, p.obj(u, x)), p.coh(ts, x));
                let rhs = bw.comp(
                    b.res_mor(s, p.coh(t, x)),
                    bw.comp(p.coh(s, e.res_obj(t, x)), p.mor(w, e.phi_at(t, s, x))),
                );
                if lhs != rhs {
                    r.push(
                        "pseudonaturality composite",
                        [
                            c.morphism_id(t).to_string(),
                            c.morphism_id(s).to_string(),
                            e.fiber(u).object_id(x).to_string(),
                        ],
                    );
                }
            }
        }
    }
    r
}

/// A modification between parallel pseudonatural transformations.
#[derive(Clone, PartialEq, Eq)]
pub struct Modification {
    pub source: PseudoNat,
    pub target: PseudoNat,
    /// per site object `U`: `source_U ⇒ target_U`
    pub components: Vec<NatTrans>,
}

impl fmt::Debug for Modification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Modification")
            .field("components", &self.components)
            .finish()
    }
}

impl Modification {
    pub fn at(&self, u: usize, e: usize) -> usize {
        self.components[u].at(e)
    }

    pub fn identity(p: &PseudoNat) -> Modification {
        Modification {
            source: p.clone(),
            target: p.clone(),
            components: p.components.iter().map(NatTrans::identity).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.components.iter().all(|n| n.is_identity())
    }

    pub fn is_iso(&self) -> bool {
        self.components.iter().all(|n| n.is_iso())
    }

    pub fn inverse(&self) -> Option<Modification> {
        Some(Modification {
            source: self.target.clone(),
            target: self.source.clone(),
            components: self
                .components
                .iter()
                .map(|n| n.inverse())
                .collect::<Option<Vec<_>>>()?,
        })
    }

    /// `other · self`
    pub fn then(&self, other: &Modification) -> Modification {
        Modification {
            source: self.source.clone(),
            target: other.target.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.then(b))
                .collect(),
        }
    }

    /// `q ∗ self` for `q` out of the common target.
    pub fn whisker_after(&self, q: &PseudoNat) -> Modification {
        Modification {
            source: q.after(&self.source),
            target: q.after(&self.target),
            components: self
                .components
                .iter()
                .enumerate()
                .map(|(u, n)| n.whisker_after(&q.components[u]))
                .collect(),
        }
    }

    /// `self ∗ r` for `r` into the common source.
    pub fn whisker_before(&self, r: &PseudoNat) -> Modification {
        Modification {
            source: self.source.after(r),
            target: self.target.after(r),
            components: self
                .components
                .iter()
                .enumerate()
                .map(|(u, n)| n.whisker_before(&r.components[u]))
                .collect(),
        }
    }
}

/// Checks the modification square for every site arrow.
pub fn validate_modification(m: &Modification) -> ValidationReport {
    let mut r = ValidationReport::new();
    let (p, q) = (&m.source, &m.target);
    if !same_pf(&p.source, &q.source) || !same_pf(&p.target, &q.target) {
        r.push(
            "modification between non-parallel transformations",
            Vec::<String>::new(),
        );
        return r;
    }
    let c = p.site().cat().clone();
    if m.components.len() != c.num_objects() {
        r.push("modification table size", Vec::<String>::new());
        return r;
    }
    for u in c.objects() {
        let n = &m.components[u];
        if n.source != p.components[u] || n.target != q.components[u] {
            r.push("modification component has wrong type", [c.object_id(u)]);
            continue;
        }
        r.extend_prefixed(&format!("component {}", c.object_id(u)), n.validate());
    }
    if !r.is_valid() {
        return r;
    }
    let (e, b) = (&p.source, &p.target);
    for t in c.morphisms() {
        let (v, u) = (c.dom(t), c.cod(t));
        let bv = b.fiber(v);
        for x in e.fiber(u).objects() {
            let lhs = bv.comp(q.coh(t, x), m.at(v, e.res_obj(t, x)));
            let rhs = bv.comp(b.res_mor(t, m.at(u, x)), p.coh(t, x));
            if lhs != rhs {
                r.push("modification square", [c.morphism_id(t), e.fiber(u).object_id(x)]);
            }
        }
    }
    r
}

#[cfg(test)]
mod tests;
