//! Descent data relative to a pseudonatural transformation `p: E → B` and a
//! cover, the comparison functor `Φ`, its functorialities, and the judgments
//! built on it: stacks, local fibrations and local weak equivalences.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::bound::{default_bound, Budget};
use crate::fincat::{is_equivalence, tuple_id, unique_preimage, FinCategory, Functor, NatTrans};
use crate::pstack::{bang, terminal_prestack, Modification, PseudoNat, Pseudofunctor};
use crate::site::{CoverFamily, Pullback, Sieve, Site};
use crate::validation::ValidationReport;
use crate::{Error, Result};

impl Sieve {
    /// The sieve's arrows as a cover family, in canonical order.
    pub fn to_family(&self) -> CoverFamily {
        CoverFamily {
            apex: self.apex,
            members: self.arrows.iter().copied().collect(),
        }
    }
}

/// The least object of each isomorphism class.
fn iso_representatives(c: &FinCategory) -> Vec<usize> {
    c.objects().filter(|&x| (0..x).all(|y| !c.isomorphic(y, x))).collect()
}

/// `(b, (e_α), (ψ_α), (ϑ_αβ))`; `theta` is row-major, `theta[α·n + β]`
/// maps `e_β|αβ → e_α|αβ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DescentObject {
    pub base: usize,
    pub sections: Vec<usize>,
    pub psi: Vec<usize>,
    pub theta: Vec<usize>,
}

/// `(g, (g_α))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DescentMorphism {
    pub base: usize,
    pub sections: Vec<usize>,
}

/// The chosen pullback of `(f_α ∘ p1^{αβ}, f_γ)` with the comparison arrows
/// into the other two double overlaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripleOverlap {
    pub apex: usize,
    /// into `U_αβ`
    pub q1: usize,
    /// into `U_γ`
    pub q2: usize,
    /// into `U_αγ`
    pub r13: usize,
    /// into `U_βγ`
    pub r23: usize,
}

/// A map and a cover together with every overlap the descent conditions
/// refer to. All object- and morphism-level operations live here; the full
/// category is [`DescentCategory`].
#[derive(Debug, Clone)]
pub struct DescentContext {
    pub p: PseudoNat,
    pub cover: CoverFamily,
    pairs: Vec<Pullback>,
    diagonals: Vec<usize>,
    triples: Vec<TripleOverlap>,
    /// ordered pairs in assignment order: all pairs among the first `k`
    /// members precede any pair involving member `k`
    pair_order: Vec<(usize, usize)>,
    /// triples whose last pair (in `pair_order`) is the given position
    triples_closing: Vec<Vec<(usize, usize, usize)>>,
}

impl DescentContext {
    pub fn new(p: &PseudoNat, cover: &CoverFamily) -> Result<DescentContext> {
        let site = p.site().clone();
        let c = site.cat().clone();
        let n = cover.members.len();
        for &f in &cover.members {
            if c.cod(f) != cover.apex {
                return Err(Error::shape("cover member with the wrong codomain"));
            }
        }
        let f = &cover.members;
        let mut pairs = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                pairs.push(site.pullback(f[a], f[b]));
            }
        }
        let mut diagonals = Vec::with_capacity(n);
        for &fa in f.iter() {
            let id = c.identity(c.dom(fa));
            diagonals.push(site.mediator(fa, fa, id, id)?);
        }
        let mut triples = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                let ab = pairs[a * n + b];
                for g in 0..n {
                    let left = c.comp(f[a], ab.p1);
                    let t = site.pullback(left, f[g]);
                    let (q1, q2) = (t.p1, t.p2);
                    let r13 = site.mediator(f[a], f[g], c.comp(ab.p1, q1), q2)?;
                    let r23 = site.mediator(f[b], f[g], c.comp(ab.p2, q1), q2)?;
                    triples.push(TripleOverlap {
                        apex: t.apex,
                        q1,
                        q2,
                        r13,
                        r23,
                    });
                }
            }
        }
        let mut pair_order: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        pair_order.sort_by_key(|&(a, b)| (a.max(b), a, b));
        let pos: HashMap<(usize, usize), usize> = pair_order.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut triples_closing = vec![Vec::new(); pair_order.len()];
        for a in 0..n {
            for b in 0..n {
                for g in 0..n {
                    let last = pos[&(a, b)].max(pos[&(b, g)]).max(pos[&(a, g)]);
                    triples_closing[last].push((a, b, g));
                }
            }
        }
        Ok(DescentContext {
            p: p.clone(),
            cover: cover.clone(),
            pairs,
            diagonals,
            triples,
            pair_order,
            triples_closing,
        })
    }

    pub fn len(&self) -> usize {
        self.cover.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cover.members.is_empty()
    }

    pub fn site(&self) -> &Arc<Site> {
        self.p.site()
    }

    pub fn cat(&self) -> &Arc<FinCategory> {
        self.p.site().cat()
    }

    /// `E`
    pub fn total(&self) -> &Arc<Pseudofunctor> {
        &self.p.source
    }

    /// `B`
    pub fn base(&self) -> &Arc<Pseudofunctor> {
        &self.p.target
    }

    pub fn apex(&self) -> usize {
        self.cover.apex
    }

    /// `U_α`
    pub fn member_domain(&self, a: usize) -> usize {
        self.cat().dom(self.cover.members[a])
    }

    pub fn pair(&self, a: usize, b: usize) -> Pullback {
        self.pairs[a * self.len() + b]
    }

    pub fn triple(&self, a: usize, b: usize, g: usize) -> TripleOverlap {
        let n = self.len();
        self.triples[(a * n + b) * n + g]
    }

    fn theta_at(&self, theta: &[usize], a: usize, b: usize) -> usize {
        theta[a * self.len() + b]
    }

    /// Source and target objects of `ϑ_αβ` in `E(U_αβ)`.
    pub fn theta_type(&self, sections: &[usize], a: usize, b: usize) -> (usize, usize) {
        let pb = self.pair(a, b);
        let e = self.total();
        (e.res_obj(pb.p2, sections[b]), e.res_obj(pb.p1, sections[a]))
    }

    fn theta_unit_holds(&self, sections: &[usize], a: usize, th: usize) -> bool {
        let e = self.total();
        let pb = self.pair(a, a);
        let d = self.diagonals[a];
        let ua = self.member_domain(a);
        let x = sections[a];
        let fib = e.fiber(ua);
        let there = e.reassoc(ua, x, &[], &[pb.p2, d]);
        let back = e.reassoc(ua, x, &[pb.p1, d], &[]);
        fib.is_identity(fib.comp(back, fib.comp(e.res_mor(d, th), there)))
    }

    fn compatibility_holds(
        &self,
        base: usize,
        sections: &[usize],
        psi: &[usize],
        a: usize,
        b: usize,
        th: usize,
    ) -> bool {
        let bb = self.base();
        let pb = self.pair(a, b);
        let f = &self.cover.members;
        let fib = bb.fiber(pb.apex);
        let u = self.apex();
        let lhs = fib.comp(
            bb.reassoc(u, base, &[f[b], pb.p2], &[f[a], pb.p1]),
            fib.comp(bb.res_mor(pb.p2, psi[b]), self.p.coh(pb.p2, sections[b])),
        );
        let rhs = fib.comp(
            bb.res_mor(pb.p1, psi[a]),
            fib.comp(self.p.coh(pb.p1, sections[a]), self.p.components[pb.apex].mor(th)),
        );
        lhs == rhs
    }

    /// `ϑ_βγ` carried to the triple overlap, as a map between the normal
    /// forms `e_γ·q2 → e_β·p2^{αβ}·q1`.
    fn normalized_theta(
        &self,
        sections: &[usize],
        theta: &[usize],
        a: usize,
        b: usize,
        g: usize,
        which: (usize, usize),
    ) -> usize {
        let e = self.total();
        let t = self.triple(a, b, g);
        let ab = self.pair(a, b);
        let fib = e.fiber(t.apex);
        let (i, j) = which;
        // normal-form path for member k at the triple overlap
        let norm = |k: usize| -> Vec<usize> {
            if k == 2 {
                vec![t.q2]
            } else if k == 0 {
                vec![ab.p1, t.q1]
            } else {
                vec![ab.p2, t.q1]
            }
        };
        let member = |k: usize| [a, b, g][k];
        let (r, pb) = match (i, j) {
            (0, 1) => (t.q1, ab),
            (0, 2) => (t.r13, self.pair(a, g)),
            (1, 2) => (t.r23, self.pair(b, g)),
            _ => unreachable!("pairs of the triple"),
        };
        let th = self.theta_at(theta, member(i), member(j));
        let (xi, xj) = (sections[member(i)], sections[member(j)]);
        let ui = self.member_domain(member(i));
        let uj = self.member_domain(member(j));
        let into = e.reassoc(uj, xj, &norm(j), &[pb.p2, r]);
        let out = e.reassoc(ui, xi, &[pb.p1, r], &norm(i));
        fib.comp(out, fib.comp(e.res_mor(r, th), into))
    }

    fn cocycle_holds(&self, sections: &[usize], theta: &[usize], a: usize, b: usize, g: usize) -> bool {
        let t = self.triple(a, b, g);
        let fib = self.total().fiber(t.apex);
        let ab = self.normalized_theta(sections, theta, a, b, g, (0, 1));
        let bg = self.normalized_theta(sections, theta, a, b, g, (1, 2));
        let ag = self.normalized_theta(sections, theta, a, b, g, (0, 2));
        fib.comp(ab, bg) == ag
    }

    /// Checks every descent-object condition.
    pub fn check_object(&self, d: &DescentObject) -> ValidationReport {
        let mut r = ValidationReport::new();
        let n = self.len();
        let (e, bb) = (self.total(), self.base());
        let u = self.apex();
        let f = &self.cover.members;
        if d.sections.len() != n || d.psi.len() != n || d.theta.len() != n * n {
            r.push("descent datum has the wrong shape", Vec::<String>::new());
            return r;
        }
        if d.base >= bb.fiber(u).num_objects() {
            r.push("base object out of range", Vec::<String>::new());
            return r;
        }
        for (a, &fa) in f.iter().enumerate() {
            let ua = self.member_domain(a);
            let (fe, fb) = (e.fiber(ua), bb.fiber(ua));
            if d.sections[a] >= fe.num_objects() || d.psi[a] >= fb.num_morphisms() {
                r.push("section out of range", [a.to_string()]);
                continue;
            }
            let want = (self.p.components[ua].obj(d.sections[a]), bb.res_obj(fa, d.base));
            let psi = d.psi[a];
            if (fb.dom(psi), fb.cod(psi)) != want || !fb.is_iso(psi) {
                r.push("psi has the wrong type or is not invertible", [a.to_string()]);
            }
        }
        if !r.is_valid() {
            return r;
        }
        for a in 0..n {
            for b in 0..n {
                let th = d.theta[a * n + b];
                let fib = e.fiber(self.pair(a, b).apex);
                let (s, t) = self.theta_type(&d.sections, a, b);
                if th >= fib.num_morphisms() || (fib.dom(th), fib.cod(th)) != (s, t) || !fib.is_iso(th) {
                    r.push(
                        "theta has the wrong type or is not invertible",
                        [a.to_string(), b.to_string()],
                    );
                }
            }
        }
        if !r.is_valid() {
            return r;
        }
        for a in 0..n {
            if !self.theta_unit_holds(&d.sections, a, d.theta[a * n + a]) {
                r.push("theta on the diagonal is not the identity", [a.to_string()]);
            }
            for b in 0..n {
                let th = d.theta[a * n + b];
                if !self.compatibility_holds(d.base, &d.sections, &d.psi, a, b, th) {
                    r.push("compatibility with p", [a.to_string(), b.to_string()]);
                }
                for g in 0..n {
                    if !self.cocycle_holds(&d.sections, &d.theta, a, b, g) {
                        r.push("cocycle", [a.to_string(), b.to_string(), g.to_string()]);
                    }
                }
            }
        }
        r
    }

    fn psi_square_holds(&self, s: &DescentObject, t: &DescentObject, base: usize, a: usize, ga: usize) -> bool {
        let bb = self.base();
        let ua = self.member_domain(a);
        let fib = bb.fiber(ua);
        let f = self.cover.members[a];
        fib.comp(t.psi[a], self.p.components[ua].mor(ga)) == fib.comp(bb.res_mor(f, base), s.psi[a])
    }

    fn theta_square_holds(&self, s: &DescentObject, t: &DescentObject, a: usize, b: usize, sections: &[usize]) -> bool {
        let e = self.total();
        let n = self.len();
        let pb = self.pair(a, b);
        let fib = e.fiber(pb.apex);
        fib.comp(t.theta[a * n + b], e.res_mor(pb.p2, sections[b]))
            == fib.comp(e.res_mor(pb.p1, sections[a]), s.theta[a * n + b])
    }

    /// Checks that `m` is a morphism of descent data `s → t`.
    pub fn check_morphism(&self, s: &DescentObject, t: &DescentObject, m: &DescentMorphism) -> ValidationReport {
        let mut r = ValidationReport::new();
        let n = self.len();
        let (e, bb) = (self.total(), self.base());
        let fu = bb.fiber(self.apex());
        if m.sections.len() != n || m.base >= fu.num_morphisms() {
            r.push("descent morphism has the wrong shape", Vec::<String>::new());
            return r;
        }
        if (fu.dom(m.base), fu.cod(m.base)) != (s.base, t.base) {
            r.push("base component has the wrong type", Vec::<String>::new());
        }
        for a in 0..n {
            let fe = e.fiber(self.member_domain(a));
            let ga = m.sections[a];
            if ga >= fe.num_morphisms() || (fe.dom(ga), fe.cod(ga)) != (s.sections[a], t.sections[a]) {
                r.push("section component has the wrong type", [a.to_string()]);
            }
        }
        if !r.is_valid() {
            return r;
        }
        for a in 0..n {
            if !self.psi_square_holds(s, t, m.base, a, m.sections[a]) {
                r.push("psi square", [a.to_string()]);
            }
            for b in 0..n {
                if !self.theta_square_holds(s, t, a, b, &m.sections) {
                    r.push("theta square", [a.to_string(), b.to_string()]);
                }
            }
        }
        r
    }

    /// Visits every descent object in canonical order: by base object,
    /// then sections and `ψ` member by member, then `ϑ` in pair order.
    pub fn for_each_object<F>(&self, budget: &Budget, visit: F) -> Result<()>
    where
        F: FnMut(DescentObject) -> ControlFlow<()>,
    {
        self.enumerate(false, budget, visit)
    }

    /// Like [`Self::for_each_object`], but base and sections range over one
    /// representative per isomorphism class. Transporting `ψ` and `ϑ` along
    /// isomorphisms shows that every descent object is isomorphic to one
    /// visited here.
    pub fn for_each_object_up_to_iso<F>(&self, budget: &Budget, visit: F) -> Result<()>
    where
        F: FnMut(DescentObject) -> ControlFlow<()>,
    {
        self.enumerate(true, budget, visit)
    }

    fn enumerate<F>(&self, reps_only: bool, budget: &Budget, mut visit: F) -> Result<()>
    where
        F: FnMut(DescentObject) -> ControlFlow<()>,
    {
        let bb = self.base();
        let n = self.len();
        let mut stop = false;
        let candidates = |c: &FinCategory| -> Vec<usize> {
            if reps_only {
                iso_representatives(c)
            } else {
                c.objects().collect()
            }
        };
        let section_candidates: Vec<Vec<usize>> = (0..n)
            .map(|a| candidates(self.total().fiber(self.member_domain(a))))
            .collect();
        for base in candidates(bb.fiber(self.apex())) {
            let mut sections = Vec::with_capacity(n);
            let mut psi = Vec::with_capacity(n);
            self.choose_sections(
                base,
                &section_candidates,
                &mut sections,
                &mut psi,
                budget,
                &mut visit,
                &mut stop,
            )?;
            if stop {
                break;
            }
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn choose_sections<F>(
        &self,
        base: usize,
        candidates: &[Vec<usize>],
        sections: &mut Vec<usize>,
        psi: &mut Vec<usize>,
        budget: &Budget,
        visit: &mut F,
        stop: &mut bool,
    ) -> Result<()>
    where
        F: FnMut(DescentObject) -> ControlFlow<()>,
    {
        let a = sections.len();
        let n = self.len();
        if a == n {
            let mut theta = vec![usize::MAX; n * n];
            return self.choose_theta(base, sections, psi, &mut theta, 0, budget, visit, stop);
        }
        let bb = self.base();
        let ua = self.member_domain(a);
        let target = bb.res_obj(self.cover.members[a], base);
        let fb = bb.fiber(ua);
        for &x in &candidates[a] {
            let px = self.p.components[ua].obj(x);
            for ps in fb.isos(px, target).collect::<Vec<_>>() {
                budget.tick()?;
                sections.push(x);
                psi.push(ps);
                self.choose_sections(base, candidates, sections, psi, budget, visit, stop)?;
                sections.pop();
                psi.pop();
                if *stop {
                    return Ok(());
                }
            }
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn choose_theta<F>(
        &self,
        base: usize,
        sections: &[usize],
        psi: &[usize],
        theta: &mut Vec<usize>,
        k: usize,
        budget: &Budget,
        visit: &mut F,
        stop: &mut bool,
    ) -> Result<()>
    where
        F: FnMut(DescentObject) -> ControlFlow<()>,
    {
        let n = self.len();
        if k == self.pair_order.len() {
            let d = DescentObject {
                base,
                sections: sections.to_vec(),
                psi: psi.to_vec(),
                theta: theta.clone(),
            };
            debug_assert!(self.check_object(&d).is_valid());
            if visit(d).is_break() {
                *stop = true;
            }
            return Ok(());
        }
        let (a, b) = self.pair_order[k];
        let e = self.total();
        let fib = e.fiber(self.pair(a, b).apex);
        let (s, t) = self.theta_type(sections, a, b);
        for th in fib.isos(s, t).collect::<Vec<_>>() {
            budget.tick()?;
            if a == b && !self.theta_unit_holds(sections, a, th) {
                continue;
            }
            if !self.compatibility_holds(base, sections, psi, a, b, th) {
                continue;
            }
            theta[a * n + b] = th;
            let ok = self.triples_closing[k]
                .iter()
                .all(|&(x, y, z)| self.cocycle_holds(sections, theta, x, y, z));
            if ok {
                self.choose_theta(base, sections, psi, theta, k + 1, budget, visit, stop)?;
            }
            theta[a * n + b] = usize::MAX;
            if *stop {
                break;
            }
        }
        Ok(())
    }

    /// Every descent object, in canonical order.
    pub fn objects(&self, bound: u64) -> Result<Vec<DescentObject>> {
        let budget = Budget::new(bound, "enumerating descent data");
        let mut out = Vec::new();
        self.for_each_object(&budget, |d| {
            out.push(d);
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }

    /// Every descent morphism `s → t` (only invertible ones with
    /// `isos_only`), in canonical order.
    pub fn morphisms_between(
        &self,
        s: &DescentObject,
        t: &DescentObject,
        isos_only: bool,
        budget: &Budget,
    ) -> Result<Vec<DescentMorphism>> {
        let n = self.len();
        let fu = self.base().fiber(self.apex());
        let mut out = Vec::new();
        let bases: Vec<usize> = if isos_only {
            fu.isos(s.base, t.base).collect()
        } else {
            fu.hom(s.base, t.base).to_vec()
        };
        // pairs checked as soon as both members are assigned
        let mut closing: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for a in 0..n {
            for b in 0..n {
                closing[a.max(b)].push((a, b));
            }
        }
        for g in bases {
            budget.tick()?;
            let mut sections = Vec::with_capacity(n);
            self.choose_components(s, t, g, &mut sections, &closing, isos_only, budget, &mut out)?;
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn choose_components(
        &self,
        s: &DescentObject,
        t: &DescentObject,
        g: usize,
        sections: &mut Vec<usize>,
        closing: &[Vec<(usize, usize)>],
        isos_only: bool,
        budget: &Budget,
        out: &mut Vec<DescentMorphism>,
    ) -> Result<()> {
        let a = sections.len();
        if a == self.len() {
            out.push(DescentMorphism {
                base: g,
                sections: sections.clone(),
            });
            return Ok(());
        }
        let fe = self.total().fiber(self.member_domain(a));
        let candidates: Vec<usize> = if isos_only {
            fe.isos(s.sections[a], t.sections[a]).collect()
        } else {
            fe.hom(s.sections[a], t.sections[a]).to_vec()
        };
        for ga in candidates {
            budget.tick()?;
            if !self.psi_square_holds(s, t, g, a, ga) {
                continue;
            }
            sections.push(ga);
            let ok = closing[a]
                .iter()
                .all(|&(x, y)| self.theta_square_holds(s, t, x, y, sections));
            if ok {
                self.choose_components(s, t, g, sections, closing, isos_only, budget, out)?;
            }
            sections.pop();
        }
        Ok(())
    }

    pub fn identity(&self, d: &DescentObject) -> DescentMorphism {
        let e = self.total();
        DescentMorphism {
            base: self.base().fiber(self.apex()).identity(d.base),
            sections: (0..self.len())
                .map(|a| e.fiber(self.member_domain(a)).identity(d.sections[a]))
                .collect(),
        }
    }

    /// `g ∘ f`, componentwise.
    pub fn compose(&self, g: &DescentMorphism, f: &DescentMorphism) -> DescentMorphism {
        let e = self.total();
        DescentMorphism {
            base: self.base().fiber(self.apex()).comp(g.base, f.base),
            sections: (0..self.len())
                .map(|a| e.fiber(self.member_domain(a)).comp(g.sections[a], f.sections[a]))
                .collect(),
        }
    }

    /// Componentwise inverse of an invertible descent morphism.
    pub fn inverse(&self, m: &DescentMorphism) -> Option<DescentMorphism> {
        let e = self.total();
        Some(DescentMorphism {
            base: self.base().fiber(self.apex()).inverse(m.base)?,
            sections: (0..self.len())
                .map(|a| e.fiber(self.member_domain(a)).inverse(m.sections[a]))
                .collect::<Option<Vec<_>>>()?,
        })
    }

    /// `Φ(e) = (p(e), (e·f_α), (coherence of p), (σ_αβ(e)))`.
    pub fn phi_object(&self, x: usize) -> DescentObject {
        let e = self.total();
        let u = self.apex();
        let n = self.len();
        let f = &self.cover.members;
        let mut theta = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let pb = self.pair(a, b);
                theta.push(e.reassoc(u, x, &[f[b], pb.p2], &[f[a], pb.p1]));
            }
        }
        DescentObject {
            base: self.p.components[u].obj(x),
            sections: f.iter().map(|&fa| e.res_obj(fa, x)).collect(),
            psi: f.iter().map(|&fa| self.p.coh(fa, x)).collect(),
            theta,
        }
    }

    /// `Φ(m) = (p(m), (m·f_α))`.
    pub fn phi_morphism(&self, m: usize) -> DescentMorphism {
        let e = self.total();
        DescentMorphism {
            base: self.p.components[self.apex()].mor(m),
            sections: self.cover.members.iter().map(|&fa| e.res_mor(fa, m)).collect(),
        }
    }

    /// The unique `m: x → y` in `E(U)` with `Φ(m) = dm`, if any.
    pub fn phi_preimage(&self, x: usize, y: usize, dm: &DescentMorphism) -> Option<usize> {
        let fib = self.total().fiber(self.apex());
        fib.hom(x, y).iter().copied().find(|&m| self.phi_morphism(m) == *dm)
    }

    /// Human-readable identifiers of a descent object.
    pub fn describe_object(&self, d: &DescentObject) -> String {
        let (e, bb) = (self.total(), self.base());
        let mut parts = vec![bb.fiber(self.apex()).object_id(d.base).to_string()];
        for a in 0..self.len() {
            let ua = self.member_domain(a);
            parts.push(e.fiber(ua).object_id(d.sections[a]).to_string());
            parts.push(bb.fiber(ua).morphism_id(d.psi[a]).to_string());
        }
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                let fib = e.fiber(self.pair(a, b).apex);
                parts.push(fib.morphism_id(d.theta[a * n + b]).to_string());
            }
        }
        tuple_id(&parts)
    }

    pub fn describe_morphism(&self, m: &DescentMorphism) -> String {
        let (e, bb) = (self.total(), self.base());
        let mut parts = vec![bb.fiber(self.apex()).morphism_id(m.base).to_string()];
        for a in 0..self.len() {
            parts.push(e.fiber(self.member_domain(a)).morphism_id(m.sections[a]).to_string());
        }
        tuple_id(&parts)
    }
}

/// `Desc(p, S)` as a finite category with its projection to `B(U)`.
#[derive(Debug, Clone)]
pub struct DescentCategory {
    pub ctx: DescentContext,
    pub objects: Vec<DescentObject>,
    /// `(source, target, morphism)` indexed like `cat`'s morphisms
    pub morphisms: Vec<(usize, usize, DescentMorphism)>,
    pub cat: Arc<FinCategory>,
    pub pi: Functor,
    obj_index: HashMap<DescentObject, usize>,
    mor_index: HashMap<(usize, usize, DescentMorphism), usize>,
}

/// Builds `Desc(p, S)` exhaustively.
pub fn build_descent_category(p: &PseudoNat, cover: &CoverFamily) -> Result<DescentCategory> {
    build_descent_category_bounded(p, cover, default_bound())
}

pub fn build_descent_category_bounded(p: &PseudoNat, cover: &CoverFamily, bound: u64) -> Result<DescentCategory> {
    let ctx = DescentContext::new(p, cover)?;
    let budget = Budget::new(bound, "building a descent category");
    let mut raw_objects = Vec::new();
    ctx.for_each_object(&budget, |d| {
        raw_objects.push(d);
        ControlFlow::Continue(())
    })?;
    let mut raw_morphisms = Vec::new();
    for (i, s) in raw_objects.iter().enumerate() {
        for (j, t) in raw_objects.iter().enumerate() {
            for m in ctx.morphisms_between(s, t, false, &budget)? {
                raw_morphisms.push((i, j, m));
            }
        }
    }
    let obj_ids: Vec<String> = raw_objects.iter().map(|d| ctx.describe_object(d)).collect();
    let mor_ids: Vec<String> = raw_morphisms
        .iter()
        .map(|(i, j, m)| tuple_id(&[&obj_ids[*i], &obj_ids[*j], &ctx.describe_morphism(m)]))
        .collect();
    let raw_mor_index: HashMap<(usize, usize, DescentMorphism), usize> = raw_morphisms
        .iter()
        .enumerate()
        .map(|(k, (i, j, m))| ((*i, *j, m.clone()), k))
        .collect();
    let identity: Vec<Option<usize>> = raw_objects
        .iter()
        .enumerate()
        .map(|(i, d)| raw_mor_index.get(&(i, i, ctx.identity(d))).copied())
        .collect();
    let assembled = FinCategory::assemble(
        obj_ids,
        raw_morphisms
            .iter()
            .zip(mor_ids)
            .map(|((i, j, _), id)| (id, *i, *j))
            .collect(),
        identity,
        |g, f| {
            let (i, j, mf) = &raw_morphisms[f];
            let (j2, k, mg) = &raw_morphisms[g];
            if j != j2 {
                return None;
            }
            raw_mor_index.get(&(*i, *k, ctx.compose(mg, mf))).copied()
        },
    )?;
    let mut objects = vec![None; raw_objects.len()];
    for (old, d) in raw_objects.into_iter().enumerate() {
        objects[assembled.objects[old]] = Some(d);
    }
    let objects: Vec<DescentObject> = objects.into_iter().map(|d| d.expect("permutation")).collect();
    let mut morphisms = vec![None; raw_morphisms.len()];
    for (old, (i, j, m)) in raw_morphisms.into_iter().enumerate() {
        morphisms[assembled.morphisms[old]] = Some((assembled.objects[i], assembled.objects[j], m));
    }
    let morphisms: Vec<(usize, usize, DescentMorphism)> =
        morphisms.into_iter().map(|m| m.expect("permutation")).collect();
    let cat = assembled.category;
    let obj_index = objects.iter().enumerate().map(|(i, d)| (d.clone(), i)).collect();
    let mor_index = morphisms
        .iter()
        .enumerate()
        .map(|(k, (i, j, m))| ((*i, *j, m.clone()), k))
        .collect();
    let pi = Functor {
        source: cat.clone(),
        target: p.target.fiber(cover.apex).clone(),
        obj_map: objects.iter().map(|d| d.base).collect(),
        mor_map: morphisms.iter().map(|(_, _, m)| m.base).collect(),
    };
    Ok(DescentCategory {
        ctx,
        objects,
        morphisms,
        cat,
        pi,
        obj_index,
        mor_index,
    })
}

impl DescentCategory {
    pub fn object_index(&self, d: &DescentObject) -> Option<usize> {
        self.obj_index.get(d).copied()
    }

    pub fn morphism_index(&self, s: usize, t: usize, m: &DescentMorphism) -> Option<usize> {
        self.mor_index.get(&(s, t, m.clone())).copied()
    }

    /// A functor into this category from object and morphism assignments
    /// given as raw descent data.
    pub fn functor_from(
        &self,
        source: &Arc<FinCategory>,
        obj: impl Fn(usize) -> DescentObject,
        mor: impl Fn(usize) -> DescentMorphism,
    ) -> Result<Functor> {
        let obj_map = source
            .objects()
            .map(|x| {
                let d = obj(x);
                self.object_index(&d)
                    .ok_or_else(|| Error::shape(format!("not a descent object: {}", self.ctx.describe_object(&d))))
            })
            .collect::<Result<Vec<_>>>()?;
        let mor_map = source
            .morphisms()
            .map(|m| {
                let dm = mor(m);
                let (s, t) = (obj_map[source.dom(m)], obj_map[source.cod(m)]);
                self.morphism_index(s, t, &dm)
                    .ok_or_else(|| Error::shape(format!("not a descent morphism: {}", self.ctx.describe_morphism(&dm))))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Functor {
            source: source.clone(),
            target: self.cat.clone(),
            obj_map,
            mor_map,
        })
    }
}

/// `Φ_S: E(U) → Desc(p, S)`.
pub fn phi(d: &DescentCategory) -> Result<Functor> {
    let ctx = &d.ctx;
    let source = ctx.total().fiber(ctx.apex()).clone();
    d.functor_from(&source, |x| ctx.phi_object(x), |m| ctx.phi_morphism(m))
}

/// The 2-cell data of a square from `i: A → C` to `p: E → B`:
/// `h: A → E`, `k: C → B`, `γ: p∘h ⇒ k∘i`.
#[derive(Debug, Clone)]
pub struct SquareData<'a> {
    pub h: &'a PseudoNat,
    pub k: &'a PseudoNat,
    pub gamma: &'a Modification,
}

/// The object part of `(h, k, γ)_*`: `(c, a_α, ψ, ϑ) ↦ (k c, h a_α, ψ̂, ϑ̂)`.
pub fn pushforward_object(
    sq: &SquareData<'_>,
    from: &DescentContext,
    to: &DescentContext,
    d: &DescentObject,
) -> DescentObject {
    let n = from.len();
    let (h, k) = (sq.h, sq.k);
    let f = &from.cover.members;
    let bb = to.base();
    let eb = to.total();
    let u = from.apex();
    let sections: Vec<usize> = (0..n)
        .map(|a| h.components[from.member_domain(a)].obj(d.sections[a]))
        .collect();
    let psi = (0..n)
        .map(|a| {
            let ua = from.member_domain(a);
            let fib = bb.fiber(ua);
            let g = sq.gamma.components[ua].at(d.sections[a]);
            fib.comp(k.coh(f[a], d.base), fib.comp(k.components[ua].mor(d.psi[a]), g))
        })
        .collect();
    let mut theta = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let pb = from.pair(a, b);
            let fib = eb.fiber(pb.apex);
            let th = h.components[pb.apex].mor(d.theta[a * n + b]);
            let into = fib.inv(h.coh(pb.p2, d.sections[b]));
            let out = h.coh(pb.p1, d.sections[a]);
            theta.push(fib.comp(out, fib.comp(th, into)));
        }
    }
    DescentObject {
        base: k.components[u].obj(d.base),
        sections,
        psi,
        theta,
    }
}

pub fn pushforward_morphism(sq: &SquareData<'_>, from: &DescentContext, m: &DescentMorphism) -> DescentMorphism {
    DescentMorphism {
        base: sq.k.components[from.apex()].mor(m.base),
        sections: (0..from.len())
            .map(|a| sq.h.components[from.member_domain(a)].mor(m.sections[a]))
            .collect(),
    }
}

/// `(h, k, γ)_*: Desc(i, S) → Desc(p, S)`.
pub fn pushforward_square(sq: &SquareData<'_>, from: &DescentCategory, to: &DescentCategory) -> Result<Functor> {
    to.functor_from(
        &from.cat,
        |x| pushforward_object(sq, &from.ctx, &to.ctx, &from.objects[x]),
        |m| pushforward_morphism(sq, &from.ctx, &from.morphisms[m].2),
    )
}

/// The component of `γ̂: Φ∘h ⇒ (h, k, γ)_*∘Φ` at `a ∈ A(U)`:
/// `(γ(a), (h(a)·f_α → h(a·f_α)))`.
pub fn gamma_hat_component(sq: &SquareData<'_>, from: &DescentContext, a: usize) -> DescentMorphism {
    let u = from.apex();
    let h = sq.h;
    let e = &h.target;
    DescentMorphism {
        base: sq.gamma.components[u].at(a),
        sections: from
            .cover
            .members
            .iter()
            .map(|&fa| e.fiber(e.cat().dom(fa)).inv(h.coh(fa, a)))
            .collect(),
    }
}

/// `γ̂` as a natural isomorphism between functors `A(U) → Desc(p, S)`.
pub fn gamma_hat(sq: &SquareData<'_>, from: &DescentCategory, to: &DescentCategory) -> Result<NatTrans> {
    let u = from.ctx.apex();
    let h_u = &sq.h.components[u];
    let phi_to = phi(to)?;
    let phi_from = phi(from)?;
    let push = pushforward_square(sq, from, to)?;
    let source = phi_to.after(h_u);
    let target = push.after(&phi_from);
    let components = h_u
        .source
        .objects()
        .map(|a| {
            let m = gamma_hat_component(sq, &from.ctx, a);
            to.morphism_index(source.obj(a), target.obj(a), &m)
                .ok_or_else(|| Error::shape("gamma-hat component is not a descent morphism"))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = NatTrans {
        source,
        target,
        components,
    };
    n.validate().into_result("gamma-hat")?;
    Ok(n)
}

/// Positions in `cover` of the members of `sub`.
pub fn subcover_positions(cover: &CoverFamily, sub: &CoverFamily) -> Result<Vec<usize>> {
    if cover.apex != sub.apex {
        return Err(Error::ApexMismatch(cover.apex.to_string(), sub.apex.to_string()));
    }
    sub.members
        .iter()
        .map(|m| {
            cover
                .members
                .iter()
                .position(|x| x == m)
                .ok_or_else(|| Error::shape("subcover member missing from the cover"))
        })
        .collect()
}

pub fn restrict_object(positions: &[usize], n: usize, d: &DescentObject) -> DescentObject {
    let mut theta = Vec::with_capacity(positions.len() * positions.len());
    for &a in positions {
        for &b in positions {
            theta.push(d.theta[a * n + b]);
        }
    }
    DescentObject {
        base: d.base,
        sections: positions.iter().map(|&a| d.sections[a]).collect(),
        psi: positions.iter().map(|&a| d.psi[a]).collect(),
        theta,
    }
}

pub fn restrict_morphism(positions: &[usize], m: &DescentMorphism) -> DescentMorphism {
    DescentMorphism {
        base: m.base,
        sections: positions.iter().map(|&a| m.sections[a]).collect(),
    }
}

/// `(·)|_R: Desc(p, S) → Desc(p, R)` for `R ⊆ S`.
pub fn restrict_to_subcover(from: &DescentCategory, to: &DescentCategory) -> Result<Functor> {
    let pos = subcover_positions(&from.ctx.cover, &to.ctx.cover)?;
    let n = from.ctx.len();
    to.functor_from(
        &from.cat,
        |x| restrict_object(&pos, n, &from.objects[x]),
        |m| restrict_morphism(&pos, &from.morphisms[m].2),
    )
}

/// How a cover of `V` sits over a cover of `U` along `g: V → U`: each new
/// member `k_j: W_j → V` comes with an old member `α(j)` and an arrow
/// `c_j: W_j → U_α(j)` such that `f_α(j) ∘ c_j = g ∘ k_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PulledBackCover {
    pub along: usize,
    pub cover: CoverFamily,
    pub origin: Vec<usize>,
    pub lift: Vec<usize>,
}

impl PulledBackCover {
    /// The family `(U_α ×_U V → V)` of chosen pullbacks.
    pub fn of_family(site: &Site, cover: &CoverFamily, g: usize) -> PulledBackCover {
        let c = site.cat();
        let v = c.dom(g);
        let mut members = Vec::new();
        let mut lift = Vec::new();
        for &fa in &cover.members {
            let pb = site.pullback(fa, g);
            members.push(pb.p2);
            lift.push(pb.p1);
        }
        PulledBackCover {
            along: g,
            cover: CoverFamily { apex: v, members },
            origin: (0..cover.members.len()).collect(),
            lift,
        }
    }

    /// For a cover given by all arrows of a sieve: the arrows of the
    /// pulled-back sieve, each sitting over its composite with `g`.
    pub fn of_sieve(site: &Site, cover: &CoverFamily, g: usize) -> PulledBackCover {
        let c = site.cat();
        let v = c.dom(g);
        let mut members = Vec::new();
        let mut origin = Vec::new();
        let mut lift = Vec::new();
        for &k in c.arrows_into(v) {
            let gk = c.comp(g, k);
            if let Some(a) = cover.members.iter().position(|&x| x == gk) {
                members.push(k);
                origin.push(a);
                lift.push(c.identity(c.dom(k)));
            }
        }
        PulledBackCover {
            along: g,
            cover: CoverFamily { apex: v, members },
            origin,
            lift,
        }
    }
}

pub fn base_change_object(
    from: &DescentContext,
    to: &DescentContext,
    pc: &PulledBackCover,
    d: &DescentObject,
) -> Result<DescentObject> {
    let site = from.site();
    let c = site.cat();
    let (e, bb) = (from.total(), from.base());
    let u = from.apex();
    let g = pc.along;
    let m = to.len();
    let n = from.len();
    let f = &from.cover.members;
    let sections: Vec<usize> = (0..m)
        .map(|j| e.res_obj(pc.lift[j], d.sections[pc.origin[j]]))
        .collect();
    let psi = (0..m)
        .map(|j| {
            let a = pc.origin[j];
            let cj = pc.lift[j];
            let wj = c.dom(cj);
            let fib = bb.fiber(wj);
            let re = bb.reassoc(u, d.base, &[f[a], cj], &[g, pc.cover.members[j]]);
            fib.comp(re, fib.comp(bb.res_mor(cj, d.psi[a]), from.p.coh(cj, d.sections[a])))
        })
        .collect();
    let mut theta = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let (a, b) = (pc.origin[i], pc.origin[j]);
            let new = to.pair(i, j);
            let old = from.pair(a, b);
            let med = site.mediator(f[a], f[b], c.comp(pc.lift[i], new.p1), c.comp(pc.lift[j], new.p2))?;
            let fib = e.fiber(new.apex);
            let ua = from.member_domain(a);
            let ub = from.member_domain(b);
            let into = e.reassoc(ub, d.sections[b], &[pc.lift[j], new.p2], &[old.p2, med]);
            let out = e.reassoc(ua, d.sections[a], &[old.p1, med], &[pc.lift[i], new.p1]);
            theta.push(fib.comp(out, fib.comp(e.res_mor(med, d.theta[a * n + b]), into)));
        }
    }
    Ok(DescentObject {
        base: bb.res_obj(g, d.base),
        sections,
        psi,
        theta,
    })
}

pub fn base_change_morphism(from: &DescentContext, pc: &PulledBackCover, m: &DescentMorphism) -> DescentMorphism {
    let (e, bb) = (from.total(), from.base());
    DescentMorphism {
        base: bb.res_mor(pc.along, m.base),
        sections: (0..pc.cover.members.len())
            .map(|j| e.res_mor(pc.lift[j], m.sections[pc.origin[j]]))
            .collect(),
    }
}

/// `Desc(p, S) → Desc(p, g*S)` along `g: V → U`; `to` must be built over
/// `pc.cover`.
pub fn base_change(from: &DescentCategory, to: &DescentCategory, pc: &PulledBackCover) -> Result<Functor> {
    if to.ctx.cover != pc.cover {
        return Err(Error::shape(
            "target descent category is not over the pulled-back cover",
        ));
    }
    let objs = from
        .objects
        .iter()
        .map(|d| base_change_object(&from.ctx, &to.ctx, pc, d))
        .collect::<Result<Vec<_>>>()?;
    to.functor_from(
        &from.cat,
        |x| objs[x].clone(),
        |m| base_change_morphism(&from.ctx, pc, &from.morphisms[m].2),
    )
}

/// Which covers a cover condition quantifies over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoverMode {
    /// basis families (or covering sieves for sites without a basis)
    #[default]
    Basis,
    /// every covering sieve, as the family of its arrows
    Sieves,
}

pub fn covers_of(site: &Site, u: usize, mode: CoverMode) -> Vec<CoverFamily> {
    match mode {
        CoverMode::Basis => site.test_families(u),
        CoverMode::Sieves => site.covering_sieves(u).iter().map(Sieve::to_family).collect(),
    }
}

/// Why `Φ_S` fails to be an equivalence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FibrationWitness {
    pub object: String,
    pub cover: Vec<String>,
    /// `not full`, `not faithful` or `not essentially surjective`
    pub reason: String,
    pub detail: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FibrationDecision {
    pub holds: bool,
    pub witness: Option<FibrationWitness>,
}

/// Decides whether `Φ_S` is an equivalence without tabulating `Desc(p, S)`:
/// hom sets are compared pairwise, and descent data are streamed once
/// against the images of `E(U)`.
pub fn check_comparison(p: &PseudoNat, cover: &CoverFamily, bound: u64) -> Result<Option<FibrationWitness>> {
    check_cover(p, cover, false, bound)
}

/// Only the faithfulness part of [`check_comparison`].
pub fn check_faithful(p: &PseudoNat, cover: &CoverFamily, bound: u64) -> Result<Option<FibrationWitness>> {
    check_cover(p, cover, true, bound)
}

fn check_cover(
    p: &PseudoNat,
    cover: &CoverFamily,
    faithful_only: bool,
    bound: u64,
) -> Result<Option<FibrationWitness>> {
    let ctx = DescentContext::new(p, cover)?;
    let budget = Budget::new(bound, "checking a descent comparison");
    let c = p.site().cat();
    let u = cover.apex;
    let fe = ctx.total().fiber(u).clone();
    let images: Vec<DescentObject> = fe.objects().map(|x| ctx.phi_object(x)).collect();
    let witness = |reason: &str, detail: Vec<String>| FibrationWitness {
        object: c.object_id(u).to_string(),
        cover: cover.members.iter().map(|&m| c.morphism_id(m).to_string()).collect(),
        reason: reason.to_string(),
        detail,
    };
    let mut not_full = None;
    for x in fe.objects() {
        for y in fe.objects() {
            let mut seen: HashMap<DescentMorphism, usize> = HashMap::new();
            for &m in fe.hom(x, y) {
                budget.tick()?;
                let dm = ctx.phi_morphism(m);
                if let Some(&prev) = seen.get(&dm) {
                    return Ok(Some(witness(
                        "not faithful",
                        vec![fe.morphism_id(prev).to_string(), fe.morphism_id(m).to_string()],
                    )));
                }
                seen.insert(dm, m);
            }
            if !faithful_only && not_full.is_none() {
                let all = ctx.morphisms_between(&images[x], &images[y], false, &budget)?;
                if let Some(dm) = all.into_iter().find(|dm| !seen.contains_key(dm)) {
                    not_full = Some(vec![
                        fe.object_id(x).to_string(),
                        fe.object_id(y).to_string(),
                        ctx.describe_morphism(&dm),
                    ]);
                }
            }
        }
    }
    if let Some(detail) = not_full {
        return Ok(Some(witness("not full", detail)));
    }
    if faithful_only {
        return Ok(None);
    }
    // isomorphic objects have isomorphic images
    let reps: Vec<&DescentObject> = iso_representatives(&fe).into_iter().map(|x| &images[x]).collect();
    let mut missing: Option<DescentObject> = None;
    let mut failure = None;
    ctx.for_each_object_up_to_iso(&budget, |d| {
        let hit = reps.iter().try_fold(false, |found, img| {
            if found {
                return Ok(true);
            }
            Ok::<bool, Error>(!ctx.morphisms_between(img, &d, true, &budget)?.is_empty())
        });
        match hit {
            Ok(true) => ControlFlow::Continue(()),
            Ok(false) => {
                missing = Some(d);
                ControlFlow::Break(())
            }
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(missing.map(|d| witness("not essentially surjective", vec![ctx.describe_object(&d)])))
}

/// Decides whether `Φ_S` is an equivalence for every object and cover.
pub fn is_local_fibration(p: &PseudoNat) -> Result<FibrationDecision> {
    is_local_fibration_with(p, CoverMode::Basis, default_bound())
}

pub fn is_local_fibration_with(p: &PseudoNat, mode: CoverMode, bound: u64) -> Result<FibrationDecision> {
    let site = p.site().clone();
    let jobs: Vec<CoverFamily> = site.cat().objects().flat_map(|u| covers_of(&site, u, mode)).collect();
    let results: Vec<Result<Option<FibrationWitness>>> = jobs
        .par_iter()
        .map(|cover| check_cover(p, cover, false, bound))
        .collect();
    for r in results {
        if let Some(w) = r? {
            return Ok(FibrationDecision {
                holds: false,
                witness: Some(w),
            });
        }
    }
    Ok(FibrationDecision {
        holds: true,
        witness: None,
    })
}

/// `F` is a stack iff `F → 1` is a local fibration.
pub fn is_stack(f: &Arc<Pseudofunctor>) -> Result<FibrationDecision> {
    is_stack_with(f, CoverMode::Basis, default_bound())
}

pub fn is_stack_with(f: &Arc<Pseudofunctor>, mode: CoverMode, bound: u64) -> Result<FibrationDecision> {
    let one = terminal_prestack(f.site());
    is_local_fibration_with(&bang(f, &one), mode, bound)
}

/// Why a map fails to be a local weak equivalence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LweWitness {
    /// `not full`, `not faithful` or `not locally essentially surjective`
    pub reason: String,
    pub object: String,
    pub detail: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LweDecision {
    pub holds: bool,
    pub witness: Option<LweWitness>,
}

/// Local preimages of `b` along a cover: `a_α` with `h(a_α) ≅ b·f_α`.
fn local_preimages(h: &PseudoNat, cover: &CoverFamily, b: usize) -> Option<Vec<(usize, usize)>> {
    let (a, bb) = (&h.source, &h.target);
    let c = h.site().cat();
    cover
        .members
        .iter()
        .map(|&fa| {
            let v = c.dom(fa);
            let target = bb.res_obj(fa, b);
            a.fiber(v).objects().find_map(|x| {
                bb.fiber(v)
                    .isos(h.components[v].obj(x), target)
                    .next()
                    .map(|iso| (x, iso))
            })
        })
        .collect()
}

/// Pointwise full and faithful, and locally essentially surjective.
pub fn is_lwe(h: &PseudoNat) -> Result<LweDecision> {
    is_lwe_with(h, CoverMode::Basis)
}

pub fn is_lwe_with(h: &PseudoNat, mode: CoverMode) -> Result<LweDecision> {
    let site = h.site().clone();
    let c = site.cat().clone();
    let fail = |reason: &str, u: usize, detail: Vec<String>| LweDecision {
        holds: false,
        witness: Some(LweWitness {
            reason: reason.to_string(),
            object: c.object_id(u).to_string(),
            detail,
        }),
    };
    for u in c.objects() {
        let dec = is_equivalence(&h.components[u]);
        if let Some((x, y)) = dec.not_faithful {
            return Ok(fail("not faithful", u, vec![x, y]));
        }
        if let Some((x, y, m)) = dec.not_full {
            return Ok(fail("not full", u, vec![x, y, m]));
        }
    }
    for u in c.objects() {
        for b in h.target.fiber(u).objects() {
            let found = covers_of(&site, u, mode)
                .iter()
                .any(|cover| local_preimages(h, cover, b).is_some());
            if !found {
                let id = h.target.fiber(u).object_id(b).to_string();
                return Ok(fail("not locally essentially surjective", u, vec![id]));
            }
        }
    }
    Ok(LweDecision {
        holds: true,
        witness: None,
    })
}

/// Descent data for `i` over a cover of `U` whose base is `c`, built from
/// local preimages; `ϑ` is the unique preimage of the comparison of the
/// local isomorphisms.
pub fn descent_from_lwe(i: &PseudoNat, u: usize, c: usize) -> Result<(DescentContext, DescentObject)> {
    descent_from_lwe_with(i, u, c, CoverMode::Basis)
}

pub fn descent_from_lwe_with(
    i: &PseudoNat,
    u: usize,
    c: usize,
    mode: CoverMode,
) -> Result<(DescentContext, DescentObject)> {
    let site = i.site().clone();
    let cat = site.cat().clone();
    for cu in cat.objects() {
        let dec = is_equivalence(&i.components[cu]);
        if !dec.full() || !dec.faithful() {
            return Err(Error::NotLwe(format!(
                "component at {} is not full and faithful",
                cat.object_id(cu)
            )));
        }
    }
    for cover in covers_of(&site, u, mode) {
        let ctx = DescentContext::new(i, &cover)?;
        if let Some(d) = descent_datum_over(&ctx, c)? {
            return Ok((ctx, d));
        }
    }
    let cc = &i.target;
    Err(Error::NotLwe(format!(
        "no cover of {} with local preimages of {}",
        cat.object_id(u),
        cc.fiber(u).object_id(c)
    )))
}

/// Descent data for `i` over the cover of `ctx` whose base is `c`, or `None`
/// when some member has no local preimage. `i` must be pointwise full and
/// faithful.
pub fn descent_datum_over(ctx: &DescentContext, c: usize) -> Result<Option<DescentObject>> {
    let i = &ctx.p;
    let u = ctx.apex();
    let (a, cc) = (&i.source, &i.target);
    let Some(local) = local_preimages(i, &ctx.cover, c) else {
        return Ok(None);
    };
    let n = ctx.len();
    let f = &ctx.cover.members;
    let sections: Vec<usize> = local.iter().map(|&(x, _)| x).collect();
    let psi: Vec<usize> = local.iter().map(|&(_, iso)| iso).collect();
    let mut theta = Vec::with_capacity(n * n);
    for al in 0..n {
        for be in 0..n {
            let pb = ctx.pair(al, be);
            let fib = cc.fiber(pb.apex);
            let (xa, xb) = (sections[al], sections[be]);
            let composite = fib.comp(
                fib.inv(i.coh(pb.p1, xa)),
                fib.comp(
                    fib.inv(cc.res_mor(pb.p1, psi[al])),
                    fib.comp(
                        cc.reassoc(u, c, &[f[be], pb.p2], &[f[al], pb.p1]),
                        fib.comp(cc.res_mor(pb.p2, psi[be]), i.coh(pb.p2, xb)),
                    ),
                ),
            );
            let s = a.res_obj(pb.p2, xb);
            let t = a.res_obj(pb.p1, xa);
            let th = unique_preimage(&i.components[pb.apex], s, t, composite)
                .ok_or_else(|| Error::NotLwe("component is not full".into()))?;
            theta.push(th);
        }
    }
    let d = DescentObject {
        base: c,
        sections,
        psi,
        theta,
    };
    ctx.check_object(&d)
        .into_result("descent datum from a local weak equivalence")?;
    Ok(Some(d))
}

/// The first `e ∈ E(U)` (canonical order) with an isomorphism
/// `Φ(e) ≅ obj`, and that isomorphism.
pub fn amalgamate(ctx: &DescentContext, obj: &DescentObject) -> Result<(usize, DescentMorphism)> {
    amalgamate_bounded(ctx, obj, default_bound())
}

pub fn amalgamate_bounded(ctx: &DescentContext, obj: &DescentObject, bound: u64) -> Result<(usize, DescentMorphism)> {
    let budget = Budget::new(bound, "searching for an amalgamation");
    let u = ctx.apex();
    let e = ctx.total();
    // exact preimages first
    let mut order: Vec<usize> = e.fiber(u).objects().collect();
    order.sort_by_key(|&x| ctx.phi_object(x) != *obj);
    for x in order {
        let fx = ctx.phi_object(x);
        if let Some(m) = ctx.morphisms_between(&fx, obj, true, &budget)?.into_iter().next() {
            return Ok((x, m));
        }
    }
    Err(Error::NoAmalgamation(ctx.describe_object(obj)))
}

#[cfg(test)]
mod tests;
