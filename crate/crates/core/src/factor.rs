//! The path-object factorization `f = Q(f) ∘ η_f`, stackification as its
//! special case `A → 1`, and isocomma objects with the second factorization
//! `f = p ∘ i` through `(f, 1_B)`.
//!
//! Arrows of `P(f)(U)` are classes of descent morphisms that agree after
//! restriction to a common refining covering sieve. Every class has exactly
//! one representative over the minimal covering sieve of `U`, which is the
//! normal form stored here.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::hash::Hash;
use std::ops::ControlFlow;
use std::sync::Arc;

use serde::Serialize;

use crate::bound::{default_bound, Budget};
use crate::descent::{
    base_change_morphism, base_change_object, is_local_fibration, is_lwe, is_stack, restrict_morphism, restrict_object,
    subcover_positions, DescentContext, DescentMorphism, DescentObject, FibrationDecision, LweDecision,
    PulledBackCover,
};
use crate::fincat::{tuple_id, FinCategory, Functor, NatTrans};
use crate::hofib::lwe_between_fibrants_to_equivalence;
use crate::pstack::{
    bang, enumerate_modifications, is_prestack, terminal_prestack, validate_modification, validate_pseudonat,
    Modification, PrestackDecision, PseudoInverse, PseudoNat, Pseudofunctor,
};
use crate::site::{CoverFamily, Sieve, Site};
use crate::validation::ValidationReport;
use crate::{Error, Result};

/// A finite category together with the raw data its objects and morphisms
/// were built from, indexed like the category.
#[derive(Debug, Clone)]
pub struct Tabulated<O, M> {
    pub objects: Vec<O>,
    /// `(source, target, data)`
    pub morphisms: Vec<(usize, usize, M)>,
    pub cat: Arc<FinCategory>,
    obj_index: HashMap<O, usize>,
    mor_index: HashMap<(usize, usize, M), usize>,
}

impl<O: Clone + Eq + Hash, M: Clone + Eq + Hash> Tabulated<O, M> {
    /// `compose(g, f)` is `g ∘ f` on raw data.
    fn build(
        raw_objects: Vec<O>,
        obj_ids: Vec<String>,
        raw_morphisms: Vec<(usize, usize, M)>,
        mor_ids: Vec<String>,
        identity: impl Fn(usize) -> M,
        compose: impl Fn(&M, &M) -> M,
    ) -> Result<Self> {
        let raw_index: HashMap<(usize, usize, M), usize> = raw_morphisms
            .iter()
            .enumerate()
            .map(|(k, (i, j, m))| ((*i, *j, m.clone()), k))
            .collect();
        let ids: Vec<Option<usize>> = (0..raw_objects.len())
            .map(|i| raw_index.get(&(i, i, identity(i))).copied())
            .collect();
        let assembled = FinCategory::assemble(
            obj_ids,
            raw_morphisms
                .iter()
                .zip(mor_ids)
                .map(|((i, j, _), id)| (id, *i, *j))
                .collect(),
            ids,
            |g, f| {
                let (i, j, mf) = &raw_morphisms[f];
                let (j2, k, mg) = &raw_morphisms[g];
                if j != j2 {
                    return None;
                }
                raw_index.get(&(*i, *k, compose(mg, mf))).copied()
            },
        )?;
        let mut objects = vec![None; raw_objects.len()];
        for (old, o) in raw_objects.into_iter().enumerate() {
            objects[assembled.objects[old]] = Some(o);
        }
        let objects: Vec<O> = objects.into_iter().map(|o| o.expect("permutation")).collect();
        let mut morphisms = vec![None; raw_morphisms.len()];
        for (old, (i, j, m)) in raw_morphisms.into_iter().enumerate() {
            morphisms[assembled.morphisms[old]] = Some((assembled.objects[i], assembled.objects[j], m));
        }
        let morphisms: Vec<(usize, usize, M)> = morphisms.into_iter().map(|m| m.expect("permutation")).collect();
        let obj_index = objects.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect();
        let mor_index = morphisms
            .iter()
            .enumerate()
            .map(|(k, (i, j, m))| ((*i, *j, m.clone()), k))
            .collect();
        Ok(Tabulated {
            objects,
            morphisms,
            cat: assembled.category,
            obj_index,
            mor_index,
        })
    }

    pub fn object_index(&self, o: &O) -> Option<usize> {
        self.obj_index.get(o).copied()
    }

    pub fn morphism_index(&self, s: usize, t: usize, m: &M) -> Option<usize> {
        self.mor_index.get(&(s, t, m.clone())).copied()
    }

    fn find_object(&self, o: &O, what: &str) -> Result<usize> {
        self.object_index(o)
            .ok_or_else(|| Error::shape(format!("{what} is not an object of the fiber")))
    }

    fn find_morphism(&self, s: usize, t: usize, m: &M, what: &str) -> Result<usize> {
        self.morphism_index(s, t, m).ok_or_else(|| {
            Error::shape(format!(
                "{what} is not a morphism {} → {}",
                self.cat.object_id(s),
                self.cat.object_id(t)
            ))
        })
    }
}

/// The fiber `P(f)(U)`: pairs (covering sieve, descent datum over it).
#[derive(Debug, Clone)]
pub struct PathFiber {
    pub apex: usize,
    pub sieves: Vec<Sieve>,
    pub contexts: Vec<DescentContext>,
    /// index of the minimal covering sieve in `sieves`
    pub minimal: usize,
    to_minimal: Vec<Vec<usize>>,
    /// objects `(sieve index, datum)`; morphisms over the minimal sieve
    pub table: Tabulated<(usize, DescentObject), DescentMorphism>,
}

impl PathFiber {
    pub fn cat(&self) -> &Arc<FinCategory> {
        &self.table.cat
    }

    pub fn minimal_context(&self) -> &DescentContext {
        &self.contexts[self.minimal]
    }

    pub fn sieve_index(&self, s: &Sieve) -> Option<usize> {
        self.sieves.iter().position(|x| x == s)
    }

    /// The restriction of object `x` to the minimal covering sieve.
    pub fn normal_form(&self, x: usize) -> DescentObject {
        let (i, d) = &self.table.objects[x];
        restrict_object(&self.to_minimal[*i], self.contexts[*i].len(), d)
    }

    /// The section of object `x` over the sieve member `h`.
    fn section_at(&self, x: usize, h: usize) -> Option<usize> {
        let (i, d) = &self.table.objects[x];
        let pos = self.contexts[*i].cover.members.iter().position(|&m| m == h)?;
        Some(d.sections[pos])
    }
}

/// `P(f)` with `Q(f): P(f) → B` and `η_f: A → P(f)`.
#[derive(Debug, Clone)]
pub struct PathObject {
    pub map: PseudoNat,
    pub fibers: Vec<PathFiber>,
    pub pf: Arc<Pseudofunctor>,
    pub q: PseudoNat,
    pub eta: PseudoNat,
}

/// The cover `g*S` of a sieve `S` along `g`, in the member order of `to`,
/// each member sitting over its composite with `g`.
fn sieve_base_change(site: &Site, from: &CoverFamily, g: usize, to: &CoverFamily) -> Result<PulledBackCover> {
    let c = site.cat();
    let origin = to
        .members
        .iter()
        .map(|&k| {
            let gk = c.comp(g, k);
            from.members
                .iter()
                .position(|&m| m == gk)
                .ok_or_else(|| Error::shape("pulled-back sieve member has no origin"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PulledBackCover {
        along: g,
        cover: to.clone(),
        origin,
        lift: to.members.iter().map(|&k| c.identity(c.dom(k))).collect(),
    })
}

/// Which objects a fiber of `P(f)` carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FiberModel {
    /// every descent datum over every covering sieve
    Exhaustive,
    /// one datum per isomorphism class, the unit's images, and everything
    /// reachable from these by restriction; a full subcategory that is
    /// equivalent to the exhaustive fiber and closed under restriction
    #[default]
    Transversal,
}

struct Frame {
    sieves: Vec<Sieve>,
    contexts: Vec<DescentContext>,
    minimal: usize,
    to_minimal: Vec<Vec<usize>>,
}

impl Frame {
    fn new(f: &PseudoNat, u: usize) -> Result<Frame> {
        let site = f.site();
        let sieves: Vec<Sieve> = site.covering_sieves(u).to_vec();
        let min = site.minimal_covering_sieve(u);
        let minimal = sieves
            .iter()
            .position(|s| *s == min)
            .ok_or_else(|| Error::shape("minimal covering sieve missing"))?;
        let contexts = sieves
            .iter()
            .map(|s| DescentContext::new(f, &s.to_family()))
            .collect::<Result<Vec<_>>>()?;
        let min_fam = min.to_family();
        let to_minimal = contexts
            .iter()
            .map(|ctx| subcover_positions(&ctx.cover, &min_fam))
            .collect::<Result<Vec<_>>>()?;
        Ok(Frame {
            sieves,
            contexts,
            minimal,
            to_minimal,
        })
    }

    fn normal_form(&self, i: usize, d: &DescentObject) -> DescentObject {
        restrict_object(&self.to_minimal[i], self.contexts[i].len(), d)
    }

    fn sieve_index(&self, s: &Sieve) -> Option<usize> {
        self.sieves.iter().position(|x| x == s)
    }
}

fn visit_all(
    frame: &Frame,
    reps_only: bool,
    budget: &Budget,
    mut visit: impl FnMut(usize, DescentObject) -> Result<()>,
) -> Result<()> {
    for (i, ctx) in frame.contexts.iter().enumerate() {
        let mut failed = None;
        let step = |d: DescentObject| match budget.tick().and_then(|_| visit(i, d)) {
            Ok(()) => ControlFlow::Continue(()),
            Err(e) => {
                failed = Some(e);
                ControlFlow::Break(())
            }
        };
        if reps_only {
            ctx.for_each_object_up_to_iso(budget, step)?;
        } else {
            ctx.for_each_object(budget, step)?;
        }
        if let Some(e) = failed {
            return Err(e);
        }
    }
    Ok(())
}

/// One datum per isomorphism class of `P(f)(U)`, in enumeration order.
fn transversal(frame: &Frame, budget: &Budget) -> Result<Vec<(usize, DescentObject)>> {
    let min_ctx = &frame.contexts[frame.minimal];
    let mut reps: Vec<(usize, DescentObject)> = Vec::new();
    let mut rep_forms: Vec<DescentObject> = Vec::new();
    let mut seen: std::collections::HashSet<DescentObject> = std::collections::HashSet::new();
    visit_all(frame, true, budget, |i, d| {
        let nf = frame.normal_form(i, &d);
        if !seen.insert(nf.clone()) {
            return Ok(());
        }
        for r in &rep_forms {
            let related = r.base == nf.base || min_ctx.base().fiber(min_ctx.apex()).isomorphic(r.base, nf.base);
            if related && !min_ctx.morphisms_between(r, &nf, true, budget)?.is_empty() {
                return Ok(());
            }
        }
        rep_forms.push(nf);
        reps.push((i, d));
        Ok(())
    })?;
    Ok(reps)
}

fn build_path_fiber(
    u: usize,
    frame: Frame,
    raw_objects: Vec<(usize, DescentObject)>,
    budget: &Budget,
) -> Result<PathFiber> {
    let c = frame.contexts[0].cat().clone();
    let Frame {
        sieves,
        contexts,
        minimal,
        to_minimal,
    } = frame;
    let min_ctx = &contexts[minimal];
    // hom sets depend only on the normal forms, which repeat across sieves
    let normal: Vec<DescentObject> = raw_objects
        .iter()
        .map(|(i, d)| restrict_object(&to_minimal[*i], contexts[*i].len(), d))
        .collect();
    let mut distinct: Vec<DescentObject> = normal.clone();
    distinct.sort();
    distinct.dedup();
    let slot: Vec<usize> = normal
        .iter()
        .map(|d| distinct.binary_search(d).expect("present"))
        .collect();
    let mut homs: HashMap<(usize, usize), Vec<DescentMorphism>> = HashMap::new();
    for (a, s) in distinct.iter().enumerate() {
        for (b, t) in distinct.iter().enumerate() {
            homs.insert((a, b), min_ctx.morphisms_between(s, t, false, budget)?);
        }
    }
    let obj_ids: Vec<String> = raw_objects
        .iter()
        .map(|(i, d)| tuple_id(&[sieves[*i].describe(&c), contexts[*i].describe_object(d)]))
        .collect();
    let mut raw_morphisms = Vec::new();
    let mut mor_ids = Vec::new();
    for x in 0..raw_objects.len() {
        for y in 0..raw_objects.len() {
            for m in &homs[&(slot[x], slot[y])] {
                mor_ids.push(tuple_id(&[&obj_ids[x], &obj_ids[y], &min_ctx.describe_morphism(m)]));
                raw_morphisms.push((x, y, m.clone()));
            }
        }
    }
    let table = Tabulated::build(
        raw_objects,
        obj_ids,
        raw_morphisms,
        mor_ids,
        |x| min_ctx.identity(&normal[x]),
        |g, f| min_ctx.compose(g, f),
    )?;
    Ok(PathFiber {
        apex: u,
        sieves,
        contexts,
        minimal,
        to_minimal,
        table,
    })
}

/// The objects of every fiber: all of them, or a transversal together with
/// the unit's images, closed under restriction.
fn fiber_objects(
    f: &PseudoNat,
    frames: &[Frame],
    model: FiberModel,
    budget: &Budget,
) -> Result<Vec<Vec<(usize, DescentObject)>>> {
    let site = f.site();
    let c = site.cat().clone();
    let mut objects: Vec<Vec<(usize, DescentObject)>> = Vec::with_capacity(frames.len());
    if model == FiberModel::Exhaustive {
        for frame in frames {
            let mut all = Vec::new();
            visit_all(frame, false, budget, |i, d| {
                all.push((i, d));
                Ok(())
            })?;
            objects.push(all);
        }
        return Ok(objects);
    }
    let mut present: Vec<std::collections::HashSet<(usize, DescentObject)>> = Vec::new();
    let mut queue: std::collections::VecDeque<(usize, usize, DescentObject)> = Default::default();
    for (u, frame) in frames.iter().enumerate() {
        let max = frame
            .sieve_index(&crate::site::maximal_sieve(&c, u))
            .ok_or_else(|| Error::shape("maximal sieve missing"))?;
        let mut seeds: Vec<(usize, DescentObject)> = f
            .source
            .fiber(u)
            .objects()
            .map(|a| (max, frame.contexts[max].phi_object(a)))
            .collect();
        seeds.extend(transversal(frame, budget)?);
        let mut set = std::collections::HashSet::new();
        let mut list = Vec::new();
        for s in seeds {
            if set.insert(s.clone()) {
                queue.push_back((u, s.0, s.1.clone()));
                list.push(s);
            }
        }
        present.push(set);
        objects.push(list);
    }
    let mut pcs: HashMap<(usize, usize), (usize, PulledBackCover)> = HashMap::new();
    while let Some((u, i, d)) = queue.pop_front() {
        for &t in c.incoming(u) {
            budget.tick()?;
            let v = c.dom(t);
            if let Entry::Vacant(slot) = pcs.entry((t, i)) {
                let pulled = site.pullback_sieve(t, &frames[u].sieves[i]);
                let j = frames[v]
                    .sieve_index(&pulled)
                    .ok_or_else(|| Error::shape("pulled-back sieve is not covering"))?;
                let pc = sieve_base_change(site, &frames[u].contexts[i].cover, t, &frames[v].contexts[j].cover)?;
                slot.insert((j, pc));
            }
            let (j, pc) = &pcs[&(t, i)];
            let moved = base_change_object(&frames[u].contexts[i], &frames[v].contexts[*j], pc, &d)?;
            let key = (*j, moved);
            if present[v].insert(key.clone()) {
                queue.push_back((v, key.0, key.1.clone()));
                objects[v].push(key);
            }
        }
    }
    Ok(objects)
}

/// `P(t): P(U) → P(V)` for `t: V → U`: base change of sieve and datum.
fn path_restriction(site: &Site, from: &PathFiber, to: &PathFiber, t: usize) -> Result<Functor> {
    let mut pcs = Vec::with_capacity(from.sieves.len());
    for (i, s) in from.sieves.iter().enumerate() {
        let pulled = site.pullback_sieve(t, s);
        let j = to
            .sieve_index(&pulled)
            .ok_or_else(|| Error::shape("pulled-back sieve is not covering"))?;
        pcs.push((
            j,
            sieve_base_change(site, &from.contexts[i].cover, t, &to.contexts[j].cover)?,
        ));
    }
    let obj_map = from
        .table
        .objects
        .iter()
        .map(|(i, d)| {
            let (j, pc) = &pcs[*i];
            let moved = base_change_object(&from.contexts[*i], &to.contexts[*j], pc, d)?;
            to.table.find_object(&(*j, moved), "restricted datum")
        })
        .collect::<Result<Vec<_>>>()?;
    let min_ctx = from.minimal_context();
    let (_, pc_min) = &pcs[from.minimal];
    let positions = subcover_positions(&pc_min.cover, &to.minimal_context().cover)?;
    let mor_map = from
        .table
        .morphisms
        .iter()
        .map(|(x, y, m)| {
            let moved = restrict_morphism(&positions, &base_change_morphism(min_ctx, pc_min, m));
            to.table
                .find_morphism(obj_map[*x], obj_map[*y], &moved, "restricted descent morphism")
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Functor {
        source: from.table.cat.clone(),
        target: to.table.cat.clone(),
        obj_map,
        mor_map,
    })
}

/// Builds `P(f)`, `Q(f)` and `η_f` without checking that the endpoints are
/// prestacks.
pub fn path_object_unchecked(f: &PseudoNat, model: FiberModel, bound: u64) -> Result<PathObject> {
    let site = f.site().clone();
    let c = site.cat().clone();
    let (a, b) = (&f.source, &f.target);
    let budget = Budget::new(bound, "building a path-object fiber");
    let frames = c.objects().map(|u| Frame::new(f, u)).collect::<Result<Vec<_>>>()?;
    let objects = fiber_objects(f, &frames, model, &budget)?;
    let fibers = frames
        .into_iter()
        .zip(objects)
        .enumerate()
        .map(|(u, (frame, objs))| build_path_fiber(u, frame, objs, &budget))
        .collect::<Result<Vec<_>>>()?;
    let restrict = c
        .morphisms()
        .map(|t| path_restriction(&site, &fibers[c.cod(t)], &fibers[c.dom(t)], t))
        .collect::<Result<Vec<_>>>()?;

    // structural isomorphisms: base by the coherence of B, sections by that of A
    let canonical =
        |w: usize, x: usize, y: usize, base: usize, section: &dyn Fn(usize, usize) -> Option<usize>| -> Result<usize> {
            let fib = &fibers[w];
            let members = &fib.minimal_context().cover.members;
            let sections = members
                .iter()
                .enumerate()
                .map(|(j, &k)| section(j, k))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::shape("pulled-back member outside the sieve"))?;
            let dm = DescentMorphism { base, sections };
            fib.table.find_morphism(x, y, &dm, "structural isomorphism")
        };

    let mut upsilon = Vec::with_capacity(c.num_objects());
    for u in c.objects() {
        let fib = &fibers[u];
        let src = restrict[c.identity(u)].clone();
        let components = fib
            .cat()
            .objects()
            .map(|x| {
                let nf = fib.normal_form(x);
                let base = b.reassoc(u, nf.base, &[c.identity(u)], &[]);
                canonical(u, src.obj(x), x, base, &|j, k| {
                    let wk = c.dom(k);
                    Some(a.reassoc(wk, nf.sections[j], &[c.identity(wk)], &[]))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        upsilon.push(NatTrans {
            source: src,
            target: Functor::identity(fib.cat()),
            components,
        });
    }

    let mut phi = Vec::with_capacity(c.num_morphisms());
    for t in c.morphisms() {
        let u = c.cod(t);
        let mut row = Vec::new();
        for &s in c.incoming(c.dom(t)) {
            let ts = c.comp(t, s);
            let w = c.dom(s);
            let src = restrict[ts].clone();
            let tgt = restrict[s].after(&restrict[t]);
            let fib = &fibers[u];
            let components = fib
                .cat()
                .objects()
                .map(|x| {
                    let base = b.reassoc(u, fib.normal_form(x).base, &[ts], &[t, s]);
                    canonical(w, src.obj(x), tgt.obj(x), base, &|_, k| {
                        let id = c.identity(c.dom(k));
                        let e = fib.section_at(x, c.comp(ts, k))?;
                        Some(a.reassoc(c.dom(k), e, &[id], &[id, id]))
                    })
                })
                .collect::<Result<Vec<_>>>();
            row.push(NatTrans {
                source: src,
                target: tgt,
                components: components?,
            });
        }
        phi.push(row);
    }
    let cats = fibers.iter().map(|f| f.cat().clone()).collect();
    let pf = Arc::new(Pseudofunctor::new(site.clone(), cats, restrict, upsilon, phi)?);

    let q_components = c
        .objects()
        .map(|u| {
            let tab = &fibers[u].table;
            Functor {
                source: tab.cat.clone(),
                target: b.fiber(u).clone(),
                obj_map: tab.objects.iter().map(|(_, d)| d.base).collect(),
                mor_map: tab.morphisms.iter().map(|(_, _, m)| m.base).collect(),
            }
        })
        .collect();
    let q = PseudoNat::strict(&pf, b, q_components)?;

    let mut eta_components = Vec::with_capacity(c.num_objects());
    for u in c.objects() {
        let fib = &fibers[u];
        let max = fib
            .sieve_index(&crate::site::maximal_sieve(&c, u))
            .ok_or_else(|| Error::shape("maximal sieve missing"))?;
        let ctx = &fib.contexts[max];
        let obj_map = a
            .fiber(u)
            .objects()
            .map(|x| fib.table.find_object(&(max, ctx.phi_object(x)), "unit datum"))
            .collect::<Result<Vec<_>>>()?;
        let mor_map = a
            .fiber(u)
            .morphisms()
            .map(|m| {
                let fa = a.fiber(u);
                let dm = restrict_morphism(&fib.to_minimal[max], &ctx.phi_morphism(m));
                fib.table
                    .find_morphism(obj_map[fa.dom(m)], obj_map[fa.cod(m)], &dm, "unit morphism")
            })
            .collect::<Result<Vec<_>>>()?;
        eta_components.push(Functor {
            source: a.fiber(u).clone(),
            target: fib.cat().clone(),
            obj_map,
            mor_map,
        });
    }
    let mut eta_coherence = Vec::with_capacity(c.num_morphisms());
    for t in c.morphisms() {
        let (v, u) = (c.dom(t), c.cod(t));
        let src = eta_components[v].after(a.restriction(t));
        let tgt = pf.restriction(t).after(&eta_components[u]);
        let components = a
            .fiber(u)
            .objects()
            .map(|x| {
                canonical(v, src.obj(x), tgt.obj(x), f.coh(t, x), &|_, k| {
                    let tk = c.comp(t, k);
                    Some(a.reassoc(u, x, &[t, k], &[tk, c.identity(c.dom(k))]))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        eta_coherence.push(NatTrans {
            source: src,
            target: tgt,
            components,
        });
    }
    let eta = PseudoNat {
        source: a.clone(),
        target: pf.clone(),
        components: eta_components,
        coherence: eta_coherence,
    };
    validate_pseudonat(&eta).into_result("path-object unit")?;
    Ok(PathObject {
        map: f.clone(),
        fibers,
        pf,
        q,
        eta,
    })
}

fn require_prestack(f: &Pseudofunctor, what: &str) -> Result<()> {
    if is_prestack(f)?.prestack {
        Ok(())
    } else {
        Err(Error::NotAPrestack(what.to_string()))
    }
}

/// `P(f)` for a map between prestacks.
pub fn path_object_prestack(f: &PseudoNat) -> Result<PathObject> {
    require_prestack(&f.source, "source")?;
    require_prestack(&f.target, "target")?;
    path_object_unchecked(f, FiberModel::default(), default_bound())
}

/// Outcome of the factorization laws for `P(f)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorizationReport {
    /// `Q(f) ∘ η_f = f` on the nose
    pub strict: bool,
    pub unit_lwe: LweDecision,
    pub projection_fibration: FibrationDecision,
    pub prestack: PrestackDecision,
}

impl FactorizationReport {
    pub fn holds(&self) -> bool {
        self.strict && self.unit_lwe.holds && self.projection_fibration.holds && self.prestack.prestack
    }
}

pub fn verify_factorization(po: &PathObject) -> Result<FactorizationReport> {
    Ok(FactorizationReport {
        strict: po.q.after(&po.eta) == po.map,
        unit_lwe: is_lwe(&po.eta)?,
        projection_fibration: is_local_fibration(&po.q)?,
        prestack: is_prestack(&po.pf)?,
    })
}

/// `P(A → 1)` with its unit.
#[derive(Debug, Clone)]
pub struct Stackification {
    pub path: PathObject,
    pub stack: FibrationDecision,
    pub unit_lwe: LweDecision,
    /// present when `A` is already a stack
    pub inverse: Option<PseudoInverse>,
}

impl Stackification {
    pub fn pf(&self) -> &Arc<Pseudofunctor> {
        &self.path.pf
    }

    pub fn unit(&self) -> &PseudoNat {
        &self.path.eta
    }
}

pub fn stackify(a: &Arc<Pseudofunctor>) -> Result<Stackification> {
    require_prestack(a, "source")?;
    let one = terminal_prestack(a.site());
    let path = path_object_unchecked(&bang(a, &one), FiberModel::default(), default_bound())?;
    let stack = is_stack(&path.pf)?;
    let unit_lwe = is_lwe(&path.eta)?;
    let inverse = if is_stack(a)?.holds && stack.holds && unit_lwe.holds {
        Some(lwe_between_fibrants_to_equivalence(&path.eta)?)
    } else {
        None
    };
    Ok(Stackification {
        path,
        stack,
        unit_lwe,
        inverse,
    })
}

/// Object `(a, c, ξ: f a ≅ g c)` of an isocomma fiber.
pub type IsoObject = (usize, usize, usize);

/// The isocomma `(f, g)` of `f: A → B` and `g: C → B` with its projections
/// and the invertible modification `χ: f∘left ⇒ g∘right`.
#[derive(Debug, Clone)]
pub struct Isocomma {
    pub f: PseudoNat,
    pub g: PseudoNat,
    pub fibers: Vec<Tabulated<IsoObject, (usize, usize)>>,
    pub pf: Arc<Pseudofunctor>,
    pub left: PseudoNat,
    pub right: PseudoNat,
    pub chi: Modification,
}

fn iso_fiber(f: &PseudoNat, g: &PseudoNat, u: usize) -> Result<Tabulated<IsoObject, (usize, usize)>> {
    let (a, cc, b) = (&f.source, &g.source, &f.target);
    let (fa, fc, fb) = (a.fiber(u), cc.fiber(u), b.fiber(u));
    let (fu, gu) = (&f.components[u], &g.components[u]);
    let mut objects = Vec::new();
    for x in fa.objects() {
        for y in fc.objects() {
            for xi in fb.isos(fu.obj(x), gu.obj(y)) {
                objects.push((x, y, xi));
            }
        }
    }
    let obj_ids: Vec<String> = objects
        .iter()
        .map(|&(x, y, xi)| tuple_id(&[fa.object_id(x), fc.object_id(y), fb.morphism_id(xi)]))
        .collect();
    let mut morphisms = Vec::new();
    let mut mor_ids = Vec::new();
    for (s, &(x, y, xi)) in objects.iter().enumerate() {
        for (t, &(x2, y2, xi2)) in objects.iter().enumerate() {
            for &i in fa.hom(x, x2) {
                for &j in fc.hom(y, y2) {
                    if fb.comp(gu.mor(j), xi) == fb.comp(xi2, fu.mor(i)) {
                        mor_ids.push(tuple_id(&[
                            &obj_ids[s],
                            &obj_ids[t],
                            fa.morphism_id(i),
                            fc.morphism_id(j),
                        ]));
                        morphisms.push((s, t, (i, j)));
                    }
                }
            }
        }
    }
    Tabulated::build(
        objects.clone(),
        obj_ids,
        morphisms,
        mor_ids,
        |s| (fa.identity(objects[s].0), fc.identity(objects[s].1)),
        |&(i2, j2), &(i, j)| (fa.comp(i2, i), fc.comp(j2, j)),
    )
}

pub fn isocomma(f: &PseudoNat, g: &PseudoNat) -> Result<Isocomma> {
    if !crate::site::same_site(f.site(), g.site()) || !crate::pstack::same_pf(&f.target, &g.target) {
        return Err(Error::shape("isocomma of maps with different codomains"));
    }
    let site = f.site().clone();
    let c = site.cat().clone();
    let (a, cc, b) = (&f.source, &g.source, &f.target);
    let fibers = c.objects().map(|u| iso_fiber(f, g, u)).collect::<Result<Vec<_>>>()?;
    let mut restrict = Vec::with_capacity(c.num_morphisms());
    for t in c.morphisms() {
        let (v, u) = (c.dom(t), c.cod(t));
        let (from, to) = (&fibers[u], &fibers[v]);
        let bv = b.fiber(v);
        let obj_map = from
            .objects
            .iter()
            .map(|&(x, y, xi)| {
                let moved = bv.comp(bv.inv(g.coh(t, y)), bv.comp(b.res_mor(t, xi), f.coh(t, x)));
                to.find_object(
                    &(a.res_obj(t, x), cc.res_obj(t, y), moved),
                    "restricted isocomma object",
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let mor_map = from
            .morphisms
            .iter()
            .map(|&(s, e, (i, j))| {
                to.find_morphism(
                    obj_map[s],
                    obj_map[e],
                    &(a.res_mor(t, i), cc.res_mor(t, j)),
                    "restricted pair",
                )
            })
            .collect::<Result<Vec<_>>>()?;
        restrict.push(Functor {
            source: from.cat.clone(),
            target: to.cat.clone(),
            obj_map,
            mor_map,
        });
    }
    let upsilon = c
        .objects()
        .map(|u| {
            let fib = &fibers[u];
            let src = restrict[c.identity(u)].clone();
            let components = fib
                .objects
                .iter()
                .enumerate()
                .map(|(x, &(p, r, _))| {
                    let m = (a.upsilon_at(u, p), cc.upsilon_at(u, r));
                    fib.find_morphism(src.obj(x), x, &m, "unit pair")
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(NatTrans {
                source: src,
                target: Functor::identity(&fib.cat),
                components,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut phi = Vec::with_capacity(c.num_morphisms());
    for t in c.morphisms() {
        let u = c.cod(t);
        let mut row = Vec::new();
        for &s in c.incoming(c.dom(t)) {
            let w = c.dom(s);
            let src = restrict[c.comp(t, s)].clone();
            let tgt = restrict[s].after(&restrict[t]);
            let components = fibers[u]
                .objects
                .iter()
                .enumerate()
                .map(|(x, &(p, r, _))| {
                    let m = (a.phi_at(t, s, p), cc.phi_at(t, s, r));
                    fibers[w].find_morphism(src.obj(x), tgt.obj(x), &m, "composition pair")
                })
                .collect::<Result<Vec<_>>>()?;
            row.push(NatTrans {
                source: src,
                target: tgt,
                components,
            });
        }
        phi.push(row);
    }
    let cats = fibers.iter().map(|f| f.cat.clone()).collect();
    let pf = Arc::new(Pseudofunctor::new(site.clone(), cats, restrict, upsilon, phi)?);
    let projection =
        |target: &Arc<Pseudofunctor>, pick: fn(&IsoObject) -> usize, pick_m: fn(&(usize, usize)) -> usize| {
            let components = c
                .objects()
                .map(|u| Functor {
                    source: fibers[u].cat.clone(),
                    target: target.fiber(u).clone(),
                    obj_map: fibers[u].objects.iter().map(pick).collect(),
                    mor_map: fibers[u].morphisms.iter().map(|(_, _, m)| pick_m(m)).collect(),
                })
                .collect();
            PseudoNat::strict(&pf, target, components)
        };
    let left = projection(a, |o| o.0, |m| m.0)?;
    let right = projection(cc, |o| o.1, |m| m.1)?;
    let source = f.after(&left);
    let target = g.after(&right);
    let chi = Modification {
        components: c
            .objects()
            .map(|u| NatTrans {
                source: source.components[u].clone(),
                target: target.components[u].clone(),
                components: fibers[u].objects.iter().map(|o| o.2).collect(),
            })
            .collect(),
        source,
        target,
    };
    validate_modification(&chi).into_result("isocomma 2-cell")?;
    Ok(Isocomma {
        f: f.clone(),
        g: g.clone(),
        fibers,
        pf,
        left,
        right,
        chi,
    })
}

/// The canonical map `z: Z → (f, g)` with `left∘z = u`, `right∘z = v` and
/// `χ∘z = χ′`.
pub fn isocomma_mediator(iso: &Isocomma, u: &PseudoNat, v: &PseudoNat, chi2: &Modification) -> Result<PseudoNat> {
    if !chi2.is_iso() {
        return Err(Error::shape("mediator needs an invertible 2-cell"));
    }
    let z_src = &u.source;
    let c = z_src.cat().clone();
    let components = c
        .objects()
        .map(|w| {
            let tab = &iso.fibers[w];
            let fz = z_src.fiber(w);
            let obj_map = fz
                .objects()
                .map(|x| tab.find_object(&(u.obj(w, x), v.obj(w, x), chi2.at(w, x)), "cone object"))
                .collect::<Result<Vec<_>>>()?;
            let mor_map = fz
                .morphisms()
                .map(|m| {
                    tab.find_morphism(
                        obj_map[fz.dom(m)],
                        obj_map[fz.cod(m)],
                        &(u.mor(w, m), v.mor(w, m)),
                        "cone morphism",
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Functor {
                source: fz.clone(),
                target: tab.cat.clone(),
                obj_map,
                mor_map,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let coherence = c
        .morphisms()
        .map(|t| {
            let (vv, uu) = (c.dom(t), c.cod(t));
            let src = components[vv].after(z_src.restriction(t));
            let tgt = iso.pf.restriction(t).after(&components[uu]);
            let comps = z_src
                .fiber(uu)
                .objects()
                .map(|x| {
                    iso.fibers[vv].find_morphism(src.obj(x), tgt.obj(x), &(u.coh(t, x), v.coh(t, x)), "cone coherence")
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(NatTrans {
                source: src,
                target: tgt,
                components: comps,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let z = PseudoNat {
        source: z_src.clone(),
        target: iso.pf.clone(),
        components,
        coherence,
    };
    validate_pseudonat(&z).into_result("isocomma mediator")?;
    mediator_equations(iso, &z, u, v, chi2).into_result("isocomma mediator")?;
    Ok(z)
}

/// Checks `left∘z = u`, `right∘z = v` and `χ∘z = χ′` exactly.
pub fn mediator_equations(
    iso: &Isocomma,
    z: &PseudoNat,
    u: &PseudoNat,
    v: &PseudoNat,
    chi2: &Modification,
) -> ValidationReport {
    let mut r = ValidationReport::new();
    if iso.left.after(z) != *u {
        r.push("left projection of the mediator", Vec::<String>::new());
    }
    if iso.right.after(z) != *v {
        r.push("right projection of the mediator", Vec::<String>::new());
    }
    let pulled = iso.chi.whisker_before(z);
    if pulled.components != chi2.components {
        r.push("2-cell of the mediator", Vec::<String>::new());
    }
    r
}

/// The cones `(1_A, f, χ′)` over `f: A → B`, one for every invertible
/// `χ′: f ⇒ f`, in canonical order.
pub fn identity_leg_cones(f: &PseudoNat, bound: u64) -> Result<Vec<(PseudoNat, PseudoNat, Modification)>> {
    let id_a = PseudoNat::identity(&f.source);
    let id_b = PseudoNat::identity(&f.target);
    let cells = enumerate_modifications(&f.after(&id_a), &id_b.after(f), true, bound)?;
    Ok(cells.into_iter().map(|chi2| (id_a.clone(), f.clone(), chi2)).collect())
}

/// `f = p ∘ i` through `(f, 1_B)`, `i(a) = (a, f a, 1)`.
#[derive(Debug, Clone)]
pub struct IsocommaFactorization {
    pub iso: Isocomma,
    pub i: PseudoNat,
    pub p: PseudoNat,
    pub strict: bool,
    pub i_lwe: LweDecision,
    pub source_is_stack: bool,
    /// only guaranteed when the source is a stack
    pub p_fibration: FibrationDecision,
}

pub fn factor_through_isocomma(f: &PseudoNat) -> Result<IsocommaFactorization> {
    require_prestack(&f.source, "source")?;
    require_prestack(&f.target, "target")?;
    let id_a = PseudoNat::identity(&f.source);
    let id_b = PseudoNat::identity(&f.target);
    let iso = isocomma(f, &id_b)?;
    let cell = Modification {
        source: f.after(&id_a),
        target: id_b.after(f),
        components: f.components.iter().map(NatTrans::identity).collect(),
    };
    let i = isocomma_mediator(&iso, &id_a, f, &cell)?;
    let p = iso.right.clone();
    Ok(IsocommaFactorization {
        strict: p.after(&i) == *f,
        i_lwe: is_lwe(&i)?,
        source_is_stack: is_stack(&f.source)?.holds,
        p_fibration: is_local_fibration(&p)?,
        iso,
        i,
        p,
    })
}

#[cfg(test)]
mod tests;
