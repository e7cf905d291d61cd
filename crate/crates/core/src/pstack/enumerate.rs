//! Exhaustive enumeration of pseudonatural transformations and
//! modifications, hom-categories, and pointwise pseudoinverses.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use super::{validate_modification, validate_pseudonat, Modification, PseudoNat, Pseudofunctor};
use crate::bound::Budget;
use crate::fincat::{
    enumerate_functors, enumerate_nat_transformations_filtered, is_equivalence, promote_to_adjoint_equivalence,
    FinCategory, Functor, NatTrans,
};
use crate::{Error, Result};

/// Visits every pseudonatural transformation `a → b` in canonical order:
/// component functors first (by object), then coherence (by arrow), each in
/// the enumeration order of [`enumerate_functors`] and
/// [`enumerate_nat_transformations_filtered`].
pub fn for_each_pseudonat<F>(a: &Arc<Pseudofunctor>, b: &Arc<Pseudofunctor>, bound: u64, mut visit: F) -> Result<()>
where
    F: FnMut(&PseudoNat) -> ControlFlow<()>,
{
    let c = a.cat().clone();
    let budget = Budget::new(bound, "enumerating pseudonatural transformations");
    let mut functor_lists = Vec::with_capacity(c.num_objects());
    for u in c.objects() {
        let list = enumerate_functors(a.fiber(u), b.fiber(u), bound)?;
        for _ in &list {
            budget.tick()?;
        }
        functor_lists.push(list);
    }
    // composite conditions keyed by the largest arrow index involved
    let mut checks: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); c.num_morphisms()];
    for t in c.morphisms() {
        for &s in c.incoming(c.dom(t)) {
            let ts = c.comp(t, s);
            checks[t.max(s).max(ts)].push((t, s, ts));
        }
    }
    let mut components: Vec<Functor> = Vec::with_capacity(c.num_objects());
    let mut stop = false;
    choose_components(
        a,
        b,
        &functor_lists,
        &checks,
        &mut components,
        &budget,
        &mut visit,
        &mut stop,
    )
}

#[allow(clippy::too_many_arguments)]
fn choose_components<F>(
    a: &Arc<Pseudofunctor>,
    b: &Arc<Pseudofunctor>,
    lists: &[Vec<Functor>],
    checks: &[Vec<(usize, usize, usize)>],
    components: &mut Vec<Functor>,
    budget: &Budget,
    visit: &mut F,
    stop: &mut bool,
) -> Result<()>
where
    F: FnMut(&PseudoNat) -> ControlFlow<()>,
{
    let u = components.len();
    if u == lists.len() {
        let mut coherence = Vec::with_capacity(a.cat().num_morphisms());
        return choose_coherence(a, b, components, checks, &mut coherence, budget, visit, stop);
    }
    for f in &lists[u] {
        budget.tick()?;
        components.push(f.clone());
        choose_components(a, b, lists, checks, components, budget, visit, stop)?;
        components.pop();
        if *stop {
            break;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn choose_coherence<F>(
    a: &Arc<Pseudofunctor>,
    b: &Arc<Pseudofunctor>,
    components: &[Functor],
    checks: &[Vec<(usize, usize, usize)>],
    coherence: &mut Vec<NatTrans>,
    budget: &Budget,
    visit: &mut F,
    stop: &mut bool,
) -> Result<()>
where
    F: FnMut(&PseudoNat) -> ControlFlow<()>,
{
    let c = a.cat().clone();
    let t = coherence.len();
    if t == c.num_morphisms() {
        let p = PseudoNat {
            source: a.clone(),
            target: b.clone(),
            components: components.to_vec(),
            coherence: coherence.clone(),
        };
        debug_assert!(validate_pseudonat(&p).is_valid());
        if visit(&p).is_break() {
            *stop = true;
        }
        return Ok(());
    }
    let (v, u) = (c.dom(t), c.cod(t));
    let src = components[v].after(a.restriction(t));
    let tgt = b.restriction(t).after(&components[u]);
    let candidates = if c.is_identity(t) {
        // forced by the unit law: coh = υ^B⁻¹ ∘ p(υ^A)
        let bu = b.fiber(u);
        let comps: Vec<usize> = a
            .fiber(u)
            .objects()
            .map(|x| {
                bu.comp(
                    bu.inv(b.upsilon_at(u, components[u].obj(x))),
                    components[u].mor(a.upsilon_at(u, x)),
                )
            })
            .collect();
        let n = NatTrans {
            source: src,
            target: tgt,
            components: comps,
        };
        if n.validate().is_valid() {
            vec![n]
        } else {
            vec![]
        }
    } else {
        enumerate_nat_transformations_filtered(&src, &tgt, true, budget.remaining())?
    };
    for n in candidates {
        budget.tick()?;
        coherence.push(n);
        let ok = checks[t]
            .iter()
            .all(|&(t1, s, ts)| composite_law_holds(a, b, components, coherence, t1, s, ts));
        if ok {
            choose_coherence(a, b, components, checks, coherence, budget, visit, stop)?;
        }
        coherence.pop();
        if *stop {
            break;
        }
    }
    Ok(())
}

fn composite_law_holds(
    a: &Pseudofunctor,
    b: &Pseudofunctor,
    components: &[Functor],
    coherence: &[NatTrans],
    t: usize,
    s: usize,
    ts: usize,
) -> bool {
    let c = a.cat();
    let (u, w) = (c.cod(t), c.dom(s));
    let bw = b.fiber(w);
    a.fiber(u).objects().all(|x| {
        let lhs = bw.comp(b.phi_at(t, s, components[u].obj(x)), coherence[ts].at(x));
        let rhs = bw.comp(
            b.res_mor(s, coherence[t].at(x)),
            bw.comp(coherence[s].at(a.res_obj(t, x)), components[w].mor(a.phi_at(t, s, x))),
        );
        lhs == rhs
    })
}

/// Every pseudonatural transformation `a → b`.
pub fn enumerate_pseudonats(a: &Arc<Pseudofunctor>, b: &Arc<Pseudofunctor>, bound: u64) -> Result<Vec<PseudoNat>> {
    let mut out = Vec::new();
    for_each_pseudonat(a, b, bound, |p| {
        out.push(p.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Every modification `p ⇒ q` (only invertible ones with `isos_only`).
pub fn enumerate_modifications(p: &PseudoNat, q: &PseudoNat, isos_only: bool, bound: u64) -> Result<Vec<Modification>> {
    let c = p.site().cat().clone();
    let budget = Budget::new(bound, "enumerating modifications");
    let mut lists = Vec::with_capacity(c.num_objects());
    for u in c.objects() {
        lists.push(enumerate_nat_transformations_filtered(
            &p.components[u],
            &q.components[u],
            isos_only,
            bound,
        )?);
    }
    // squares keyed by the larger endpoint
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); c.num_objects()];
    for t in c.morphisms() {
        checks[c.dom(t).max(c.cod(t))].push(t);
    }
    let mut out = Vec::new();
    let mut chosen: Vec<NatTrans> = Vec::new();
    fn go(
        p: &PseudoNat,
        q: &PseudoNat,
        lists: &[Vec<NatTrans>],
        checks: &[Vec<usize>],
        chosen: &mut Vec<NatTrans>,
        out: &mut Vec<Modification>,
        budget: &Budget,
    ) -> Result<()> {
        budget.tick()?;
        let u = chosen.len();
        if u == lists.len() {
            out.push(Modification {
                source: p.clone(),
                target: q.clone(),
                components: chosen.clone(),
            });
            return Ok(());
        }
        let c = p.site().cat();
        let (e, b) = (&p.source, &p.target);
        for n in &lists[u] {
            chosen.push(n.clone());
            let ok = checks[u].iter().all(|&t| {
                let (v, w) = (c.dom(t), c.cod(t));
                let bv = b.fiber(v);
                e.fiber(w).objects().all(|x| {
                    bv.comp(q.coh(t, x), chosen[v].at(e.res_obj(t, x)))
                        == bv.comp(b.res_mor(t, chosen[w].at(x)), p.coh(t, x))
                })
            });
            if ok {
                go(p, q, lists, checks, chosen, out, budget)?;
            }
            chosen.pop();
        }
        Ok(())
    }
    go(p, q, &lists, &checks, &mut chosen, &mut out, &budget)?;
    debug_assert!(out.iter().all(|m| validate_modification(m).is_valid()));
    Ok(out)
}

/// The category of pseudonatural transformations `a → b` and modifications.
#[derive(Debug, Clone)]
pub struct HomCategory {
    pub cat: Arc<FinCategory>,
    pub objects: Vec<PseudoNat>,
    pub morphisms: Vec<Modification>,
}

impl HomCategory {
    pub fn index_of(&self, p: &PseudoNat) -> Option<usize> {
        self.objects.iter().position(|q| q == p)
    }
}

/// `hom(a, b)` in the 2-category of pseudofunctors, built exhaustively.
pub fn hom_category(a: &Arc<Pseudofunctor>, b: &Arc<Pseudofunctor>, bound: u64) -> Result<HomCategory> {
    let objects = enumerate_pseudonats(a, b, bound)?;
    let width = objects.len().to_string().len();
    let mut morphisms = Vec::new();
    let mut raw = Vec::new();
    for (i, p) in objects.iter().enumerate() {
        for (j, q) in objects.iter().enumerate() {
            for m in enumerate_modifications(p, q, false, bound)? {
                raw.push((i, j));
                morphisms.push(m);
            }
        }
    }
    let mwidth = morphisms.len().to_string().len();
    let key = |m: &Modification| -> Vec<Vec<usize>> { m.components.iter().map(|n| n.components.clone()).collect() };
    let mut lookup: HashMap<(usize, usize, Vec<Vec<usize>>), usize> = HashMap::new();
    for (k, m) in morphisms.iter().enumerate() {
        lookup.insert((raw[k].0, raw[k].1, key(m)), k);
    }
    let identity: Vec<Option<usize>> = objects
        .iter()
        .enumerate()
        .map(|(i, p)| lookup.get(&(i, i, key(&Modification::identity(p)))).copied())
        .collect();
    let assembled = FinCategory::assemble(
        (0..objects.len()).map(|i| format!("p{i:0width$}")).collect(),
        raw.iter()
            .enumerate()
            .map(|(k, &(i, j))| (format!("m{k:0mwidth$}"), i, j))
            .collect(),
        identity,
        |g, f| {
            if raw[f].1 != raw[g].0 {
                return None;
            }
            let comp = morphisms[f].then(&morphisms[g]);
            lookup.get(&(raw[f].0, raw[g].1, key(&comp))).copied()
        },
    )?;
    // zero-padded identifiers keep the enumeration order
    debug_assert!(assembled.objects.iter().enumerate().all(|(i, &o)| i == o));
    Ok(HomCategory {
        cat: assembled.category,
        objects,
        morphisms,
    })
}

/// A pseudoinverse with invertible unit `1 ⇒ inverse ∘ forward` and counit
/// `forward ∘ inverse ⇒ 1`.
#[derive(Debug, Clone)]
pub struct PseudoInverse {
    pub forward: PseudoNat,
    pub inverse: PseudoNat,
    pub unit: Modification,
    pub counit: Modification,
}

/// Builds a pseudoinverse of a pointwise equivalence: components are adjoint
/// inverses, and the coherence at `t` is the composite
/// `ξ'(y·t) → ξ'((ξξ'y)·t) → ξ'(ξ(ξ'y·t)) → ξ'y·t` of the counit, the
/// inverse coherence of `ξ` and the inverse unit.
pub fn pseudonat_pointwise_pseudoinverse(xi: &PseudoNat) -> Result<PseudoInverse> {
    let c = xi.site().cat().clone();
    let (f, g) = (&xi.source, &xi.target);
    let mut adj = Vec::with_capacity(c.num_objects());
    for u in c.objects() {
        let d = is_equivalence(&xi.components[u]);
        if !d.is_equivalence() {
            return Err(Error::NotPointwiseEquivalence(format!("{} ({d:?})", c.object_id(u))));
        }
        adj.push(promote_to_adjoint_equivalence(&xi.components[u])?);
    }
    let components: Vec<Functor> = adj.iter().map(|a| a.backward.clone()).collect();
    let coherence = c
        .morphisms()
        .map(|t| {
            let (v, u) = (c.dom(t), c.cod(t));
            let fv = f.fiber(v);
            let comps = g
                .fiber(u)
                .objects()
                .map(|y| {
                    let x = components[u].obj(y);
                    let eps_inv = g.fiber(u).inv(adj[u].counit.at(y));
                    let step1 = components[v].mor(g.res_mor(t, eps_inv));
                    let step2 = components[v].mor(g.fiber(v).inv(xi.coh(t, x)));
                    let step3 = fv.inv(adj[v].unit.at(f.res_obj(t, x)));
                    fv.comp(step3, fv.comp(step2, step1))
                })
                .collect();
            NatTrans {
                source: components[v].after(g.restriction(t)),
                target: f.restriction(t).after(&components[u]),
                components: comps,
            }
        })
        .collect();
    let inverse = PseudoNat {
        source: g.clone(),
        target: f.clone(),
        components,
        coherence,
    };
    validate_pseudonat(&inverse).into_result("pseudoinverse")?;
    let unit = Modification {
        source: PseudoNat::identity(f),
        target: inverse.after(xi),
        components: adj.iter().map(|a| a.unit.clone()).collect(),
    };
    let counit = Modification {
        source: xi.after(&inverse),
        target: PseudoNat::identity(g),
        components: adj.iter().map(|a| a.counit.clone()).collect(),
    };
    validate_modification(&unit).into_result("pseudoinverse unit")?;
    validate_modification(&counit).into_result("pseudoinverse counit")?;
    Ok(PseudoInverse {
        forward: xi.clone(),
        inverse,
        unit,
        counit,
    })
}
