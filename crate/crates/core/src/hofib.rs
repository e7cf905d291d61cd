//! Lifting problems between maps of prestacks, weak equivalences and
//! fibrant objects.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::bound::{default_bound, Budget};
use crate::descent::{
    amalgamate, descent_datum_over, gamma_hat_component, is_local_fibration, is_lwe, is_stack, pushforward_morphism,
    pushforward_object, DescentContext, DescentMorphism, DescentObject, FibrationDecision, SquareData,
};
use crate::factor::{path_object_prestack, PathObject};
use crate::fincat::{unique_preimage, Functor, NatTrans};
use crate::pstack::{
    bang, diagonal, enumerate_modifications, enumerate_pseudonats, hom_category, sieve_subfunctor, terminal_prestack,
    validate_modification, validate_pseudonat, HomCategory, Modification, PseudoInverse, PseudoNat, Pseudofunctor,
};
use crate::site::Site;
use crate::validation::ValidationReport;
use crate::{Error, Result};

/// A square from `f: A → B` to `g: C → D`: `h: A → C`, `k: B → D` and an
/// invertible `γ: g∘h ⇒ k∘f`.
#[derive(Debug, Clone)]
pub struct Square {
    pub f: PseudoNat,
    pub g: PseudoNat,
    pub h: PseudoNat,
    pub k: PseudoNat,
    pub gamma: Modification,
}

impl Square {
    pub fn new(f: PseudoNat, g: PseudoNat, h: PseudoNat, k: PseudoNat, gamma: Modification) -> Result<Square> {
        let sq = Square { f, g, h, k, gamma };
        sq.validate().into_result("square")?;
        Ok(sq)
    }

    /// The identity square on `f`.
    pub fn identity(f: &PseudoNat) -> Square {
        Square {
            f: f.clone(),
            g: f.clone(),
            h: PseudoNat::identity(&f.source),
            k: PseudoNat::identity(&f.target),
            gamma: Modification::identity(f),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        for (name, p) in [("f", &self.f), ("g", &self.g), ("h", &self.h), ("k", &self.k)] {
            r.extend_prefixed(name, validate_pseudonat(p));
        }
        if !r.is_valid() {
            return r;
        }
        let gh = self.g.after(&self.h);
        let kf = self.k.after(&self.f);
        if self.gamma.source != gh || self.gamma.target != kf {
            r.push("gamma has the wrong type", Vec::<String>::new());
            return r;
        }
        r.extend_prefixed("gamma", validate_modification(&self.gamma));
        if !self.gamma.is_iso() {
            r.push("gamma is not invertible", Vec::<String>::new());
        }
        r
    }

    fn data(&self) -> SquareData<'_> {
        SquareData {
            h: &self.h,
            k: &self.k,
            gamma: &self.gamma,
        }
    }
}

/// `(l∘h, m∘k)` with 2-cell `(m∗γ1)·(γ2∗h)`, for `s2` from `g` to `i` and
/// `s1` from `f` to `g`.
pub fn square_hcompose(s2: &Square, s1: &Square) -> Result<Square> {
    if s1.g != s2.f {
        return Err(Error::shape("squares are not composable"));
    }
    let first = s2.gamma.whisker_before(&s1.h);
    let second = s1.gamma.whisker_after(&s2.k);
    let h = s2.h.after(&s1.h);
    let k = s2.k.after(&s1.k);
    let mut gamma = first.then(&second);
    gamma.source = s2.g.after(&h);
    gamma.target = k.after(&s1.f);
    Square::new(s1.f.clone(), s2.g.clone(), h, k, gamma)
}

/// A 2-cell between squares with the same `f` and `g`: `φ0: h ⇒ h'`,
/// `φ1: k ⇒ k'`.
#[derive(Debug, Clone)]
pub struct SquareCell {
    pub phi0: Modification,
    pub phi1: Modification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellDecision {
    pub holds: bool,
    /// `(object, element)` where the exchange law fails
    pub witness: Option<(String, String)>,
}

/// Checks `γ'·(g∗φ0) = (φ1∗f)·γ` componentwise.
pub fn check_square_cell(cell: &SquareCell, from: &Square, to: &Square) -> Result<CellDecision> {
    if from.f != to.f || from.g != to.g {
        return Err(Error::shape("squares have different sides"));
    }
    if cell.phi0.source != from.h || cell.phi0.target != to.h || cell.phi1.source != from.k || cell.phi1.target != to.k
    {
        return Err(Error::shape("cell has the wrong type"));
    }
    if !cell.phi0.is_iso() || !cell.phi1.is_iso() {
        return Err(Error::shape("cell components are not invertible"));
    }
    let f = &from.f;
    let g = &from.g;
    let c = f.site().cat().clone();
    let d = &g.target;
    for u in c.objects() {
        let fib = d.fiber(u);
        for a in f.source.fiber(u).objects() {
            let lhs = fib.comp(to.gamma.at(u, a), g.mor(u, cell.phi0.at(u, a)));
            let rhs = fib.comp(cell.phi1.at(u, f.obj(u, a)), from.gamma.at(u, a));
            if lhs != rhs {
                return Ok(CellDecision {
                    holds: false,
                    witness: Some((c.object_id(u).to_string(), f.source.fiber(u).object_id(a).to_string())),
                });
            }
        }
    }
    Ok(CellDecision {
        holds: true,
        witness: None,
    })
}

/// A solution of a lifting problem: `l: B → C`, `λ: h ⇒ l∘f`, `ρ: g∘l ⇒ k`.
#[derive(Debug, Clone)]
pub struct LiftSolution {
    pub l: PseudoNat,
    pub lambda: Modification,
    pub rho: Modification,
}

/// Checks types, invertibility and the pasting equality `γ = (ρ∗f)·(g∗λ)`.
pub fn check_lift(sq: &Square, sol: &LiftSolution) -> ValidationReport {
    let mut r = ValidationReport::new();
    r.extend_prefixed("l", validate_pseudonat(&sol.l));
    if !r.is_valid() {
        return r;
    }
    if sol.lambda.source != sq.h || sol.lambda.target != sol.l.after(&sq.f) {
        r.push("lambda has the wrong type", Vec::<String>::new());
    }
    if sol.rho.source != sq.g.after(&sol.l) || sol.rho.target != sq.k {
        r.push("rho has the wrong type", Vec::<String>::new());
    }
    if !r.is_valid() {
        return r;
    }
    r.extend_prefixed("lambda", validate_modification(&sol.lambda));
    r.extend_prefixed("rho", validate_modification(&sol.rho));
    if !sol.lambda.is_iso() || !sol.rho.is_iso() {
        r.push("lift 2-cells are not invertible", Vec::<String>::new());
    }
    if !r.is_valid() {
        return r;
    }
    let c = sq.f.site().cat().clone();
    for u in c.objects() {
        let fib = sq.g.target.fiber(u);
        for a in sq.f.source.fiber(u).objects() {
            let pasted = fib.comp(sol.rho.at(u, sq.f.obj(u, a)), sq.g.mor(u, sol.lambda.at(u, a)));
            if pasted != sq.gamma.at(u, a) {
                r.push(
                    "pasting",
                    [
                        c.object_id(u).to_string(),
                        sq.f.source.fiber(u).object_id(a).to_string(),
                    ],
                );
            }
        }
    }
    r
}

fn pasting_holds(sq: &Square, l: &PseudoNat, lambda: &Modification, rho: &Modification) -> bool {
    let c = l.site().cat();
    c.objects().all(|u| {
        let fib = sq.g.target.fiber(u);
        sq.f.source
            .fiber(u)
            .objects()
            .all(|a| fib.comp(rho.at(u, sq.f.obj(u, a)), sq.g.mor(u, lambda.at(u, a))) == sq.gamma.at(u, a))
    })
}

fn solve_with(sq: &Square, l: &PseudoNat, bound: u64) -> Result<Option<LiftSolution>> {
    let lf = l.after(&sq.f);
    let gl = sq.g.after(l);
    let lambdas = enumerate_modifications(&sq.h, &lf, true, bound)?;
    if lambdas.is_empty() {
        return Ok(None);
    }
    let rhos = enumerate_modifications(&gl, &sq.k, true, bound)?;
    for rho in &rhos {
        for lambda in &lambdas {
            if pasting_holds(sq, l, lambda, rho) {
                return Ok(Some(LiftSolution {
                    l: l.clone(),
                    lambda: lambda.clone(),
                    rho: rho.clone(),
                }));
            }
        }
    }
    Ok(None)
}

/// Exhaustive search for a lift, first in canonical order of `l`, then `ρ`,
/// then `λ`.
pub fn search_lift(sq: &Square) -> Result<Option<LiftSolution>> {
    search_lift_bounded(sq, default_bound())
}

pub fn search_lift_bounded(sq: &Square, bound: u64) -> Result<Option<LiftSolution>> {
    let candidates = enumerate_pseudonats(&sq.f.target, &sq.g.source, bound)?;
    let results: Vec<Result<Option<LiftSolution>>> = candidates.par_iter().map(|l| solve_with(sq, l, bound)).collect();
    for r in results {
        if let Some(sol) = r? {
            return Ok(Some(sol));
        }
    }
    Ok(None)
}

fn internal(what: &str, detail: impl std::fmt::Display) -> Error {
    Error::InternalAmalgamationFailure(format!("{what}: {detail}"))
}

/// Builds a lift for `f` a local weak equivalence and `g` a local fibration
/// by amalgamating pushed-forward descent data over the minimal covering
/// sieve of each object.
pub fn construct_lift(sq: &Square) -> Result<LiftSolution> {
    sq.validate().into_result("square")?;
    let lwe = is_lwe(&sq.f)?;
    if let Some(w) = lwe.witness {
        return Err(Error::NotLwe(format!(
            "{} at {}: {}",
            w.reason,
            w.object,
            w.detail.join(", ")
        )));
    }
    let fib = is_local_fibration(&sq.g)?;
    if let Some(w) = fib.witness {
        return Err(Error::NotLocalFibration(format!(
            "{} at {} over ({}): {}",
            w.reason,
            w.object,
            w.cover.join(", "),
            w.detail.join(", ")
        )));
    }
    construct_lift_unchecked(sq)
}

struct Amalgamated {
    ctx_f: DescentContext,
    ctx_g: DescentContext,
    data: Vec<DescentObject>,
    objects: Vec<usize>,
    alpha: Vec<DescentMorphism>,
}

fn construct_lift_unchecked(sq: &Square) -> Result<LiftSolution> {
    let (f, g, h, k) = (&sq.f, &sq.g, &sq.h, &sq.k);
    let site = f.site().clone();
    let cat = site.cat().clone();
    let (a_pf, b_pf, c_pf, d_pf) = (&f.source, &f.target, &g.source, &g.target);
    let sqd = sq.data();

    let mut per: Vec<Amalgamated> = Vec::with_capacity(cat.num_objects());
    for u in cat.objects() {
        let cover = site.minimal_covering_sieve(u).to_family();
        let ctx_f = DescentContext::new(f, &cover)?;
        let ctx_g = DescentContext::new(g, &cover)?;
        let mut data = Vec::new();
        let mut objects = Vec::new();
        let mut alpha = Vec::new();
        for b in b_pf.fiber(u).objects() {
            let d = descent_datum_over(&ctx_f, b)?.ok_or_else(|| {
                Error::NotLwe(format!(
                    "{} has no local preimages over the minimal covering sieve",
                    b_pf.fiber(u).object_id(b)
                ))
            })?;
            let pushed = pushforward_object(&sqd, &ctx_f, &ctx_g, &d);
            let (x, iso) = amalgamate(&ctx_g, &pushed).map_err(|e| match e {
                Error::NoAmalgamation(m) => internal("no amalgamation", m),
                other => other,
            })?;
            data.push(d);
            objects.push(x);
            alpha.push(iso);
        }
        per.push(Amalgamated {
            ctx_f,
            ctx_g,
            data,
            objects,
            alpha,
        });
    }

    // l on morphisms: canonical lifts of the induced descent morphisms
    let mut components = Vec::with_capacity(cat.num_objects());
    for u in cat.objects() {
        let am = &per[u];
        let fb = b_pf.fiber(u);
        let mut mor_map = Vec::with_capacity(fb.num_morphisms());
        for m in fb.morphisms() {
            let (b0, b1) = (fb.dom(m), fb.cod(m));
            let (d0, d1) = (&am.data[b0], &am.data[b1]);
            let sections = (0..am.ctx_f.len())
                .map(|j| {
                    let s = am.ctx_f.cover.members[j];
                    let w = cat.dom(s);
                    let bw = b_pf.fiber(w);
                    let target = bw.comp(bw.inv(d1.psi[j]), bw.comp(b_pf.res_mor(s, m), d0.psi[j]));
                    unique_preimage(&f.components[w], d0.sections[j], d1.sections[j], target)
                        .ok_or_else(|| internal("no canonical lift of a local section", b_pf.fiber(u).morphism_id(m)))
                })
                .collect::<Result<Vec<_>>>()?;
            let dm = DescentMorphism { base: m, sections };
            let pushed = pushforward_morphism(&sqd, &am.ctx_f, &dm);
            let back = am
                .ctx_g
                .inverse(&am.alpha[b1])
                .ok_or_else(|| internal("amalgamation iso is not invertible", ""))?;
            let total = am.ctx_g.compose(&back, &am.ctx_g.compose(&pushed, &am.alpha[b0]));
            let lm = am
                .ctx_g
                .phi_preimage(am.objects[b0], am.objects[b1], &total)
                .ok_or_else(|| internal("descent morphism has no preimage", fb.morphism_id(m)))?;
            mor_map.push(lm);
        }
        let lu = Functor {
            source: fb.clone(),
            target: c_pf.fiber(u).clone(),
            obj_map: am.objects.clone(),
            mor_map,
        };
        lu.validate().into_result("lifted component")?;
        components.push(lu);
    }

    let rho_at = |u: usize, b: usize| per[u].alpha[b].base;

    // coherence of l along t: V → U
    let mut coherence = Vec::with_capacity(cat.num_morphisms());
    for t in cat.morphisms() {
        let (v, u) = (cat.dom(t), cat.cod(t));
        let (au, av) = (&per[u], &per[v]);
        let dv = d_pf.fiber(v);
        let mut comps = Vec::new();
        for b in b_pf.fiber(u).objects() {
            let bt = b_pf.res_obj(t, b);
            let lb = au.objects[b];
            let base = dv.comp(
                dv.inv(g.coh(t, lb)),
                dv.comp(
                    dv.inv(d_pf.res_mor(t, rho_at(u, b))),
                    dv.comp(k.coh(t, b), rho_at(v, bt)),
                ),
            );
            let mut sections = Vec::with_capacity(av.ctx_g.len());
            for (beta, &s) in av.ctx_g.cover.members.iter().enumerate() {
                let ts = cat.comp(t, s);
                let j = au
                    .ctx_g
                    .cover
                    .members
                    .iter()
                    .position(|&m| m == ts)
                    .ok_or_else(|| internal("covering sieve does not refine its pullback", cat.morphism_id(ts)))?;
                let w = cat.dom(s);
                let (cw, bw) = (c_pf.fiber(w), b_pf.fiber(w));
                let (dbt, db) = (&av.data[bt], &au.data[b]);
                let target = bw.comp(
                    bw.inv(db.psi[j]),
                    bw.comp(b_pf.reassoc(u, b, &[t, s], &[ts]), dbt.psi[beta]),
                );
                let lift = unique_preimage(&f.components[w], dbt.sections[beta], db.sections[j], target)
                    .ok_or_else(|| internal("no canonical lift of a local section", cat.morphism_id(t)))?;
                let sec = cw.comp(
                    c_pf.reassoc(u, lb, &[ts], &[t, s]),
                    cw.comp(
                        cw.inv(au.alpha[b].sections[j]),
                        cw.comp(h.mor(w, lift), av.alpha[bt].sections[beta]),
                    ),
                );
                sections.push(sec);
            }
            let dm = DescentMorphism { base, sections };
            let x = av
                .ctx_g
                .phi_preimage(av.objects[bt], c_pf.res_obj(t, lb), &dm)
                .ok_or_else(|| {
                    internal(
                        "coherence has no preimage",
                        format!("{} at {}", cat.morphism_id(t), b_pf.fiber(u).object_id(b)),
                    )
                })?;
            comps.push(x);
        }
        coherence.push(NatTrans {
            source: components[v].after(b_pf.restriction(t)),
            target: c_pf.restriction(t).after(&components[u]),
            components: comps,
        });
    }
    let l = PseudoNat {
        source: b_pf.clone(),
        target: c_pf.clone(),
        components,
        coherence,
    };
    validate_pseudonat(&l)
        .into_result("lift")
        .map_err(|e| internal("lift is not pseudonatural", e))?;

    // λ: h ⇒ l∘f through γ̂ and the amalgamation isos
    let lf = l.after(f);
    let mut lambda_components = Vec::with_capacity(cat.num_objects());
    for u in cat.objects() {
        let am = &per[u];
        let mut comps = Vec::new();
        for a in a_pf.fiber(u).objects() {
            let b = f.obj(u, a);
            let d = &am.data[b];
            let sections = am
                .ctx_f
                .cover
                .members
                .iter()
                .enumerate()
                .map(|(j, &s)| {
                    let w = cat.dom(s);
                    let bw = b_pf.fiber(w);
                    let target = bw.comp(bw.inv(d.psi[j]), f.coh(s, a));
                    unique_preimage(&f.components[w], a_pf.res_obj(s, a), d.sections[j], target)
                        .ok_or_else(|| internal("no canonical lift of a local section", cat.morphism_id(s)))
                })
                .collect::<Result<Vec<_>>>()?;
            let to_datum = DescentMorphism {
                base: b_pf.fiber(u).identity(b),
                sections,
            };
            let pushed = pushforward_morphism(&sqd, &am.ctx_f, &to_datum);
            let hat = gamma_hat_component(&sqd, &am.ctx_f, a);
            let back = am
                .ctx_g
                .inverse(&am.alpha[b])
                .ok_or_else(|| internal("amalgamation iso is not invertible", ""))?;
            let total = am.ctx_g.compose(&back, &am.ctx_g.compose(&pushed, &hat));
            let x = am
                .ctx_g
                .phi_preimage(h.obj(u, a), am.objects[b], &total)
                .ok_or_else(|| internal("lambda has no preimage", a_pf.fiber(u).object_id(a)))?;
            comps.push(x);
        }
        lambda_components.push(NatTrans {
            source: h.components[u].clone(),
            target: lf.components[u].clone(),
            components: comps,
        });
    }
    let lambda = Modification {
        source: h.clone(),
        target: lf,
        components: lambda_components,
    };
    let gl = g.after(&l);
    let rho = Modification {
        source: gl.clone(),
        target: k.clone(),
        components: cat
            .objects()
            .map(|u| NatTrans {
                source: gl.components[u].clone(),
                target: k.components[u].clone(),
                components: b_pf.fiber(u).objects().map(|b| rho_at(u, b)).collect(),
            })
            .collect(),
    };
    let sol = LiftSolution { l, lambda, rho };
    check_lift(sq, &sol)
        .into_result("constructed lift")
        .map_err(|e| internal("constructed lift fails its checks", e))?;
    Ok(sol)
}

/// Object maps of a pseudonatural transformation, for witnesses.
pub fn describe_pseudonat(p: &PseudoNat) -> String {
    let c = p.site().cat();
    let parts: Vec<String> = c
        .objects()
        .map(|u| {
            let (s, t) = (p.source.fiber(u), p.target.fiber(u));
            let maps: Vec<String> = s
                .objects()
                .map(|x| format!("{}->{}", s.object_id(x), t.object_id(p.obj(u, x))))
                .collect();
            format!("{}:{{{}}}", c.object_id(u), maps.join(","))
        })
        .collect();
    parts.join(" ")
}

/// A square without a lift.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquareWitness {
    pub h: String,
    pub k: String,
    /// position of `γ` among the invertible 2-cells of this `(h, k)`
    pub gamma: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PitchforkDecision {
    pub holds: bool,
    pub squares: usize,
    pub witness: Option<SquareWitness>,
}

/// Every square from `f` to `g`, in canonical order of `h`, `k`, `γ`.
pub fn enumerate_squares(f: &PseudoNat, g: &PseudoNat, bound: u64) -> Result<Vec<(Square, usize)>> {
    let budget = Budget::new(bound, "enumerating squares");
    let hs = enumerate_pseudonats(&f.source, &g.source, bound)?;
    let ks = enumerate_pseudonats(&f.target, &g.target, bound)?;
    let mut out = Vec::new();
    for h in &hs {
        let gh = g.after(h);
        for k in &ks {
            let kf = k.after(f);
            for (i, gamma) in enumerate_modifications(&gh, &kf, true, bound)?.into_iter().enumerate() {
                budget.tick()?;
                out.push((
                    Square {
                        f: f.clone(),
                        g: g.clone(),
                        h: h.clone(),
                        k: k.clone(),
                        gamma,
                    },
                    i,
                ));
            }
        }
    }
    Ok(out)
}

/// `f ⋔ g`: every square from `f` to `g` has a lift.
pub fn pitchfork(f: &PseudoNat, g: &PseudoNat) -> Result<PitchforkDecision> {
    pitchfork_bounded(f, g, default_bound())
}

pub fn pitchfork_bounded(f: &PseudoNat, g: &PseudoNat, bound: u64) -> Result<PitchforkDecision> {
    let squares = enumerate_squares(f, g, bound)?;
    let lifts: Vec<Result<bool>> = squares
        .par_iter()
        .map(|(sq, _)| search_lift_bounded(sq, bound).map(|s| s.is_some()))
        .collect();
    for ((sq, i), found) in squares.iter().zip(lifts) {
        if !found? {
            return Ok(PitchforkDecision {
                holds: false,
                squares: squares.len(),
                witness: Some(SquareWitness {
                    h: describe_pseudonat(&sq.h),
                    k: describe_pseudonat(&sq.k),
                    gamma: *i,
                }),
            });
        }
    }
    Ok(PitchforkDecision {
        holds: true,
        squares: squares.len(),
        witness: None,
    })
}

/// A named map of the weak-equivalence corpus.
#[derive(Debug, Clone)]
pub struct NamedMap {
    pub name: String,
    pub map: PseudoNat,
}

/// Inclusions `Ŝ ↪ yU` of every covering sieve of every object; these are
/// the local weak equivalences lifting problems against which detect local
/// fibrations.
pub fn sieve_inclusions(site: &Arc<Site>) -> Vec<NamedMap> {
    let c = site.cat();
    let mut out = Vec::new();
    for u in c.objects() {
        for s in site.covering_sieves(u) {
            let (_, _, incl) = sieve_subfunctor(site, s);
            out.push(NamedMap {
                name: format!("incl({})", s.describe(c)),
                map: incl,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FibrantDecision {
    pub holds: bool,
    /// the weak equivalence and square that fail to lift
    pub witness: Option<(String, SquareWitness)>,
}

/// `W ⋔ A` for the given corpus of weak equivalences.
pub fn is_fibrant(a: &Arc<Pseudofunctor>, w: &[NamedMap]) -> Result<FibrantDecision> {
    is_fibrant_bounded(a, w, default_bound())
}

pub fn is_fibrant_bounded(a: &Arc<Pseudofunctor>, w: &[NamedMap], bound: u64) -> Result<FibrantDecision> {
    let to_one = bang(a, &terminal_prestack(a.site()));
    for m in w {
        let d = pitchfork_bounded(&m.map, &to_one, bound)?;
        if let Some(sq) = d.witness {
            return Ok(FibrantDecision {
                holds: false,
                witness: Some((m.name.clone(), sq)),
            });
        }
    }
    Ok(FibrantDecision {
        holds: true,
        witness: None,
    })
}

/// `f`, `g`, `h` with invertible `γ: f ⇒ h∘g`.
#[derive(Debug, Clone)]
pub struct Triangle {
    pub f: PseudoNat,
    pub g: PseudoNat,
    pub h: PseudoNat,
    pub gamma: Modification,
}

impl Triangle {
    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        if self.gamma.source != self.f || self.gamma.target != self.h.after(&self.g) {
            r.push("gamma has the wrong type", Vec::<String>::new());
            return r;
        }
        r.extend_prefixed("gamma", validate_modification(&self.gamma));
        if !self.gamma.is_iso() {
            r.push("gamma is not invertible", Vec::<String>::new());
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThreeForTwoReport {
    pub f: bool,
    pub g: bool,
    pub h: bool,
    /// false exactly when two sides are weak equivalences and the third is not
    pub consistent: bool,
}

pub fn three_for_two(t: &Triangle) -> Result<ThreeForTwoReport> {
    t.validate().into_result("triangle")?;
    let f = is_lwe(&t.f)?.holds;
    let g = is_lwe(&t.g)?.holds;
    let h = is_lwe(&t.h)?.holds;
    let count = [f, g, h].iter().filter(|&&x| x).count();
    Ok(ThreeForTwoReport {
        f,
        g,
        h,
        consistent: count != 2,
    })
}

/// Checks the fibrant-object axioms for a replacement `replace(A) = (QA, η_A)`
/// over a corpus: identities are weak equivalences, three-for-two on the
/// given triangles, every `η_A` is a weak equivalence and every `QA` is
/// fibrant with respect to `w`.
pub fn validate_sfo<F>(
    corpus: &[(String, Arc<Pseudofunctor>)],
    replace: F,
    triangles: &[Triangle],
    w: &[NamedMap],
    bound: u64,
) -> Result<ValidationReport>
where
    F: Fn(&Arc<Pseudofunctor>) -> Result<(Arc<Pseudofunctor>, PseudoNat)>,
{
    let mut r = ValidationReport::new();
    for (name, a) in corpus {
        if !is_lwe(&PseudoNat::identity(a))?.holds {
            r.push("identity is not a weak equivalence", [name.clone()]);
        }
    }
    for (i, t) in triangles.iter().enumerate() {
        if !three_for_two(t)?.consistent {
            r.push("three-for-two", [i.to_string()]);
        }
    }
    for (name, a) in corpus {
        let (qa, eta) = replace(a)?;
        if !is_lwe(&eta)?.holds {
            r.push("replacement unit is not a weak equivalence", [name.clone()]);
        }
        if let Some((m, _)) = is_fibrant_bounded(&qa, w, bound)?.witness {
            r.push("replacement is not fibrant", [name.clone(), m]);
        }
    }
    Ok(r)
}

/// A pseudoinverse of a weak equivalence between stacks: the inverse and
/// unit come from lifting against the source's map to 1, the counit is the
/// first invertible modification `f∘l ⇒ 1`.
pub fn lwe_between_fibrants_to_equivalence(f: &PseudoNat) -> Result<PseudoInverse> {
    let (a, b) = (&f.source, &f.target);
    if !is_stack(a)?.holds || !is_stack(b)?.holds {
        return Err(Error::NotLocalFibration("endpoints are not both stacks".into()));
    }
    let one = terminal_prestack(a.site());
    let a_one = bang(a, &one);
    let b_one = bang(b, &one);
    let h = PseudoNat::identity(a);
    let mut gamma = Modification::identity(&a_one.after(&h));
    gamma.target = b_one.after(f);
    let sq = Square::new(f.clone(), a_one, h, b_one, gamma)?;
    let sol = construct_lift(&sq)?;
    let fl = f.after(&sol.l);
    let counit = enumerate_modifications(&fl, &PseudoNat::identity(b), true, default_bound())?
        .into_iter()
        .next()
        .ok_or_else(|| Error::NotPointwiseEquivalence("no invertible counit".into()))?;
    Ok(PseudoInverse {
        forward: f.clone(),
        inverse: sol.l,
        unit: sol.lambda,
        counit,
    })
}

/// Stacks of a corpus with their hom-categories.
#[derive(Debug, Clone)]
pub struct HomotopyTwoCategory {
    pub objects: Vec<(String, Arc<Pseudofunctor>)>,
    /// `homs[i][j]` is `hom(objects[i], objects[j])`
    pub homs: Vec<Vec<HomCategory>>,
}

/// Keeps the stacks of `corpus` and adds `replace(A)` for every other
/// member, then computes all hom-categories.
pub fn homotopy_2category<F>(
    corpus: &[(String, Arc<Pseudofunctor>)],
    replace: F,
    bound: u64,
) -> Result<HomotopyTwoCategory>
where
    F: Fn(&Arc<Pseudofunctor>) -> Result<Arc<Pseudofunctor>>,
{
    let mut objects = Vec::new();
    for (name, a) in corpus {
        if is_stack(a)?.holds {
            objects.push((name.clone(), a.clone()));
        } else {
            objects.push((format!("I({name})"), replace(a)?));
        }
    }
    let mut homs = Vec::with_capacity(objects.len());
    for (_, x) in &objects {
        let row = objects
            .iter()
            .map(|(_, y)| hom_category(x, y, bound))
            .collect::<Result<Vec<_>>>()?;
        homs.push(row);
    }
    Ok(HomotopyTwoCategory { objects, homs })
}

/// `A → P_A → A × A` from the factorization of the diagonal, with the
/// endpoint maps `d_i = pr_i ∘ Q(Δ_A)` and `d_i ∘ η ⇒ 1_A`.
#[derive(Debug, Clone)]
pub struct PathObjectOf {
    pub path: PathObject,
    pub d0: PseudoNat,
    pub d1: PseudoNat,
    pub retractions: [Modification; 2],
    pub fibrations: [FibrationDecision; 2],
}

impl PathObjectOf {
    pub fn holds(&self) -> bool {
        self.fibrations.iter().all(|d| d.holds)
            && self
                .retractions
                .iter()
                .all(|m| m.is_iso() && validate_modification(m).is_valid())
    }
}

pub fn path_object(a: &Arc<Pseudofunctor>) -> Result<PathObjectOf> {
    let (prod, delta) = diagonal(a);
    let path = path_object_prestack(&delta)?;
    let (pr0, pr1) = prod.projections();
    let d0 = pr0.after(&path.q);
    let d1 = pr1.after(&path.q);
    let id = PseudoNat::identity(a);
    // d_i ∘ η = pr_i ∘ Δ, which is the identity on objects and arrows
    let retraction = |d: &PseudoNat| -> Result<Modification> {
        let source = d.after(&path.eta);
        let components = source
            .components
            .iter()
            .enumerate()
            .map(|(u, f)| {
                let fib = a.fiber(u);
                NatTrans {
                    source: f.clone(),
                    target: id.components[u].clone(),
                    components: fib.objects().map(|x| fib.identity(x)).collect(),
                }
            })
            .collect();
        let m = Modification {
            source,
            target: id.clone(),
            components,
        };
        validate_modification(&m).into_result("path-object retraction")?;
        Ok(m)
    };
    let retractions = [retraction(&d0)?, retraction(&d1)?];
    let fibrations = [is_local_fibration(&d0)?, is_local_fibration(&d1)?];
    Ok(PathObjectOf {
        path,
        d0,
        d1,
        retractions,
        fibrations,
    })
}

#[cfg(test)]
mod tests;
