use std::sync::Arc;

use serde_json::{json, Value};

use super::report::{InputRef, Report};
use super::workspace::{Document, MapEntry, PfEntry, Workspace};
use super::{Check, Method};
use crate::bound::default_bound;
use crate::descent::{build_descent_category_bounded, covers_of, is_local_fibration, is_lwe, is_stack, phi, CoverMode};
use crate::factor::{
    factor_through_isocomma, isocomma as isocomma_of, isocomma_mediator, mediator_equations, path_object_prestack,
    stackify as stackify_of, verify_factorization,
};
use crate::fincat::is_equivalence;
use crate::hofib::{
    check_lift, construct_lift, describe_pseudonat, enumerate_squares, homotopy_2category, is_fibrant_bounded,
    search_lift_bounded, sieve_inclusions, SquareWitness,
};
use crate::laws;
use crate::pstack::{is_prestack, PseudoNat, Pseudofunctor};
use crate::site::{CoverFamily, Site};
use crate::{Error, Result};

fn pf_input(e: &PfEntry) -> InputRef {
    InputRef {
        name: format!("{}/{}", e.site, e.name),
        hash: e.hash.clone(),
    }
}

fn map_input(e: &MapEntry) -> InputRef {
    InputRef {
        name: format!("{}/{}", e.site, e.name),
        hash: e.hash.clone(),
    }
}

fn fiber_sizes(pf: &Pseudofunctor) -> Value {
    let c = pf.cat();
    Value::Array(
        c.objects()
            .map(|u| {
                let f = pf.fiber(u);
                json!({ "object": c.object_id(u), "objects": f.num_objects(), "morphisms": f.num_morphisms() })
            })
            .collect(),
    )
}

fn site_of<'a>(ws: &'a Workspace, name: &str) -> Result<&'a Arc<Site>> {
    Ok(&ws.site(name)?.site)
}

pub fn validate(ws: &Workspace) -> Report {
    let mut inputs = Vec::new();
    let sites: Vec<Value> = ws
        .sites
        .iter()
        .map(|s| {
            inputs.push(InputRef {
                name: s.name.clone(),
                hash: s.hash.clone(),
            });
            let c = s.site.cat();
            json!({
                "name": s.name,
                "file": s.provenance.file,
                "line": s.provenance.line,
                "objects": c.num_objects(),
                "morphisms": c.num_morphisms(),
                "covering_sieves": c.objects().map(|u| s.site.covering_sieves(u).len()).sum::<usize>(),
            })
        })
        .collect();
    let pfs: Vec<Value> = ws
        .pseudofunctors
        .iter()
        .map(|p| {
            inputs.push(pf_input(p));
            json!({ "name": format!("{}/{}", p.site, p.name), "file": p.provenance.file, "line": p.provenance.line })
        })
        .collect();
    let maps: Vec<Value> = ws
        .maps
        .iter()
        .map(|m| {
            inputs.push(map_input(m));
            json!({
                "name": format!("{}/{}", m.site, m.name),
                "source": m.source,
                "target": m.target,
                "file": m.provenance.file,
                "line": m.provenance.line,
            })
        })
        .collect();
    Report::new("validate", inputs, true).result(json!({ "sites": sites, "pseudofunctors": pfs, "maps": maps }))
}

pub fn check(ws: &Workspace, what: &Check) -> Result<Report> {
    match what {
        Check::Prestack { pseudofunctor } => {
            let e = ws.pseudofunctor(pseudofunctor)?;
            let d = is_prestack(&e.pf)?;
            Ok(Report::new("check prestack", vec![pf_input(e)], d.prestack).witness(d.witness))
        }
        Check::Stack { pseudofunctor } => {
            let e = ws.pseudofunctor(pseudofunctor)?;
            let d = is_stack(&e.pf)?;
            Ok(Report::new("check stack", vec![pf_input(e)], d.holds).witness(d.witness))
        }
        Check::LocalFib { map } => {
            let e = ws.map(map)?;
            let d = is_local_fibration(&e.map)?;
            Ok(Report::new("check local-fib", vec![map_input(e)], d.holds).witness(d.witness))
        }
        Check::Lwe { map } => {
            let e = ws.map(map)?;
            let d = is_lwe(&e.map)?;
            Ok(Report::new("check lwe", vec![map_input(e)], d.holds).witness(d.witness))
        }
        Check::Fibrant { pseudofunctor } => {
            let e = ws.pseudofunctor(pseudofunctor)?;
            let w = sieve_inclusions(e.pf.site());
            let d = is_fibrant_bounded(&e.pf, &w, default_bound())?;
            let names: Vec<&str> = w.iter().map(|m| m.name.as_str()).collect();
            Ok(Report::new("check fibrant", vec![pf_input(e)], d.holds)
                .witness(d.witness.map(|(name, sq)| json!({ "against": name, "square": sq })))
                .result(json!({ "weak_equivalences": names })))
        }
    }
}

pub fn desc(ws: &Workspace, map: &str, object: &str, cover: Option<&[String]>) -> Result<Report> {
    let e = ws.map(map)?;
    let site = site_of(ws, &e.site)?;
    let c = site.cat();
    let u = c
        .object_index(object)
        .ok_or_else(|| Error::UnknownEntity(format!("object {object} of site {}", e.site)))?;
    let covers = match cover {
        None => covers_of(site, u, CoverMode::Basis),
        Some(ids) => {
            let members = ids
                .iter()
                .filter(|s| !s.is_empty())
                .map(|id| {
                    let m = c
                        .morphism_index(id)
                        .ok_or_else(|| Error::UnknownEntity(format!("arrow {id} of site {}", e.site)))?;
                    if c.cod(m) != u {
                        return Err(Error::shape(format!("arrow {id} does not end at {object}")));
                    }
                    Ok(m)
                })
                .collect::<Result<Vec<_>>>()?;
            vec![CoverFamily { apex: u, members }]
        }
    };
    let mut holds = true;
    let mut witness = None;
    let mut rows = Vec::new();
    for fam in &covers {
        let ids: Vec<&str> = fam.members.iter().map(|&m| c.morphism_id(m)).collect();
        let d = build_descent_category_bounded(&e.map, fam, default_bound())?;
        let dec = is_equivalence(&phi(&d)?);
        if !dec.is_equivalence() && witness.is_none() {
            witness = Some(json!({ "cover": ids, "comparison": dec }));
        }
        holds &= dec.is_equivalence();
        rows.push(json!({
            "cover": ids,
            "covering": site.is_covering(&site.generate_sieve(fam)),
            "objects": (0..d.cat.num_objects()).map(|x| d.cat.object_id(x)).collect::<Vec<_>>(),
            "morphisms": d.cat.num_morphisms(),
            "comparison": {
                "full": dec.full(),
                "faithful": dec.faithful(),
                "essentially_surjective": dec.essentially_surjective(),
            },
        }));
    }
    Ok(Report::new("desc", vec![map_input(e)], holds)
        .witness(witness)
        .result(json!({ "object": object, "covers": rows })))
}

pub fn lift(ws: &Workspace, f: &str, g: &str, construct: bool, only: Option<usize>) -> Result<Report> {
    let (ef, eg) = (ws.map(f)?, ws.map(g)?);
    let squares = enumerate_squares(&ef.map, &eg.map, default_bound())?;
    let selected: Vec<usize> = match only {
        Some(i) if i < squares.len() => vec![i],
        Some(i) => {
            return Err(Error::UnknownEntity(format!(
                "square {i} (there are {})",
                squares.len()
            )))
        }
        None => (0..squares.len()).collect(),
    };
    let mut rows = Vec::new();
    let mut witness = None;
    for i in selected {
        let (sq, gamma) = &squares[i];
        let solution = if construct {
            match construct_lift(sq) {
                Ok(sol) => {
                    let rep = check_lift(sq, &sol);
                    if !rep.is_valid() {
                        return Err(Error::Validation {
                            entity: format!("constructed lift of square {i}"),
                            report: rep,
                        });
                    }
                    Some(sol)
                }
                Err(Error::NotLocalFibration(_)) | Err(Error::NoAmalgamation(_)) => None,
                Err(e) => return Err(e),
            }
        } else {
            search_lift_bounded(sq, default_bound())?
        };
        let square = SquareWitness {
            h: describe_pseudonat(&sq.h),
            k: describe_pseudonat(&sq.k),
            gamma: *gamma,
        };
        if solution.is_none() && witness.is_none() {
            witness = Some(json!({ "square": i, "h": square.h, "k": square.k, "gamma": square.gamma }));
        }
        rows.push(json!({
            "square": i,
            "h": square.h,
            "k": square.k,
            "gamma": square.gamma,
            "lift": solution.as_ref().map(|s| describe_pseudonat(&s.l)),
        }));
    }
    let holds = witness.is_none();
    let judgment = if construct { "lift --construct" } else { "lift --search" };
    Ok(Report::new(judgment, vec![map_input(ef), map_input(eg)], holds)
        .witness(witness)
        .result(json!({ "squares": squares.len(), "solutions": rows })))
}

fn emitted(
    site: &str,
    ws: &Workspace,
    pfs: &[(String, Arc<Pseudofunctor>)],
    maps: &[(String, PseudoNat)],
) -> Result<Document> {
    let mut unique: Vec<(String, Arc<Pseudofunctor>)> = Vec::new();
    for (n, p) in pfs {
        if !unique.iter().any(|(m, _)| m == n) {
            unique.push((n.clone(), p.clone()));
        }
    }
    Document::describe(site, site_of(ws, site)?, &unique, maps)
}

pub fn factorize(ws: &Workspace, map: &str, method: Method, emit: bool) -> Result<(Report, Option<Document>)> {
    let e = ws.map(map)?;
    let ends = [
        (e.source.clone(), e.map.source.clone()),
        (e.target.clone(), e.map.target.clone()),
    ];
    match method {
        Method::Path => {
            let po = path_object_prestack(&e.map)?;
            let law = verify_factorization(&po)?;
            let (p, eta, q) = (format!("P({map})"), format!("eta({map})"), format!("Q({map})"));
            let mut pfs = ends.to_vec();
            pfs.push((p.clone(), po.pf.clone()));
            let doc = emit
                .then(|| {
                    emitted(
                        &e.site,
                        ws,
                        &pfs,
                        &[
                            (e.name.clone(), e.map.clone()),
                            (eta.clone(), po.eta.clone()),
                            (q.clone(), po.q.clone()),
                        ],
                    )
                })
                .transpose()?;
            let report = Report::new("factorize --method path", vec![map_input(e)], law.holds())
                .witness((!law.holds()).then(|| law.clone()))
                .result(json!({
                    "middle": p,
                    "fibers": fiber_sizes(&po.pf),
                    "unit": eta,
                    "projection": q,
                    "laws": law,
                }));
            Ok((report, doc))
        }
        Method::Isocomma => {
            let r = factor_through_isocomma(&e.map)?;
            let holds = r.strict && r.i_lwe.holds && (!r.source_is_stack || r.p_fibration.holds);
            let (mid, i, p) = (format!("Iso({map})"), format!("i({map})"), format!("p({map})"));
            let mut pfs = ends.to_vec();
            pfs.push((mid.clone(), r.iso.pf.clone()));
            let doc = emit
                .then(|| {
                    emitted(
                        &e.site,
                        ws,
                        &pfs,
                        &[
                            (e.name.clone(), e.map.clone()),
                            (i.clone(), r.i.clone()),
                            (p.clone(), r.p.clone()),
                        ],
                    )
                })
                .transpose()?;
            let laws = json!({
                "strict": r.strict,
                "unit_lwe": r.i_lwe,
                "source_is_stack": r.source_is_stack,
                "projection_fibration": r.p_fibration,
            });
            let report = Report::new("factorize --method isocomma", vec![map_input(e)], holds)
                .witness((!holds).then(|| laws.clone()))
                .result(json!({
                    "middle": mid,
                    "fibers": fiber_sizes(&r.iso.pf),
                    "unit": i,
                    "projection": p,
                    "laws": laws,
                }));
            Ok((report, doc))
        }
    }
}

pub fn stackify(ws: &Workspace, name: &str, emit: bool) -> Result<(Report, Option<Document>)> {
    let e = ws.pseudofunctor(name)?;
    let s = stackify_of(&e.pf)?;
    let holds = s.stack.holds && s.unit_lwe.holds;
    let stack_name = format!("S({})", e.name);
    let unit = format!("eta({})", e.name);
    let doc = emit
        .then(|| {
            emitted(
                &e.site,
                ws,
                &[(e.name.clone(), e.pf.clone()), (stack_name.clone(), s.pf().clone())],
                &[(unit.clone(), s.unit().clone())],
            )
        })
        .transpose()?;
    let report = Report::new("stackify", vec![pf_input(e)], holds)
        .witness((!holds).then(|| json!({ "stack": s.stack, "unit_lwe": s.unit_lwe })))
        .result(json!({
            "stack": stack_name,
            "fibers": fiber_sizes(s.pf()),
            "unit": unit,
            "is_stack": s.stack.holds,
            "unit_lwe": s.unit_lwe.holds,
            "pseudoinverse": s.inverse.is_some(),
        }));
    Ok((report, doc))
}

pub fn isocomma(ws: &Workspace, f: &str, g: &str, emit: bool) -> Result<(Report, Option<Document>)> {
    let (ef, eg) = (ws.map(f)?, ws.map(g)?);
    if ef.site != eg.site {
        return Err(Error::shape(format!("{f} and {g} live over different sites")));
    }
    let iso = isocomma_of(&ef.map, &eg.map)?;
    let z = isocomma_mediator(&iso, &iso.left, &iso.right, &iso.chi)?;
    let eqs = mediator_equations(&iso, &z, &iso.left, &iso.right, &iso.chi);
    let holds = z.is_identity() && eqs.is_valid();
    let name = format!("Iso({f},{g})");
    let (left, right) = (format!("left({f},{g})"), format!("right({f},{g})"));
    let doc = emit
        .then(|| {
            emitted(
                &ef.site,
                ws,
                &[
                    (ef.source.clone(), ef.map.source.clone()),
                    (eg.source.clone(), eg.map.source.clone()),
                    (name.clone(), iso.pf.clone()),
                ],
                &[(left.clone(), iso.left.clone()), (right.clone(), iso.right.clone())],
            )
        })
        .transpose()?;
    let report = Report::new("isocomma", vec![map_input(ef), map_input(eg)], holds)
        .witness((!holds).then(|| json!({ "mediator_is_identity": z.is_identity(), "equations": eqs.violations })))
        .result(json!({
            "isocomma": name,
            "fibers": fiber_sizes(&iso.pf),
            "left": left,
            "right": right,
            "universal_cone_mediator_is_identity": z.is_identity(),
        }));
    Ok((report, doc))
}

pub fn hocat(ws: &Workspace, names: &[String]) -> Result<Report> {
    let entries = names.iter().map(|n| ws.pseudofunctor(n)).collect::<Result<Vec<_>>>()?;
    if let Some(e) = entries.iter().find(|e| e.site != entries[0].site) {
        return Err(Error::shape(format!("{} lives over a different site", e.name)));
    }
    let corpus: Vec<(String, Arc<Pseudofunctor>)> = entries.iter().map(|e| (e.name.clone(), e.pf.clone())).collect();
    let h = homotopy_2category(&corpus, |a| Ok(stackify_of(a)?.pf().clone()), default_bound())?;
    let objects: Vec<&str> = h.objects.iter().map(|(n, _)| n.as_str()).collect();
    let homs: Vec<Vec<Value>> = h
        .homs
        .iter()
        .map(|row| {
            row.iter()
                .map(|hc| json!({ "objects": hc.cat.num_objects(), "morphisms": hc.cat.num_morphisms() }))
                .collect()
        })
        .collect();
    Ok(
        Report::new("hocat", entries.iter().map(|e| pf_input(e)).collect(), true)
            .result(json!({ "objects": objects, "homs": homs })),
    )
}

pub fn laws(suite: &str) -> Result<Report> {
    let r = laws::run(suite, default_bound())?;
    let failures: Vec<Value> = r
        .suites
        .iter()
        .flat_map(|s| {
            s.failures()
                .map(move |c| json!({ "suite": s.suite, "case": c.name, "witness": c.witness }))
        })
        .collect();
    Ok(Report::new(format!("laws --suite {suite}"), Vec::new(), r.holds())
        .witness((!failures.is_empty()).then_some(failures))
        .result(serde_json::to_value(&r).expect("law reports serialize")))
}
