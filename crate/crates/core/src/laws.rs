//! Exhaustive law suites over the fixture corpus. Each suite yields one case
//! per instance, with a serialized witness for every failing case. Reports
//! contain no timing and no hash-map iteration, so equal inputs give equal
//! bytes.

use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::descent::{check_comparison, check_faithful, covers_of, is_local_fibration, is_stack, CoverMode};
use crate::factor::{
    factor_through_isocomma, identity_leg_cones, isocomma_mediator, mediator_equations, path_object_prestack, stackify,
    verify_factorization,
};
use crate::fixtures;
use crate::hofib::{
    check_lift, construct_lift, enumerate_squares, path_object, pitchfork_bounded, search_lift_bounded,
    sieve_inclusions, three_for_two, NamedMap, Triangle,
};
use crate::pstack::{
    bang, cotensor_two, enumerate_modifications, enumerate_pseudonats, is_prestack, same_pf, terminal_prestack,
    validate_modification,
};
use crate::site::{generate_topology, maximal_sieve, validate_topology, CoverFamily, Site};
use crate::{Error, Result};

pub const SUITES: [&str; 10] = [
    "topology",
    "maximal-sieve",
    "faithful",
    "fib-char",
    "prestack-boundary",
    "factorization",
    "stackification",
    "three-for-two",
    "path-object",
    "isocomma",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case {
    pub name: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: usize,
    pub failed: usize,
    pub cases: Vec<Case>,
}

impl SuiteReport {
    pub fn holds(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.holds)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawsReport {
    pub bound: u64,
    pub suites: Vec<SuiteReport>,
}

impl LawsReport {
    pub fn holds(&self) -> bool {
        self.suites.iter().all(SuiteReport::holds)
    }
}

fn case(name: impl Into<String>, holds: bool, witness: impl FnOnce() -> Value) -> Case {
    Case {
        name: name.into(),
        holds,
        witness: if holds { None } else { Some(witness()) },
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

/// Runs one suite by name; `all` is not accepted here.
pub fn run_suite(name: &str, bound: u64) -> Result<SuiteReport> {
    let cases = match name {
        "topology" => topology()?,
        "maximal-sieve" => maximal_sieve_descent(bound)?,
        "faithful" => faithfulness(bound)?,
        "fib-char" => fibration_characterization(bound)?,
        "prestack-boundary" => prestack_boundary()?,
        "factorization" => factorization()?,
        "stackification" => stackification()?,
        "three-for-two" => three_for_two_triangles(bound)?,
        "path-object" => path_objects()?,
        "isocomma" => isocomma_cones(bound)?,
        other => return Err(Error::UnknownEntity(format!("suite {other}"))),
    };
    let failed = cases.iter().filter(|c| !c.holds).count();
    Ok(SuiteReport {
        suite: name.to_string(),
        passed: cases.len() - failed,
        failed,
        cases,
    })
}

/// Runs `all` or a single suite.
pub fn run(name: &str, bound: u64) -> Result<LawsReport> {
    let suites = if name == "all" {
        SUITES.iter().map(|s| run_suite(s, bound)).collect::<Result<Vec<_>>>()?
    } else {
        vec![run_suite(name, bound)?]
    };
    Ok(LawsReport { bound, suites })
}

fn qualified(site: &str, name: &str) -> String {
    format!("{site}/{name}")
}

fn prestacks(site: &Arc<Site>) -> Result<Vec<fixtures::NamedPf>> {
    let mut out = Vec::new();
    for n in fixtures::pseudofunctors(site) {
        if is_prestack(&n.pf)?.prestack {
            out.push(n);
        }
    }
    Ok(out)
}

/// Fixture maps whose source and target are prestacks.
fn prestack_maps(site: &Arc<Site>) -> Result<Vec<NamedMap>> {
    let mut out = Vec::new();
    for m in fixtures::maps(site) {
        if is_prestack(&m.map.source)?.prestack && is_prestack(&m.map.target)?.prestack {
            out.push(m);
        }
    }
    Ok(out)
}

/// Basis families together with every covering sieve, without repeats.
fn all_covers(site: &Site, u: usize) -> Vec<CoverFamily> {
    let mut out = covers_of(site, u, CoverMode::Basis);
    for f in covers_of(site, u, CoverMode::Sieves) {
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

fn topology() -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (name, site) in fixtures::sites() {
        let r = validate_topology(&site);
        out.push(case(qualified(&name, "validate"), r.is_valid(), || to_value(&r)));
        if let Some(basis) = site.basis() {
            let generated = generate_topology(&site.skeleton(), basis)?;
            let same = generated == *site.topology();
            out.push(case(qualified(&name, "generated from basis"), same, || {
                json!("generated topology differs from the site's")
            }));
        }
    }
    Ok(out)
}

fn maximal_sieve_descent(bound: u64) -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (site_name, site) in fixtures::sites() {
        let one = terminal_prestack(&site);
        let c = site.cat().clone();
        for n in fixtures::pseudofunctors(&site) {
            let p = bang(&n.pf, &one);
            for u in c.objects() {
                let cover = maximal_sieve(&c, u).to_family();
                let w = check_comparison(&p, &cover, bound)?;
                let name = qualified(&site_name, &format!("{} at {}", n.name, c.object_id(u)));
                out.push(case(name, w.is_none(), || to_value(&w)));
            }
        }
    }
    Ok(out)
}

fn faithfulness(bound: u64) -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (site_name, site) in fixtures::sites() {
        let c = site.cat().clone();
        for m in fixtures::maps(&site) {
            for u in c.objects() {
                for cover in all_covers(&site, u) {
                    let w = check_faithful(&m.map, &cover, bound)?;
                    let name = qualified(&site_name, &format!("{} over {}", m.name, cover.describe(&c)));
                    out.push(case(name, w.is_none(), || to_value(&w)));
                }
            }
        }
    }
    Ok(out)
}

/// Maps on which the two characterizations of local fibrations are compared.
const FIB_CHAR_MAPS: [(&str, &[&str]); 3] = [
    ("SITE-PT", &["id(CONST-BZ2)", "CONST-D2->1", "y(empty)->1"]),
    (
        "SITE-2",
        &[
            "id(SHEAF-2)",
            "id(PSH-SEP)",
            "boundary(SHEAF-2)",
            "boundary(PSH-PAIR)",
            "SHEAF-2->1",
            "STACK-BZ2-TW->1",
            "PSH-SEP->1",
            "PSH-GAP->1",
            "incl(S-HAT)",
        ],
    ),
    ("SITE-TRIV", &["PSH-PAIR->1", "boundary(CONST-D2)"]),
];

fn fibration_characterization(bound: u64) -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (site_name, site) in fixtures::sites() {
        let wanted = FIB_CHAR_MAPS
            .iter()
            .find(|(s, _)| *s == site_name)
            .map(|(_, m)| *m)
            .unwrap_or_default();
        let w = sieve_inclusions(&site);
        for m in fixtures::maps(&site)
            .into_iter()
            .filter(|m| wanted.contains(&m.name.as_str()))
        {
            let fib = is_local_fibration(&m.map)?;
            let mut failing = None;
            for wm in &w {
                let d = pitchfork_bounded(&wm.map, &m.map, bound)?;
                if let Some(sq) = d.witness {
                    failing = Some((wm.name.clone(), sq));
                    break;
                }
            }
            let lifts = failing.is_none();
            out.push(case(
                qualified(&site_name, &format!("{} characterization", m.name)),
                fib.holds == lifts,
                || json!({ "local_fibration": fib, "unliftable": failing }),
            ));
            if !fib.holds {
                continue;
            }
            // constructive lifts wherever the search finds one
            let mut squares = 0;
            let mut mismatch = None;
            'outer: for wm in &w {
                for (sq, gamma) in enumerate_squares(&wm.map, &m.map, bound)? {
                    if search_lift_bounded(&sq, bound)?.is_none() {
                        continue;
                    }
                    squares += 1;
                    let ok = match construct_lift(&sq) {
                        Ok(sol) => check_lift(&sq, &sol).is_valid(),
                        Err(Error::BoundExceeded { what, bound }) => return Err(Error::BoundExceeded { what, bound }),
                        Err(_) => false,
                    };
                    if !ok {
                        mismatch = Some(json!({ "weak_equivalence": wm.name, "gamma": gamma }));
                        break 'outer;
                    }
                }
            }
            out.push(case(
                qualified(
                    &site_name,
                    &format!("{} constructive lifts ({squares} squares)", m.name),
                ),
                mismatch.is_none(),
                || mismatch.clone().unwrap_or(Value::Null),
            ));
        }
    }
    Ok(out)
}

fn prestack_boundary() -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (site_name, site) in fixtures::sites() {
        for n in fixtures::pseudofunctors(&site) {
            let pre = is_prestack(&n.pf)?;
            let fib = is_local_fibration(&cotensor_two(&n.pf).boundary)?;
            out.push(case(
                qualified(&site_name, &n.name),
                pre.prestack == fib.holds,
                || json!({ "prestack": pre, "boundary_fibration": fib }),
            ));
        }
    }
    Ok(out)
}

fn factorization() -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (site_name, site) in fixtures::sites() {
        for m in prestack_maps(&site)? {
            let po = path_object_prestack(&m.map)?;
            let r = verify_factorization(&po)?;
            out.push(case(qualified(&site_name, &m.name), r.holds(), || to_value(&r)));
        }
    }
    Ok(out)
}

fn stackification() -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (site_name, site) in fixtures::sites() {
        for n in prestacks(&site)? {
            let s = stackify(&n.pf)?;
            let is_stack_a = is_stack(&n.pf)?.holds;
            let inverse_ok = match &s.inverse {
                Some(inv) => {
                    inv.unit.is_iso()
                        && inv.counit.is_iso()
                        && validate_modification(&inv.unit).is_valid()
                        && validate_modification(&inv.counit).is_valid()
                }
                None => !is_stack_a,
            };
            let holds = s.stack.holds && inverse_ok;
            out.push(case(
                qualified(&site_name, &n.name),
                holds,
                || json!({ "stack": s.stack, "source_is_stack": is_stack_a, "inverse_valid": inverse_ok }),
            ));
        }
    }
    Ok(out)
}

fn three_for_two_triangles(bound: u64) -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (site_name, site) in fixtures::sites() {
        let maps = fixtures::maps(&site);
        for g in &maps {
            for h in maps.iter().filter(|h| same_pf(&h.map.source, &g.map.target)) {
                let hg = h.map.after(&g.map);
                let mut triangles = 0;
                let mut violation = None;
                for f in enumerate_pseudonats(&g.map.source, &h.map.target, bound)? {
                    for gamma in enumerate_modifications(&f, &hg, true, bound)? {
                        triangles += 1;
                        let t = Triangle {
                            f: f.clone(),
                            g: g.map.clone(),
                            h: h.map.clone(),
                            gamma,
                        };
                        let r = three_for_two(&t)?;
                        if !r.consistent && violation.is_none() {
                            violation = Some(to_value(&r));
                        }
                    }
                }
                let name = qualified(
                    &site_name,
                    &format!("{} then {} ({triangles} triangles)", g.name, h.name),
                );
                out.push(case(name, violation.is_none(), || {
                    violation.clone().unwrap_or(Value::Null)
                }));
            }
        }
    }
    Ok(out)
}

fn path_objects() -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (site_name, site) in fixtures::sites() {
        for n in prestacks(&site)? {
            let p = path_object(&n.pf)?;
            out.push(case(
                qualified(&site_name, &n.name),
                p.holds(),
                || json!({ "fibrations": p.fibrations }),
            ));
        }
    }
    Ok(out)
}

fn isocomma_cones(bound: u64) -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (site_name, site) in fixtures::sites() {
        for m in prestack_maps(&site)? {
            let r = factor_through_isocomma(&m.map)?;
            let fib_ok = !r.source_is_stack || r.p_fibration.holds;
            out.push(case(
                qualified(&site_name, &format!("{} factorization", m.name)),
                r.strict && r.i_lwe.holds && fib_ok,
                || json!({ "strict": r.strict, "i_lwe": r.i_lwe, "p_fibration": r.p_fibration }),
            ));
            let z = isocomma_mediator(&r.iso, &r.iso.left, &r.iso.right, &r.iso.chi)?;
            let universal = mediator_equations(&r.iso, &z, &r.iso.left, &r.iso.right, &r.iso.chi);
            let identity = z.is_identity();
            out.push(case(
                qualified(&site_name, &format!("{} universal cone", m.name)),
                universal.is_valid() && identity,
                || json!({ "equations": universal, "identity": identity }),
            ));
            let cones = identity_leg_cones(&m.map, bound)?;
            let mut bad = None;
            for (k, (u, v, chi2)) in cones.iter().enumerate() {
                let z = isocomma_mediator(&r.iso, u, v, chi2)?;
                let rep = mediator_equations(&r.iso, &z, u, v, chi2);
                if !rep.is_valid() {
                    bad = Some(json!({ "cone": k, "equations": rep }));
                    break;
                }
            }
            out.push(case(
                qualified(&site_name, &format!("{} identity-leg cones ({})", m.name, cones.len())),
                bad.is_none(),
                || bad.clone().unwrap_or(Value::Null),
            ));
        }
    }
    Ok(out)
}
