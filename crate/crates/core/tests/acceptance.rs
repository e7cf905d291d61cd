//! One line per acceptance criterion. Run with `cargo test --test acceptance`;
//! exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::{Command, Stdio};
use std::sync::Arc;
use std::time::{Duration, Instant};

use descente::bound::default_bound;
use descente::descent::is_local_fibration;
use descente::fixtures;
use descente::laws::{run_suite, SuiteReport};
use descente::pstack::{cotensor_two, is_prestack};

const TOTAL_LIMIT: Duration = Duration::from_secs(300);

struct Line {
    number: usize,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn print(line: &Line) {
    let tag = if line.pass { "PASS" } else { "FAIL" };
    println!("criterion {:>2} {tag} {}: {}", line.number, line.title, line.detail);
}

fn timed_suite(name: &str) -> (SuiteReport, Duration) {
    let started = Instant::now();
    let report = run_suite(name, default_bound()).unwrap_or_else(|e| panic!("suite {name}: {e}"));
    (report, started.elapsed())
}

fn suite_line(
    number: usize,
    title: &'static str,
    suite: &str,
    expected_cases: usize,
    limit: Option<Duration>,
    extra: impl FnOnce(&SuiteReport) -> Result<(), String>,
) -> Line {
    let (report, took) = timed_suite(suite);
    let total = report.passed + report.failed;
    let mut problems = Vec::new();
    if report.failed > 0 {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        problems.push(format!("failing cases {names:?}"));
    }
    if total != expected_cases {
        problems.push(format!("expected {expected_cases} cases"));
    }
    if let Some(limit) = limit {
        if took > limit {
            problems.push(format!("over the {} s limit", limit.as_secs()));
        }
    }
    if let Err(e) = extra(&report) {
        problems.push(e);
    }
    let mut detail = format!("{}/{} cases in {:.3} s", report.passed, total, took.as_secs_f64());
    if let Some(limit) = limit {
        detail.push_str(&format!(" (limit {} s)", limit.as_secs()));
    }
    if !problems.is_empty() {
        detail.push_str("; ");
        detail.push_str(&problems.join("; "));
    }
    Line {
        number,
        title,
        pass: problems.is_empty(),
        detail,
    }
}

/// The map corpus of the characterization suite must include every required kind.
fn fib_char_coverage(report: &SuiteReport) -> Result<(), String> {
    let maps: BTreeSet<&str> = report
        .cases
        .iter()
        .filter_map(|c| c.name.strip_suffix(" characterization"))
        .collect();
    let required = [
        ("an identity", maps.iter().any(|m| m.contains("/id("))),
        ("the boundary of a prestack", maps.contains("SITE-2/boundary(SHEAF-2)")),
        (
            "the boundary of a non-prestack",
            maps.contains("SITE-2/boundary(PSH-PAIR)"),
        ),
        ("a stack to 1", maps.contains("SITE-2/STACK-BZ2-TW->1")),
        ("a non-stack to 1", maps.contains("SITE-2/PSH-SEP->1")),
        ("a sieve inclusion", maps.contains("SITE-2/incl(S-HAT)")),
    ];
    let missing: Vec<&str> = required.iter().filter(|(_, ok)| !ok).map(|(what, _)| *what).collect();
    if maps.len() < 6 || !missing.is_empty() {
        return Err(format!("{} maps, missing {missing:?}", maps.len()));
    }
    Ok(())
}

/// PSH-PAIR on SITE-2 has two sections over X that agree on both points, so
/// it is not a prestack and its boundary is not a local fibration.
fn pair_case_present(report: &SuiteReport) -> Result<(), String> {
    if !report.cases.iter().any(|c| c.name == "SITE-2/PSH-PAIR" && c.holds) {
        return Err("no agreeing SITE-2/PSH-PAIR case".into());
    }
    let site = fixtures::site_two();
    let pair = Arc::new(fixtures::psh_pair(&site).map_err(|e| e.to_string())?);
    let pre = is_prestack(&pair).map_err(|e| e.to_string())?;
    let fib = is_local_fibration(&cotensor_two(&pair).boundary).map_err(|e| e.to_string())?;
    if pre.prestack || fib.holds {
        return Err("SITE-2/PSH-PAIR is not the negative case".into());
    }
    Ok(())
}

fn laws_json(threads: Option<usize>) -> std::process::Child {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_descente"));
    cmd.args(["laws", "--suite", "all", "--format", "json"])
        .env_remove("DESCENTE_BOUND")
        .stdout(Stdio::piped())
        .stderr(Stdio::null());
    match threads {
        Some(n) => cmd.env("RAYON_NUM_THREADS", n.to_string()),
        None => cmd.env_remove("RAYON_NUM_THREADS"),
    };
    cmd.spawn().expect("spawn descente")
}

fn determinism() -> Line {
    let started = Instant::now();
    let runs: Vec<(&str, std::process::Child)> = vec![
        ("first", laws_json(None)),
        ("second", laws_json(None)),
        ("1 thread", laws_json(Some(1))),
        ("4 threads", laws_json(Some(4))),
    ];
    let outputs: Vec<(&str, Vec<u8>)> = runs
        .into_iter()
        .map(|(label, child)| (label, child.wait_with_output().expect("wait for descente").stdout))
        .collect();
    let reference = &outputs[0].1;
    let differing: Vec<&str> = outputs
        .iter()
        .filter(|(_, o)| o != reference)
        .map(|(l, _)| *l)
        .collect();
    let parses = serde_json::from_slice::<serde_json::Value>(reference).is_ok();
    let pass = differing.is_empty() && parses && !reference.is_empty();
    let mut detail = format!(
        "{} runs, {} bytes each, {:.3} s",
        outputs.len(),
        reference.len(),
        started.elapsed().as_secs_f64()
    );
    if !differing.is_empty() {
        detail.push_str(&format!("; differs from the first run: {differing:?}"));
    }
    if !parses {
        detail.push_str("; output is not JSON");
    }
    Line {
        number: 11,
        title: "determinism",
        pass,
        detail,
    }
}

fn main() {
    let started = Instant::now();
    let none = |_: &SuiteReport| Ok(());
    let lines = [
        suite_line(1, "topology laws", "topology", 5, Some(Duration::from_secs(1)), none),
        suite_line(
            2,
            "maximal-sieve descent",
            "maximal-sieve",
            114,
            Some(Duration::from_secs(10)),
            none,
        ),
        suite_line(3, "comparison faithfulness", "faithful", 860, None, none),
        suite_line(
            4,
            "local fibration characterization",
            "fib-char",
            23,
            Some(Duration::from_secs(120)),
            fib_char_coverage,
        ),
        suite_line(
            5,
            "prestack iff boundary local fibration",
            "prestack-boundary",
            31,
            None,
            pair_case_present,
        ),
        suite_line(6, "path-object factorization", "factorization", 77, None, none),
        suite_line(7, "stackification", "stackification", 25, None, none),
        suite_line(8, "three-for-two", "three-for-two", 130, None, none),
        suite_line(9, "path objects", "path-object", 25, None, none),
        suite_line(10, "isocomma universal property", "isocomma", 231, None, none),
        determinism(),
    ];
    for line in &lines {
        print(line);
    }
    let total = started.elapsed();
    let in_time = total <= TOTAL_LIMIT;
    println!(
        "total {} {:.3} s (limit {} s)",
        if in_time { "PASS" } else { "FAIL" },
        total.as_secs_f64(),
        TOTAL_LIMIT.as_secs()
    );
    let failed: Vec<usize> = lines.iter().filter(|l| !l.pass).map(|l| l.number).collect();
    if !failed.is_empty() || !in_time {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
