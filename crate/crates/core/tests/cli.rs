use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(file: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(format!("{file}.json"))
        .display()
        .to_string()
}

fn descente(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_descente"))
        .args(args)
        .env_remove("DESCENTE_BOUND")
        .output()
        .unwrap()
}

fn on_site_two(args: &[&str]) -> Output {
    let ws = data("site-2");
    let mut all = vec!["--workspace", ws.as_str()];
    all.extend_from_slice(args);
    descente(&all)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn validate_succeeds_on_every_fixture_document() {
    for file in ["site-pt", "site-2", "site-triv"] {
        let out = descente(&["--workspace", &data(file), "validate"]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{file}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn terminal_prestack_is_a_stack() {
    let out = on_site_two(&["check", "stack", "ONE", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["verdict"], "positive");
    assert_eq!(r["inputs"][0]["name"], "SITE-2/ONE");
    assert!(r.get("witness").is_none());
}

#[test]
fn boundary_of_the_pair_presheaf_is_not_a_local_fibration() {
    let out = on_site_two(&["check", "local-fib", "boundary(PSH-PAIR)", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["verdict"], "negative");
    assert_eq!(r["witness"]["object"], "X");
    // the two points cover X, and two distinct arrows agree on both
    assert_eq!(r["witness"]["cover"], serde_json::json!(["1<X", "2<X"]));
    let prestack = json(&on_site_two(&["check", "prestack", "PSH-PAIR", "--format", "json"]));
    assert_eq!(prestack["witness"]["kind"], "not separated");
}

#[test]
fn path_factorization_emits_a_loadable_document() {
    let dir = tempfile::tempdir().unwrap();
    let emitted = dir.path().join("factor.json");
    let out = on_site_two(&[
        "factorize",
        "SHEAF-2->1",
        "--method",
        "path",
        "--format",
        "json",
        "--emit",
        emitted.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["result"]["laws"]["strict"], true);
    assert_eq!(r["result"]["laws"]["unit_lwe"]["holds"], true);
    assert_eq!(r["result"]["laws"]["projection_fibration"]["holds"], true);
    // the emitted P(f), eta and Q reload and recheck independently
    let path = emitted.to_str().unwrap();
    let q = descente(&["--workspace", path, "check", "local-fib", "Q(SHEAF-2->1)"]);
    assert_eq!(q.status.code(), Some(0));
    let eta = descente(&["--workspace", path, "check", "lwe", "eta(SHEAF-2->1)"]);
    assert_eq!(eta.status.code(), Some(0));
}

#[test]
fn isocomma_factorization_and_stackification() {
    let out = on_site_two(&["factorize", "incl(S-HAT)", "--method", "isocomma"]);
    assert_eq!(out.status.code(), Some(0));
    let out = on_site_two(&["stackify", "PSH-SEP", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["is_stack"], true);
    let out = on_site_two(&["isocomma", "incl(S-HAT)", "id(y(X))"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn lifting_against_a_gap_fails_with_a_square() {
    let out = on_site_two(&["lift", "incl(S-HAT)", "PSH-GAP->1", "--search", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["witness"]["h"].is_string());
    let out = on_site_two(&["lift", "incl(S-HAT)", "SHEAF-2->1", "--construct"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn descent_category_over_the_empty_cover() {
    let out = on_site_two(&[
        "desc",
        "CONST-D2->1",
        "--object",
        "empty",
        "--cover",
        "--format",
        "json",
    ]);
    // Desc over the empty cover is the terminal category, CONST-D2(empty) is not
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["result"]["covers"][0]["objects"].as_array().unwrap().len(), 1);
    assert_eq!(r["result"]["covers"][0]["comparison"]["faithful"], true);
    assert_eq!(r["result"]["covers"][0]["comparison"]["full"], false);
}

#[test]
fn exit_codes_for_usage_parse_and_bound() {
    assert_eq!(descente(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(descente(&["lift", "a", "b"]).status.code(), Some(2));
    assert_eq!(descente(&["check", "stack", "ONE"]).status.code(), Some(2));
    assert_eq!(on_site_two(&["check", "stack", "NOPE"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\n  \"site\": \n").unwrap();
    let out = descente(&["--workspace", broken.to_str().unwrap(), "validate", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["error"], "parse");
    assert!(r["location"].as_str().unwrap().ends_with("broken.json:3:0"));
    let out = on_site_two(&["check", "stack", "ONE", "--bound", "3"]);
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_descente"))
        .args(["--workspace", &data("site-2"), "check", "stack", "ONE"])
        .env("DESCENTE_BOUND", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validation_failures_are_negative_verdicts() {
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(data("site-pt")).unwrap()).unwrap();
    for p in doc["pseudofunctors"].as_array_mut().unwrap() {
        if p["name"] == "CONST-BZ2" {
            p["upsilon"][1]["components"][0][1] = Value::String("g1".into());
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mutated.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let out = descente(&["--workspace", path.to_str().unwrap(), "validate", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["error"], "validation");
    assert!(!r["witness"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn reports_are_deterministic() {
    let args = ["check", "fibrant", "PSH-SEP", "--format", "json"];
    let a = on_site_two(&args);
    let b = on_site_two(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(1));
}

#[test]
fn export_reproduces_the_input() {
    let out = on_site_two(&["export", "SITE-2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, std::fs::read(data("site-2")).unwrap());
}

#[test]
fn homotopy_category_replaces_non_stacks() {
    let out = on_site_two(&["hocat", "SHEAF-2", "PSH-SEP", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["result"]["objects"], serde_json::json!(["SHEAF-2", "I(PSH-SEP)"]));
}
