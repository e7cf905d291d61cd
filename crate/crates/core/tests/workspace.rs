use std::path::PathBuf;

use descente::cli::workspace::content_hash;
use descente::cli::{fixture_document, Document, Workspace};
use descente::Error;
use serde_json::Value;

const SITES: [(&str, &str); 3] = [("SITE-PT", "site-pt"), ("SITE-2", "site-2"), ("SITE-TRIV", "site-triv")];

fn data(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(format!("{file}.json"))
}

fn text(file: &str) -> String {
    std::fs::read_to_string(data(file)).unwrap()
}

fn load_str(s: &str) -> descente::Result<Workspace> {
    let mut ws = Workspace::default();
    ws.add_text(s, "test.json")?;
    Ok(ws)
}

#[test]
fn shipped_documents_are_the_fixture_corpus() {
    for (site, file) in SITES {
        let built = fixture_document(site).unwrap().to_canonical_string();
        assert!(
            built == text(file),
            "data/{file}.json is stale; regenerate with `descente fixture {site}`"
        );
    }
}

#[test]
fn load_then_export_is_byte_identical() {
    for (site, file) in SITES {
        let ws = Workspace::load(&[data(file)]).unwrap();
        assert_eq!(ws.document(site).unwrap().to_canonical_string(), text(file), "{site}");
    }
}

#[test]
fn documents_match_the_schema() {
    let schema_path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schema/workspace.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    for (_, file) in SITES {
        let doc: Value = serde_json::from_str(&text(file)).unwrap();
        let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{file}: {errors:?}");
    }
    let mut bad: Value = serde_json::from_str(&text("site-pt")).unwrap();
    bad["covering_sieves"] = Value::Array(Vec::new());
    assert!(!validator.is_valid(&bad));
}

#[test]
fn syntax_errors_carry_line_and_column() {
    let err = load_str("{\n  \"site\": \"S\",\n  oops\n}").unwrap_err();
    match err {
        Error::Parse { location, .. } => assert_eq!(location, "test.json:3:3"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn dangling_morphism_reference_is_a_parse_error() {
    let mut doc: Value = serde_json::from_str(&text("site-pt")).unwrap();
    doc["category"]["compose"][0][2] = Value::String("nowhere".into());
    let err = load_str(&doc.to_string()).unwrap_err();
    assert!(matches!(err, Error::Parse { .. }), "{err:?}");
    let mut doc: Value = serde_json::from_str(&text("site-pt")).unwrap();
    doc["maps"][0]["source"] = Value::String("NOPE".into());
    let err = load_str(&doc.to_string()).unwrap_err();
    assert!(err.to_string().contains("unknown pseudofunctor `NOPE`"), "{err}");
}

#[test]
fn missing_and_duplicate_table_entries_are_rejected() {
    let doc: Value = serde_json::from_str(&text("site-pt")).unwrap();
    let mut missing = doc.clone();
    missing["pseudofunctors"][2]["phi"].as_array_mut().unwrap().pop();
    let err = load_str(&missing.to_string()).unwrap_err();
    assert!(err.to_string().contains("phi at"), "{err}");
    let mut twice = doc.clone();
    let first = twice["pseudofunctors"][2]["upsilon"][0].clone();
    twice["pseudofunctors"][2]["upsilon"]
        .as_array_mut()
        .unwrap()
        .push(first);
    let err = load_str(&twice.to_string()).unwrap_err();
    assert!(err.to_string().contains("listed twice"), "{err}");
}

#[test]
fn mutated_phi_is_a_validation_error_with_a_coherence_witness() {
    let mut doc: Value = serde_json::from_str(&text("site-pt")).unwrap();
    let bz2 = doc["pseudofunctors"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|p| p["name"] == "CONST-BZ2")
        .unwrap();
    let entry = bz2["phi"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|e| e["f"] == "pt<pt" && e["g"] == "empty<pt")
        .unwrap();
    entry["components"][0][1] = Value::String("g1".into());
    match load_str(&doc.to_string()).unwrap_err() {
        Error::Validation { entity, report } => {
            assert!(entity.contains("CONST-BZ2"), "{entity}");
            assert!(!report.violations.is_empty());
            assert!(report.violations.iter().any(|v| !v.witness.is_empty()));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unqualified_names_resolve_only_when_unambiguous() {
    let ws = Workspace::load(&[data("site-pt"), data("site-triv")]).unwrap();
    assert!(matches!(ws.pseudofunctor("ONE"), Err(Error::UnknownEntity(_))));
    assert_eq!(ws.pseudofunctor("SITE-PT/ONE").unwrap().site, "SITE-PT");
    assert_eq!(ws.pseudofunctor("SITE-TRIV/ONE").unwrap().site, "SITE-TRIV");
    // PSH-PAIR only exists over the two-object lattice
    assert_eq!(ws.map("PSH-PAIR->1").unwrap().site, "SITE-TRIV");
    assert!(Workspace::load(&[data("site-pt"), data("site-pt")]).is_err());
}

#[test]
fn hashes_are_stable_and_depend_on_their_inputs() {
    let a = Workspace::load(&[data("site-pt")]).unwrap();
    let b = Workspace::load(&[data("site-pt")]).unwrap();
    for (x, y) in a.pseudofunctors.iter().zip(&b.pseudofunctors) {
        assert_eq!(x.hash, y.hash);
        assert_eq!(x.hash.len(), 64);
    }
    // every pseudofunctor hash covers the site it lives over
    let triv = Workspace::load(&[data("site-triv")]).unwrap();
    assert_ne!(
        a.pseudofunctor("ONE").unwrap().hash,
        triv.pseudofunctor("ONE").unwrap().hash
    );
    assert_ne!(content_hash(&["x"], &1), content_hash(&["y"], &1));
    let one = a.pseudofunctor("ONE").unwrap();
    assert_eq!(one.provenance.file, data("site-pt").display().to_string());
    assert!(one.provenance.line > 1);
}

#[test]
fn parse_then_write_is_identity_on_canonical_text() {
    let t = text("site-pt");
    assert_eq!(Document::parse(&t, "x").unwrap().to_canonical_string(), t);
}

mod canonical {
    use descente::cli::workspace::write_canonical;
    use proptest::prelude::*;
    use serde_json::Value;

    fn json_value() -> impl Strategy<Value = Value> {
        let leaf = prop_oneof![
            Just(Value::Null),
            any::<bool>().prop_map(Value::Bool),
            any::<i64>().prop_map(|i| Value::Number(i.into())),
            "[a-z<>*()\" ]{0,12}".prop_map(Value::String),
        ];
        leaf.prop_recursive(4, 64, 8, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 0..8).prop_map(Value::Array),
                prop::collection::btree_map("[a-z_]{1,8}", inner, 0..6)
                    .prop_map(|m| Value::Object(m.into_iter().collect())),
            ]
        })
    }

    proptest! {
        #[test]
        fn canonical_text_parses_back_and_is_a_fixed_point(v in json_value()) {
            let mut once = String::new();
            write_canonical(&v, 0, &mut once);
            let back: Value = serde_json::from_str(&once).unwrap();
            prop_assert_eq!(&back, &v);
            let mut twice = String::new();
            write_canonical(&back, 0, &mut twice);
            prop_assert_eq!(once, twice);
        }
    }
}
