//! Reports printed by the command line: one judgment, the inputs it was
//! made on, a verdict, a witness for negative verdicts and a result body.

use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use super::workspace::write_canonical;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Positive,
    Negative,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::Positive
        } else {
            Verdict::Negative
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Positive => 0,
            Verdict::Negative => 1,
        }
    }
}

/// A named input with its content hash.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputRef {
    pub name: String,
    pub hash: String,
}

/// Timing is kept out of the serialized form so that JSON reports of the
/// same inputs are byte-identical.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub judgment: String,
    pub inputs: Vec<InputRef>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub result: Value,
    #[serde(skip)]
    pub elapsed: Option<Duration>,
}

impl Report {
    pub fn new(judgment: impl Into<String>, inputs: Vec<InputRef>, holds: bool) -> Report {
        Report {
            judgment: judgment.into(),
            inputs,
            verdict: Verdict::from_bool(holds),
            witness: None,
            result: Value::Object(Default::default()),
            elapsed: None,
        }
    }

    pub fn witness<T: Serialize>(mut self, w: Option<T>) -> Report {
        self.witness = w.map(|w| serde_json::to_value(w).expect("witnesses serialize"));
        self
    }

    pub fn result(mut self, v: Value) -> Report {
        self.result = v;
        self
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        write_canonical(&serde_json::to_value(self).expect("reports serialize"), 0, &mut out);
        out.push('\n');
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}: {}\n", self.judgment, verdict_word(self.verdict));
        for i in &self.inputs {
            out.push_str(&format!("  input {} sha256:{}\n", i.name, &i.hash[..16]));
        }
        if let Some(w) = &self.witness {
            out.push_str("witness: ");
            write_canonical(w, 0, &mut out);
            out.push('\n');
        }
        if self.result.as_object().is_some_and(|m| !m.is_empty()) {
            out.push_str("result: ");
            write_canonical(&self.result, 0, &mut out);
            out.push('\n');
        }
        if let Some(d) = self.elapsed {
            out.push_str(&format!("time: {:.3} s\n", d.as_secs_f64()));
        }
        out
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Positive => "positive",
        Verdict::Negative => "negative",
    }
}

/// 1 for errors that are a negative answer, 2 for usage, parse and lookup
/// errors, 3 when the enumeration bound is exceeded.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::BoundExceeded { .. } => 3,
        Error::Parse { .. } | Error::UnknownEntity(_) | Error::Shape(_) | Error::ApexMismatch(..) | Error::Io(_) => 2,
        Error::Validation { .. }
        | Error::InvalidBasis { .. }
        | Error::NoMediator { .. }
        | Error::NonUniqueMediator { .. }
        | Error::NotAnEquivalence(_)
        | Error::NotPointwiseEquivalence(_)
        | Error::NotLwe(_)
        | Error::NotLocalFibration(_)
        | Error::InternalAmalgamationFailure(_)
        | Error::NoAmalgamation(_)
        | Error::NotAPrestack(_) => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::BoundExceeded { .. } => "bound-exceeded",
        Error::NotAnEquivalence(_) => "not-an-equivalence",
        Error::InvalidBasis { .. } => "invalid-basis",
        Error::NoMediator { .. } => "no-mediator",
        Error::NonUniqueMediator { .. } => "non-unique-mediator",
        Error::ApexMismatch(..) => "apex-mismatch",
        Error::NotPointwiseEquivalence(_) => "not-pointwise-equivalence",
        Error::NotLwe(_) => "not-lwe",
        Error::NotLocalFibration(_) => "not-local-fibration",
        Error::InternalAmalgamationFailure(_) => "internal-amalgamation-failure",
        Error::NoAmalgamation(_) => "no-amalgamation",
        Error::NotAPrestack(_) => "not-a-prestack",
        Error::Parse { .. } => "parse",
        Error::Validation { .. } => "validation",
        Error::UnknownEntity(_) => "unknown-entity",
        Error::Shape(_) => "shape",
        Error::Io(_) => "io",
    }
}

/// The JSON form of an error; validation errors carry their violations.
pub fn error_json(e: &Error) -> String {
    let mut v = serde_json::json!({
        "error": error_kind(e),
        "message": e.to_string(),
        "exit_code": error_exit_code(e),
    });
    match e {
        Error::Validation { entity, report } => {
            v["witness"] = serde_json::json!({ "entity": entity, "violations": report.violations });
        }
        Error::Parse { location, .. } => {
            v["location"] = Value::String(location.clone());
        }
        _ => {}
    }
    let mut out = String::new();
    write_canonical(&v, 0, &mut out);
    out.push('\n');
    out
}
