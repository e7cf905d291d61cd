use std::fmt;

use serde::{Deserialize, Serialize};

/// One violated law, with the identifiers that exhibit the failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    pub witness: Vec<String>,
}

/// Outcome of a structural check. Empty means every law holds.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push<I, S>(&mut self, rule: &str, witness: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.violations.push(Violation {
            rule: rule.to_string(),
            witness: witness.into_iter().map(Into::into).collect(),
        });
    }

    pub fn extend_prefixed(&mut self, prefix: &str, other: ValidationReport) {
        for v in other.violations {
            self.violations.push(Violation {
                rule: format!("{prefix}: {}", v.rule),
                witness: v.witness,
            });
        }
    }

    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule.contains(rule))
    }

    pub fn into_result(self, entity: &str) -> crate::Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(crate::Error::Validation {
                entity: entity.to_string(),
                report: self,
            })
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{} [{}]", v.rule, v.witness.join(", "))?;
            if i == 4 && self.violations.len() > 5 {
                write!(f, "; ... {} more", self.violations.len() - 5)?;
                break;
            }
        }
        Ok(())
    }
}
