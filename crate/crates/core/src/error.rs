use thiserror::Error;

use crate::validation::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("enumeration bound exceeded while {what} (bound {bound})")]
    BoundExceeded { what: String, bound: u64 },

    #[error("functor is not an equivalence: {0}")]
    NotAnEquivalence(String),

    #[error("invalid basis: axiom {axiom} violated ({witness})")]
    InvalidBasis { axiom: u8, witness: String },

    #[error("no mediating arrow into the chosen pullback of ({f}, {g})")]
    NoMediator { f: String, g: String },

    #[error("more than one mediating arrow into the chosen pullback of ({f}, {g})")]
    NonUniqueMediator { f: String, g: String },

    #[error("sieves live over different objects ({0} vs {1})")]
    ApexMismatch(String, String),

    #[error("component at {0} is not an equivalence of categories")]
    NotPointwiseEquivalence(String),

    #[error("map is not a local weak equivalence: {0}")]
    NotLwe(String),

    #[error("map is not a local fibration: {0}")]
    NotLocalFibration(String),

    #[error("amalgamation failed inside lift construction: {0}")]
    InternalAmalgamationFailure(String),

    #[error("descent datum has no amalgamation: {0}")]
    NoAmalgamation(String),

    #[error("{0} is not a prestack")]
    NotAPrestack(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("validation failed for {entity}: {report}")]
    Validation { entity: String, report: ValidationReport },

    #[error("unknown entity `{0}`")]
    UnknownEntity(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn bound(what: impl Into<String>, bound: u64) -> Self {
        Error::BoundExceeded {
            what: what.into(),
            bound,
        }
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
