use thiserror::Error;

use crate::cayley::SringReport;
use crate::scheme::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The input is not a well-formed relation matrix (not square, label out of range, ...).
    #[error("malformed input: {0}")]
    Malformed(String),

    /// A JSON document did not match the expected schema.
    #[error("schema error at {location}: {message}")]
    Schema { location: String, message: String },

    /// A well-formed matrix that violates one or more scheme axioms.
    #[error("association scheme axioms violated: {0}")]
    Axioms(Box<ValidationReport>),

    /// A class partition that is not an S-ring.
    #[error("S-ring conditions violated: {0}")]
    Sring(Box<SringReport>),

    #[error("size cap exceeded: {requested} points requested, cap is {cap}")]
    ResourceCap { requested: u128, cap: usize },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("length mismatch: {what} has length {found}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            location: location.into(),
            message: message.into(),
        }
    }
}
