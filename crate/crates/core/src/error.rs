use thiserror::Error;

use crate::category::{MorId, ObjId};
use crate::report::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed composition table: {}", .0.join("; "))]
    MalformedTable(Vec<String>),

    #[error("axiom violation: {0}")]
    AxiomViolation(ValidationReport),

    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),

    #[error("{what} exceeds cap: {actual} > {limit}")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("enumeration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    #[error("morphism {0} has no kernel pair")]
    NoKernelPair(MorId),

    #[error("object {0} is out of range")]
    NoSuchObject(ObjId),

    #[error("category is not preregular: {0}")]
    NotPreregular(String),

    #[error("category is not finitary extensive: {0}")]
    NotExtensive(String),

    #[error("category is not precoherent: {0}")]
    NotPrecoherent(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
