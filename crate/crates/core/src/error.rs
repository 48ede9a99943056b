use alloc::string::String;

use thiserror::Error;

/// Errors raised by the algebra, graph and linear-algebra layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("no exact quotient: {0}")]
    NotDivisible(String),
    #[error("derivative order cap exceeded for {var} (cap {cap})")]
    OrderCap { var: String, cap: usize },
    #[error("malformed encoding: {0}")]
    MalformedEncoding(String),
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("index-choice guard: enumerated {got} choices, expected {expected}")]
    IndexGuard { expected: u64, got: u64 },
    #[error("monomial basis inconsistency: {0}")]
    BasisInconsistency(String),
    #[error("expected a {expected}-vector, found degree {found:?}")]
    Degree { expected: usize, found: Option<usize> },
    #[error("reconstruction failed: {0}")]
    Reconstruction(String),
}

/// Text-format parse failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{msg}")]
pub struct ParseError {
    pub msg: String,
}

impl ParseError {
    pub fn new(msg: impl Into<String>) -> Self {
        ParseError { msg: msg.into() }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
