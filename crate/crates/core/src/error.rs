//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("invalid symbol {found:?} at position {pos}")]
    InvalidSymbol { found: char, pos: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("map is not enumerable: {0}")]
    NotEnumerable(String),

    #[error("enumeration budget exceeded: input space has {cardinality} elements, budget is {budget}")]
    BudgetExceeded { cardinality: u128, budget: u128 },

    #[error("provenance mismatch: {0}")]
    ProvenanceMismatch(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("insufficient variance: {0}")]
    InsufficientVariance(String),

    #[error("ingestion error at row {row}: {message}")]
    Ingest { row: usize, message: String },

    #[error("malformed distribution file: {0}")]
    MalformedFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
