use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex index {index} out of range for {n} vertices")]
    OutOfRange { index: usize, n: usize },
    #[error("degenerate triple ({0}, {1}, {2})")]
    DegenerateTriple(usize, usize, usize),
    #[error("duplicate pair ({0}, {1})")]
    DuplicatePair(usize, usize),
    #[error("edge {edge:?} meets part {part} twice")]
    PartitionViolation { edge: [usize; 3], part: usize },
    #[error("parts overlap at vertex {0}")]
    OverlappingParts(usize),
    #[error("partition is not an equipartition: sizes {0:?}")]
    NotEquipartition(Vec<usize>),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("exact search cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded { what: String, needed: usize, cap: usize },
    #[error("vertex cap exceeded: {needed} vertices requested, cap is {cap}")]
    VertexCap { needed: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("metric violation: {0}")]
    Metric(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
