use thiserror::Error;

/// Errors produced by the library. Every variant corresponds to a violated
/// precondition; none of them is recoverable by retrying.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ground set size {0} outside 1..=63")]
    GroundSetSize(usize),

    #[error("element {element} outside [1, {n}]")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("duplicate member {0} in family")]
    DuplicateMember(String),

    #[error("index {index} out of range for family of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("index {0} listed twice")]
    RepeatedIndex(usize),

    #[error("index sets overlap at {0}")]
    OverlappingParts(usize),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("family of {size} members exceeds exact solver cap {cap}")]
    OverSolverCap { size: usize, cap: usize },

    #[error("{0}")]
    Parity(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("unknown bound name {0:?}")]
    UnknownBound(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported format {format} for {kind} report")]
    UnsupportedFormat { kind: String, format: String },

    #[error("malformed report: {0}")]
    MalformedReport(String),
}

pub type Result<T> = std::result::Result<T, Error>;
