use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: usize, limit: usize },

    #[error("polynomial degree {degree} exceeds bound {bound}")]
    DegreeBound { degree: usize, bound: usize },

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative coefficient {value} at index {index}")]
    NegativeCoefficient { index: usize, value: f64 },

    #[error("not t-stable: {0}")]
    NotTStable(String),

    #[error("tolerance {tol:e} not reached within {cap} iterations")]
    ToleranceUnreachable { tol: f64, cap: usize },

    #[error("truncation cap reached: level {level}, escaping mass {escaped:e}")]
    TruncationCap { level: usize, escaped: f64 },

    #[error("enumeration cap exceeded: {cells} cells > {cap}")]
    CapExceeded { cells: usize, cap: usize },

    #[error("event cap {0} exceeded")]
    EventCap(u64),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
