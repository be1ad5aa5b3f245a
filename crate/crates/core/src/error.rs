use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension {dim} exceeds the configured maximum {max}")]
    DimensionOverflow { dim: u128, max: usize },

    #[error("{what} index {index} out of range (valid: {valid})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        valid: String,
    },

    #[error("dimension {dim} is not divisible by {factor}")]
    NotDivisible { dim: usize, factor: usize },

    #[error("matrix is numerically singular (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("dense inversion refused for dimension {dim} (limit {limit})")]
    TooLargeForDense { dim: usize, limit: usize },

    #[error("parameter {0} must be nonzero")]
    ZeroParameter(&'static str),

    #[error("index set {indices:?} is not canonical for n = {n}: {reason}")]
    NonCanonicalSet {
        n: usize,
        indices: Vec<usize>,
        reason: &'static str,
    },

    #[error("degenerate deformation parameter for {label}: q^2 = 1 makes x singular")]
    DegenerateDeformation { label: String },

    #[error("hecke solver did not converge for n = {n} (best residual {best_residual:e})")]
    NoConvergence { n: usize, best_residual: f64 },

    #[error("length mismatch for {what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed matrix data: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
