use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter failed validation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A probability left `[0, 1]`, typically because a rate parameter is too
    /// large for the requested instance size.
    #[error("probability {value} out of range in {context}")]
    ProbabilityOutOfRange { value: f64, context: &'static str },

    /// Two objects that must agree on dimension do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A matrix operation that requires symmetry received a matrix that is
    /// not symmetric within tolerance.
    #[error("matrix is not symmetric: |M[{i},{j}] - M[{j},{i}]| = {deviation:.3e}")]
    NotSymmetric { i: usize, j: usize, deviation: f64 },

    /// The QL iteration failed to converge for some eigenvalue. Does not
    /// happen for well-scaled symmetric input; indicates NaN/Inf entries.
    #[error("eigensolver failed to converge at index {index}")]
    EigenNoConvergence { index: usize },

    /// Root bracketing failed: the target value is never attained.
    #[error("no root: {0}")]
    NoRoot(String),

    /// A combinatorial quantity overflowed its integer representation.
    #[error("combinatorial overflow computing C({n}, {k})")]
    BinomialOverflow { n: u64, k: u64 },

    /// Exhaustive search was requested on an instance too large to enumerate.
    #[error("instance too large for exhaustive search: n = {n}, cap = {cap}")]
    TooLargeForExhaustive { n: usize, cap: usize },

    /// A serialized hypergraph, assignment, matrix, or config failed to parse.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand used by validators.
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
