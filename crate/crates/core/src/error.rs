use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NonHermitian(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid transition matrix: {0}")]
    InvalidTransitionMatrix(String),
    #[error("degenerate decomposition: decay {from}->{to} has zero denominator")]
    DegenerateDecomposition { from: usize, to: usize },
    #[error("level index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("inverse map undefined: levels {levels:?} have zero survival probability")]
    SingularInverse { levels: Vec<usize> },
    #[error("condition violated: {0}")]
    ConditionViolated(String),
    #[error("transition matrices are not comparable: {0}")]
    NotComparable(String),
}
