use thiserror::Error;

/// Errors raised by the library. Every message is prefixed with the module
/// whose precondition was violated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rational: invalid boundary function: {0}")]
    InvalidHerglotz(String),

    #[error("rational: evaluation at pole {pole} (lambda = {lambda})")]
    PoleHit { lambda: f64, pole: f64 },

    #[error("problem: invalid potential: {0}")]
    InvalidPotential(String),

    #[error("problem: length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("problem: weight matrix has length {weights}, boundary dimension is {n}")]
    DimensionMismatch { weights: usize, n: usize },

    #[error("spectrum: missed roots: {0}")]
    MissedRoots(String),

    #[error("spectrum: degenerate (sign-stable) root of the characteristic function near lambda = {0}")]
    DegenerateRoot(f64),

    #[error("spectrum: zero-norm eigenvector at lambda = {0} (spurious root)")]
    ZeroNorm(f64),

    #[error("spectrum: left and right solutions are not proportional at lambda = {lambda} (relative mismatch {mismatch:e})")]
    ProportionalityViolation { lambda: f64, mismatch: f64 },

    #[error("spectrum: {0}")]
    InvalidRequest(String),

    #[error("riesz: invalid index set: {0}")]
    InvalidTheta(String),

    #[error("riesz: index {0} is not in the computed spectrum")]
    MissingIndex(usize),

    #[error("riesz: matrix M is not invertible (verdict {0})")]
    SingularMatrix(String),

    #[error("riesz: no null vector, smallest singular value {sigma_min:e} is above the singular threshold {threshold:e}")]
    NullVectorNotFound { sigma_min: f64, threshold: f64 },

    #[error("riesz: insufficient spectrum: need {needed} retained eigenfunctions, have {available}")]
    InsufficientSpectrum { needed: usize, available: usize },

    #[error("reduced: hypothesis violated: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;
