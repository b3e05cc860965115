use thiserror::Error;

/// Errors surfaced by construction, certification, and numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix entries must be finite")]
    NonFiniteEntries,

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("operator is not positive semi-definite: min eigenvalue {min_eigenvalue:.3e} below floor {floor:.3e}")]
    NotPsd { min_eigenvalue: f64, floor: f64 },

    #[error("trace {trace} is not 1 within tolerance {tol}")]
    NotNormalized { trace: f64, tol: f64 },

    #[error("alpha = {0} is outside the admissible range")]
    InvalidAlpha(f64),

    #[error("epsilon = {0} must lie in [0, 1)")]
    InvalidEpsilon(f64),

    #[error("supports differ where equality is required")]
    SupportMismatch,

    #[error("{0}")]
    InvalidParameter(String),

    #[error("numerical routine failed: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
