use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    #[error("input vectors are linearly dependent (vector {index})")]
    DependentVectors { index: usize },

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),

    #[error("operation requires a {expected} family subspace")]
    WrongFamily { expected: &'static str },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsatisfiable class parameters: {0}")]
    Unsatisfiable(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("extension failed after {tries} tries (best overlap {best_overlap:.3e})")]
    ExtensionExhausted { tries: usize, best_overlap: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
