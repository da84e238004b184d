use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("invalid tolerance policy: relative_eps={relative_eps:e}, absolute_floor={absolute_floor:e}")]
    InvalidTolerance { relative_eps: f64, absolute_floor: f64 },

    #[error("basis label {label} out of range for subspace {subspace} of dimension {dim}")]
    OutOfRange {
        subspace: usize,
        label: usize,
        dim: usize,
    },

    #[error("invalid subspace partition: {0}")]
    InvalidPartition(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("Kraus operators do not form a trace-non-increasing map (max eigenvalue of sum E^dagger E = {max_eigenvalue})")]
    InvalidKraus { max_eigenvalue: f64 },

    #[error("map is not completely positive (Choi eigenvalue {eigenvalue:e})")]
    NotCompletelyPositive { eigenvalue: f64 },

    #[error("invalid bath probabilities: {0}")]
    InvalidProbabilities(String),

    #[error("mixing matrix is not an isometry (deviation {deviation:e})")]
    NotIsometry { deviation: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
