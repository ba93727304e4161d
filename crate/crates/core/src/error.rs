use thiserror::Error;

/// Errors raised by the operator, generator and Fisher-information routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("Bloch vector length {length} exceeds 1")]
    BlochOutOfRange { length: f64 },

    #[error("operation requires a qubit (dimension 2), got dimension {0}")]
    NotQubit(usize),

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{method} did not converge (residual {residual:e})")]
    NonConvergence { method: &'static str, residual: f64 },

    #[error("density matrix is singular (smallest eigenvalue {smallest:e})")]
    Singular { smallest: f64 },

    #[error("degenerate evolution: {0}")]
    DegenerateEvolution(String),

    #[error("numerical consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
