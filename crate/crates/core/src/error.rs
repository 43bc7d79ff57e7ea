use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("state is not normalised (norm {norm})")]
    NotNormalised { norm: f64 },

    #[error("trace is not 1 (got {trace})")]
    InvalidTrace { trace: f64 },

    #[error("basis is not orthonormal (defect {defect:e})")]
    NotOrthonormal { defect: f64 },

    #[error("invalid tensor structure: {0}")]
    Structure(String),

    #[error("fidelity {0} outside [0, 1] beyond round-off")]
    FidelityOutOfRange(f64),

    #[error("fixed-point condition violated (defect {defect:e} > tol {tol:e})")]
    FixedPointViolated { defect: f64, tol: f64 },

    #[error(
        "span condition fails: rank {rank} < dimension {dim}; \
         the POVM cannot be used directly, use the extension construction (method 2)"
    )]
    SpanCondition { rank: usize, dim: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("trajectory has no records after the initial state")]
    EmptyTrajectory,

    #[error("field `{field}`: {message}")]
    Format { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
