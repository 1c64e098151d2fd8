use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max entrywise deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {trace:.12}, expected 1")]
    BadTrace { trace: f64 },

    #[error("vector is not normalized (norm {norm:.12})")]
    NotNormalized { norm: f64 },

    #[error("Kraus operators are not trace preserving (residual {residual:.3e})")]
    KrausIncomplete { residual: f64 },

    #[error("reduced state on A is not maximally mixed (residual {residual:.3e})")]
    NotMaximallyMixed { residual: f64 },

    #[error("generators span only {span} of the {required} dimensions of the matrix algebra")]
    NotGenerating { span: usize, required: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("problem is infeasible (affine residual stalled at {residual:.3e})")]
    Infeasible { residual: f64 },

    #[error("iteration budget exhausted after {iterations} iterations (residual {residual:.3e})")]
    IterationLimit { iterations: usize, residual: f64 },

    #[error("solution has not converged (status {0})")]
    NotConverged(String),
}
