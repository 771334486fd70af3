use thiserror::Error;

/// Failures raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid truncation dimension {dim} (need at least {min})")]
    InvalidDimension { dim: usize, min: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("parameter `{name}` = {value} out of range: {reason}")]
    ParameterRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("numeric failure in {context}: residual {residual:e}")]
    NumericFailure { context: &'static str, residual: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {min_eigenvalue:e} (largest {max_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64, max_eigenvalue: f64 },

    #[error("matrix is not Hermitian: ||M - M^dag||_F = {asymmetry:e}")]
    NotHermitian { asymmetry: f64 },

    #[error("state truncated at dim {dim}: tail mass {tail_mass:e} exceeds {limit:e}")]
    Truncation { dim: usize, tail_mass: f64, limit: f64 },

    #[error("codewords are not orthogonal: |<0_L|1_L>| = {overlap:e}")]
    InvalidCode { overlap: f64 },

    #[error("codeword Gram matrix is singular (det = {determinant:e})")]
    IllConditionedCode { determinant: f64 },

    #[error("no sign change of the target function in [{lo}, {hi}]")]
    NoSolution { lo: f64, hi: f64 },

    #[error("analytic overlap only available for n in {{0, 1, 2}}, got {0}")]
    UnsupportedOrder(usize),

    #[error("every error-subspace vector was dropped by Gram-Schmidt")]
    DegenerateChannel,

    #[error(
        "SDP solver did not converge after {iterations} iterations \
         (primal {primal_residual:e}, dual {dual_residual:e}, gap {gap:e})"
    )]
    SolverFailure {
        iterations: usize,
        primal_residual: f64,
        dual_residual: f64,
        gap: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
