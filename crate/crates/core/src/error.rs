use thiserror::Error;

use crate::scheme::SamplingScheme;

pub type Result<T> = std::result::Result<T, VdsError>;

#[derive(Debug, Error)]
pub enum VdsError {
    #[error("invalid grid dimensions: {0}")]
    InvalidDims(String),

    #[error("shape mismatch: expected {expected} entries, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("wavelet: {0}")]
    Wavelet(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range for grid of {n} cells")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("kernel is not reversible (detailed balance residual {residual:.3e})")]
    NotReversible { residual: f64 },

    #[error("step budget of {budget} exhausted with {reached} of {target} distinct samples")]
    BudgetExhausted {
        budget: usize,
        reached: usize,
        target: usize,
        partial: Box<SamplingScheme>,
    },

    #[error("problem too large for dense path: n = {n} exceeds {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("format: {0}")]
    Format(String),

    #[error("config: {0}")]
    Config(String),

    #[error("did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
