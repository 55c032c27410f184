use thiserror::Error;

use crate::grid::DyadicIndex;

pub type Result<T> = std::result::Result<T, DyadicError>;

#[derive(Debug, Error)]
pub enum DyadicError {
    #[error("interval (level {level}, position {position}) is not on a depth-{depth} grid")]
    InvalidInterval {
        level: u32,
        position: usize,
        depth: u32,
    },

    #[error("interval {0} sits at the finest level and has no children")]
    NoChildren(DyadicIndex),

    #[error("depth mismatch: expected {expected}, found {found}")]
    DepthMismatch { expected: u32, found: u32 },

    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Power iteration ran out of iterations. Carries the last estimate so
    /// callers can still report it.
    #[error("power iteration did not converge after {iterations} iterations (last estimate {last_estimate:e})")]
    Convergence {
        iterations: usize,
        last_estimate: f64,
        last_iterate: Vec<f64>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl DyadicError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        DyadicError::Domain(msg.into())
    }
}
