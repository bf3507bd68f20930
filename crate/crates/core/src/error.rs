use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, DrggError>;

#[derive(Debug, Error)]
pub enum DrggError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested model cannot be realized, typically because `r0 >= 1/2`.
    #[error("infeasible model: {message}")]
    Infeasible {
        message: String,
        /// Smallest vertex count for which the model becomes feasible, when known.
        min_feasible_n: Option<usize>,
    },

    #[error("undefined statistic: {0}")]
    UndefinedStatistic(String),

    #[error("outside the domain of the formula: {0}")]
    Domain(String),

    #[error("not available: {0}")]
    NotAvailable(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl DrggError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        DrggError::InvalidInput(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        DrggError::Domain(msg.into())
    }
}
