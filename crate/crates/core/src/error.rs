use thiserror::Error;

/// Errors produced by the synthesis and evaluation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RisError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("frequency {frequency_hz} Hz is outside the sampled band [{min_hz}, {max_hz}] of state `{state}`")]
    OutOfBand {
        state: String,
        frequency_hz: f64,
        min_hz: f64,
        max_hz: f64,
    },

    #[error("instance too large: {candidates} candidate maps exceed the cap of {cap}")]
    TooLarge { candidates: f64, cap: u64 },

    #[error("state table: {0}")]
    StateTable(String),
}

impl RisError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        RisError::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, RisError>;
