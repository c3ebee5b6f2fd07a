use thiserror::Error;

/// Errors raised by the simulation and limit-law routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("could not parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },

    #[error(
        "job budget of {budget} exhausted before covering time {target_time} \
         (last arrival at {reached})"
    )]
    InsufficientJobs {
        budget: usize,
        target_time: f64,
        reached: f64,
    },

    #[error(
        "local time level {requested} not reached within horizon {horizon} \
         (local time there is {available}); try a horizon of at least {suggested_horizon}"
    )]
    HorizonExceeded {
        requested: f64,
        available: f64,
        horizon: f64,
        suggested_horizon: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
