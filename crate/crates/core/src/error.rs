use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse distribution at `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("cdf unavailable for {0}")]
    CdfUnavailable(String),

    #[error("uniform {0} outside [0, 1)")]
    UniformOutOfRange(f64),

    #[error("negative tail truncation not implemented")]
    NegativeTailUnsupported,

    #[error("{0} has infinite variance")]
    InfiniteVariance(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("unbounded support: {0}")]
    Unbounded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
