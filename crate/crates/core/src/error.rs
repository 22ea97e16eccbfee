use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unknown example space `{0}`")]
    UnknownExample(String),

    #[error("requested {requested} sample points, above the limit of {limit}")]
    TooLarge { requested: usize, limit: usize },

    #[error("filling is disconnected: vertex (point {point}, level {level}) has no neighbour one level up")]
    Disconnected { point: usize, level: usize },

    #[error("energy is unbounded below: free component containing vertex {0} carries load but touches no pinned vertex")]
    Unbounded(usize),

    #[error("solver stopped after {iterations} iterations with gradient norm {grad_norm:e}")]
    NotConverged { iterations: usize, grad_norm: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn space(msg: impl Into<String>) -> Self {
        Error::InvalidSpace(msg.into())
    }
}
