use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sample is empty")]
    EmptySample,
    #[error("sample value {value} at position {index} lies outside [0, 1]")]
    OutOfUnitInterval { index: usize, value: f64 },
    #[error("invalid step function: {0}")]
    InvalidStep(String),
    #[error("invalid piecewise-linear function: {0}")]
    InvalidKnots(String),
    #[error("majorant lies below the function by {gap:e} at x = {x}")]
    MajorizationViolated { x: f64, gap: f64 },
    #[error("{x} is not a grid point")]
    NotOnGrid { x: f64 },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("norm index must be a number >= 1, got {0}")]
    InvalidNormIndex(String),
    #[error("{0} is only defined for a finite norm index")]
    InfiniteNorm(&'static str),
    #[error("invalid concave CDF: {0}")]
    InvalidCdf(String),
    #[error("interval lengths sum to {0}, which exceeds 1")]
    PackingOverflow(f64),
    #[error("{0}")]
    Unsupported(String),
    #[error("no draws to estimate quantiles from")]
    EmptyDraws,
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
