use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid angular kernel: {0}")]
    InvalidKernel(String),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("collision counter exceeded cap of {cap} internal nodes")]
    CapExceeded { cap: u64 },
    #[error("particle cloud has no mass to sample from")]
    EmptyCloud,
    #[error("DSMC stability guard violated: dt*kappa*majorant = {0} > 0.5")]
    StabilityViolation(f64),
    #[error("insufficient data: {have} records, need at least {need}")]
    InsufficientData { have: usize, need: usize },
    #[error("invalid tree code {0:?}")]
    InvalidTreeCode(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
