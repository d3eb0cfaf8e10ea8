use thiserror::Error;

#[derive(Debug, Error)]
pub enum AsepError {
    /// Invalid model or numerical parameter; maps to CLI exit code 2.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// A numerical routine failed to converge or hit a singularity; exit code 3.
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("state space exceeded {0} states")]
    StateSpace(usize),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, AsepError>;

pub(crate) fn param_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(AsepError::Parameter(msg.into()))
}
