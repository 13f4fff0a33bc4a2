use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid constraints: {0}")]
    InvalidConstraints(String),

    #[error("infeasible constraints: {0}")]
    InfeasibleConstraints(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("oracle limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
