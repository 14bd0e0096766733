use thiserror::Error;

use crate::routing::RouteError;
use crate::scenario::config::ConfigError;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter violated a documented precondition.
    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("routing failed: {0}")]
    Route(#[from] RouteError),

    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
