use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A precondition that the caller is responsible for was broken, e.g. a
    /// non-unitary matrix handed to the simulator.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// The control-energy bound diverges at zero coefficient noise.
    #[error("energy bound diverges at epsilon = 0")]
    DivergentBound,

    #[error("internal error: {0}")]
    Internal(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
