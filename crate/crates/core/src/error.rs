use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterated logarithm hit a non-positive argument. `depth` counts the
    /// logarithms applied to `M(r)`, starting from 1 for `log M(r)`.
    #[error("iterated logarithm undefined at depth {depth}")]
    IteratedLog { depth: u32 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("evaluation overflow: {0}")]
    Overflow(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
