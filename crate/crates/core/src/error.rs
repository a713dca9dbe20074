use thiserror::Error;

/// Errors raised by the simulator and the hidden-variable analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Invalid indices, dimensions, ranges or missing inputs.
    #[error("configuration error: {0}")]
    Config(String),
    /// A physically degenerate request, e.g. conditioning on a zero-probability outcome.
    #[error("degenerate condition: {0}")]
    Degenerate(String),
    /// A probability-valued parameter outside [0, 1].
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}
