use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Caller violated an operation's precondition (length mismatch, wrong task).
    #[error("usage error: {0}")]
    Usage(String),
    /// Decision vector outside the region where an objective is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Invalid task setting or algorithm configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// Input set was empty where at least one element is required.
    #[error("empty input: {0}")]
    Empty(String),
    /// Data is numerically degenerate for the requested computation.
    #[error("degenerate input: {0}")]
    Degenerate(String),
    /// An external black-box problem reported a failure.
    #[error("external problem `{name}` failed: {message}")]
    External { name: String, message: String },
}
