use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A literal (`p/q`, surd, continued fraction, tuple) failed to parse.
    /// `pos` is the byte offset of the offending character in the input.
    #[error("parse error at byte {pos} in {input:?}: {msg}")]
    Parse {
        input: String,
        pos: usize,
        msg: String,
    },

    /// A precondition on an operation's arguments was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A computation was refused because it exceeds a configured resource
    /// budget (the answer would be complete or not produced at all — never
    /// truncated).
    #[error("resource budget exceeded: {0}")]
    Budget(String),

    /// Two independent routes to the same answer disagreed. This indicates a
    /// bug and is never expected on any input.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn parse(input: &str, pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_owned(),
            pos,
            msg: msg.into(),
        }
    }

    pub fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
