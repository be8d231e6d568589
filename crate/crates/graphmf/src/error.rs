use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent caller input (bad dimensions, missing ids,
    /// violated preconditions).
    #[error("input error: {0}")]
    Input(String),

    /// A manifest failed validation; every violated invariant is listed.
    #[error("invalid manifest: {}", .0.join("; "))]
    Validation(Vec<String>),

    /// An internal invariant broke. Indicates a bug, not bad input.
    #[error("internal invariant violation: {0}")]
    Internal(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
