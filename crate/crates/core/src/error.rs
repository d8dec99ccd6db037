use thiserror::Error;

/// Failure classes shared by every module.
///
/// `Domain` covers precondition violations on the mathematical inputs,
/// `Capacity` covers configured size caps and search budgets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("evaluation error at n = {n}: {message}")]
    Eval { n: String, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
