use thiserror::Error;

/// Errors raised by the operator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a domain constraint (bad weight, mixed block, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Two objects that must live on the same space do not.
    #[error("space mismatch: expected {expected} points, got {found}")]
    SpaceMismatch { expected: usize, found: usize },

    /// A request would exceed the desk-scale resource caps.
    #[error("resource error: {0}")]
    Resource(String),

    /// The operation does not apply to the exponent configuration.
    #[error("case error: {0}")]
    Case(String),

    /// A documented precondition of the operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A scenario field failed validation; `path` names the field, e.g.
    /// `space.weights[1]`.
    #[error("validation error at {path}: {message}")]
    Validation { path: String, message: String },

    /// The matrix cannot be written as a conditional-type operator.
    #[error("not-conditional-type: {0}")]
    NotConditionalType(String),
}

impl Error {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::SpaceMismatch { expected, found })
    }
}
