use alloc::string::String;

use crate::ExtReal;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// An iterative routine stopped before reaching its tolerance. `best` is
    /// the best bound available at that point.
    #[error("numerical: {message} (best bound {best})")]
    Numerical { message: String, best: ExtReal },
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>, best: ExtReal) -> Self {
        Error::Numerical {
            message: msg.into(),
            best,
        }
    }
}
