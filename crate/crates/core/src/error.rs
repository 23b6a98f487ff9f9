use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SkError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested computation exceeds a hard size cap.
    #[error("resource limit: {what} needs 2^{n} states but the cap is n <= {cap}")]
    ResourceLimit {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    /// An internal numerical consistency check failed.
    #[error("numerical diagnostics: {0}")]
    Diagnostics(String),
}

pub type Result<T> = std::result::Result<T, SkError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(SkError::InvalidArgument(msg.into()))
}
