//! Error type shared by the whole crate.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value or combination of values violates an operation's contract.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A file exists but its contents are not in the expected format.
    /// `detail` names the offending field, key, or property.
    #[error("{path}: {detail}")]
    Format { path: String, detail: String },

    /// A value cannot be represented in the requested encoding.
    #[error("value out of range: {0}")]
    Range(String),

    /// More samples requested than there are eligible pixels.
    #[error("requested k = {requested} exceeds the eligible support of {support} pixels")]
    InfeasibleK { requested: usize, support: usize },

    /// A sample index refers to a pixel with no valid source depth.
    #[error("sample at linear index {0} refers to an invalid source pixel")]
    InvalidSample(usize),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn format(path: &std::path::Path, detail: impl Into<String>) -> Self {
        Error::Format {
            path: path.display().to_string(),
            detail: detail.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
