use thiserror::Error;

/// Errors raised while building spaces, validating points or loading configs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("point does not belong to a {expected} space")]
    KindMismatch { expected: &'static str },

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("distance table is not a metric: {0}")]
    NotAMetric(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    NotApplicable(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn range(what: &'static str, detail: impl Into<String>) -> Self {
        Error::OutOfRange {
            what,
            detail: detail.into(),
        }
    }

    /// True for errors caused by malformed input text rather than
    /// well-formed input that fails validation.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
