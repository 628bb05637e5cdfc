use std::fmt;

/// Errors reported by validation and the fallible operations of this crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A problem or bit-string dimension was zero or otherwise unusable.
    InvalidDimension(String),
    /// A probability argument fell outside `[0, 1]` or was not finite.
    InvalidProbability(String),
    /// An input violated an operation's contract (length mismatch, out-of-range value).
    InvalidInput(String),
    /// A parameter value is syntactically valid but not supported (e.g. even block size).
    UnsupportedParameter(String),
    /// A controller was driven with feedback missing a required field.
    MissingFeedback(String),
    /// A Q-table was addressed with a state index outside `[0..lambda]`.
    InvalidState(String),
    /// A statistic was requested over an empty sample.
    EmptySample(String),
    /// An experiment or run configuration failed validation.
    InvalidConfig(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDimension(msg) => write!(f, "invalid dimension: {msg}"),
            Error::InvalidProbability(msg) => write!(f, "invalid probability: {msg}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::UnsupportedParameter(msg) => write!(f, "unsupported parameter: {msg}"),
            Error::MissingFeedback(msg) => write!(f, "missing feedback: {msg}"),
            Error::InvalidState(msg) => write!(f, "invalid state: {msg}"),
            Error::EmptySample(msg) => write!(f, "empty sample: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
