use std::fmt;

/// Library error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a stated precondition.
    Domain(String),
    /// A root bracket guaranteed by the construction showed no sign change.
    /// This signals a violated hypothesis, not a caller mistake.
    Bracket(String),
    /// File output failed.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Bracket(msg) => write!(f, "bracket error: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
