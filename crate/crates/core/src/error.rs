use thiserror::Error;

/// Errors produced anywhere in the toolkit.
///
/// Bounded procedures never report "no" when they merely ran out of budget:
/// [`Error::BoundExhausted`] and [`Error::NoSolutionWithinBound`] are distinct
/// from definitive answers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("alphabet mismatch: symbol `{0}` is not declared")]
    AlphabetMismatch(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unsupported presentation: {0}")]
    UnsupportedPresentation(String),

    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    #[error("search bound exhausted: {0}")]
    BoundExhausted(String),

    #[error("no solution found within bound: {0}")]
    NoSolutionWithinBound(String),

    #[error("assignment is not a solution: equation {0} is violated")]
    NotASolution(usize),

    #[error("relator {index} (`{relator}`) does not map to the identity")]
    RelatorFailed { index: usize, relator: String },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnsupportedCase(_) | Error::UnsupportedPresentation(_) => 3,
            Error::BoundExhausted(_) | Error::NoSolutionWithinBound(_) => 4,
            Error::RelatorFailed { .. } | Error::NotASolution(_) => 1,
            Error::Parse { .. } | Error::AlphabetMismatch(_) | Error::Invalid(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
