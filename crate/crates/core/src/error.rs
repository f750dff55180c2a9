use thiserror::Error;

/// Errors raised by the coefficient, law, and solver layers.
///
/// Validation failures carry the name of the invariant that was violated so
/// that front ends can report it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{invariant} violated: {detail}")]
    Invariant {
        invariant: &'static str,
        detail: String,
    },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("cannot relax a terminal law: kappa_n = 0")]
    TerminalLaw,

    #[error("relaxation defined only for exponential kernels (got {0})")]
    NonExponentialKernel(String),

    #[error("MGT constants not representable ({regime}): stability number = {stability_number}")]
    NotSubcritical {
        regime: &'static str,
        stability_number: String,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invariant(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            invariant,
            detail: detail.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
