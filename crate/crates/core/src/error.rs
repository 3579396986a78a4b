use std::path::PathBuf;

use thiserror::Error;

use crate::sample::Triple;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain `{0}` must contain at least one point")]
    EmptyDomain(String),

    #[error("bit pattern has length {got} but domain `{domain}` has size {expected}")]
    PatternLength {
        domain: String,
        expected: usize,
        got: usize,
    },

    #[error("invalid character {0:?} in bit string (expected '0' or '1')")]
    BadBit(char),

    #[error("domain mismatch: `{left}` (size {left_size}) vs `{right}` (size {right_size})")]
    DomainMismatch {
        left: String,
        left_size: usize,
        right: String,
        right_size: usize,
    },

    #[error("index {index} out of range for domain `{domain}` of size {size}")]
    IndexOutOfRange {
        domain: String,
        index: usize,
        size: usize,
    },

    #[error("index {0} appears more than once in subset")]
    DuplicateIndex(usize),

    #[error("hypothesis class is empty")]
    EmptyClass,

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("probabilities sum to {0}, expected 1 within 1e-12")]
    NotNormalized(f64),

    #[error("support lists triple {0} more than once")]
    DuplicateTriple(Triple),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("search budget of {budget} nodes exhausted")]
    BudgetExhausted { budget: u64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
