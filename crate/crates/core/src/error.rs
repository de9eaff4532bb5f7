use thiserror::Error;

use crate::characterization::PmDecision;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Domain(String),

    #[error("line {line}: edge {{{u}, {v}}} declared with weight {first} and again with {second}")]
    Conflict {
        line: usize,
        u: String,
        v: String,
        first: String,
        second: String,
    },

    #[error("{what} supports at most {cap} vertices, got {actual}")]
    Capacity {
        what: &'static str,
        cap: usize,
        actual: usize,
    },

    #[error("the game is not population monotonic")]
    NotPopulationMonotonic(Box<PmDecision>),

    #[error("scheme is incomplete: {0}")]
    IncompleteScheme(String),

    #[error("invalid scheme document: {0}")]
    SchemeFormat(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_cap(what: &'static str, cap: usize, actual: usize) -> Result<()> {
    if actual > cap {
        Err(Error::Capacity { what, cap, actual })
    } else {
        Ok(())
    }
}
