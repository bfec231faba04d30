use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by gauge construction, the solvers, and the exporters.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),

    #[error("invalid unit ball: {0}")]
    InvalidBody(String),

    #[error("invalid gauge spec: {0}")]
    Spec(String),

    #[error("direction list is rank deficient (smallest singular value {0:e})")]
    RankDeficient(f64),

    #[error("point is not on the flat (distance {0:e})")]
    NotOnFlat(f64),

    #[error("gauge is not a norm")]
    NotANorm,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("undecided: {0}")]
    Undecided(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
