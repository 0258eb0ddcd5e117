use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("group too large for small-median network: {0}")]
    GroupTooLarge(usize),

    #[error("pivot not in sequence")]
    PivotNotInSequence,

    #[error("rank out of bounds: i={i}, n={n}")]
    RankOutOfBounds { i: usize, n: usize },

    #[error("exhaustive domain too large: n={0} (limit 9)")]
    ExhaustiveDomainTooLarge(usize),

    #[error("no bound registered for algorithm {0}")]
    NoBoundRegistered(String),

    #[error("trace check failed: {0}")]
    TraceCheck(String),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
