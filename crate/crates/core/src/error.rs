use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Why a proposed move was rejected by [`crate::apply`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IllegalMoveReason {
    /// Numbers of deleted heaps, split heaps or parts do not fit the ruleset.
    BadCardinality,
    /// The parts of a split do not add up to the heap being split.
    PartSumMismatch,
    /// The same heap is both deleted and split.
    SplitDeletedHeap,
    /// A part of size zero outside Delete Nim.
    EmptyPart,
    /// A heap index beyond the position, or listed twice.
    BadIndex,
}

impl IllegalMoveReason {
    pub fn code(self) -> &'static str {
        match self {
            Self::BadCardinality => "bad-cardinality",
            Self::PartSumMismatch => "part-sum-mismatch",
            Self::SplitDeletedHeap => "split-deleted-heap",
            Self::EmptyPart => "empty-part",
            Self::BadIndex => "bad-index",
        }
    }
}

impl fmt::Display for IllegalMoveReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid ruleset: {0}")]
    InvalidRuleset(String),
    #[error("wrong number of heaps: expected {expected}, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("illegal heap size {size} for {ruleset}")]
    IllegalHeapSize { size: i128, ruleset: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("illegal move: {reason}")]
    IllegalMove { reason: IllegalMoveReason },
    #[error("internal contradiction: {0}")]
    InternalContradiction(String),
    #[error("limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn illegal(reason: IllegalMoveReason) -> Self {
        Error::IllegalMove { reason }
    }

    /// Short machine-readable code, stable across versions.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidRuleset(_) => "invalid-ruleset",
            Error::WrongArity { .. } => "wrong-arity",
            Error::IllegalHeapSize { .. } => "illegal-heap-size",
            Error::Domain(_) => "domain-error",
            Error::Unsupported(_) => "unsupported",
            Error::IllegalMove { .. } => "illegal-move",
            Error::InternalContradiction(_) => "internal-contradiction",
            Error::LimitExceeded(_) => "limit-exceeded",
            Error::Io(_) => "io-error",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
