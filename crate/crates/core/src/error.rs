use std::path::PathBuf;

use serde::Serialize;

/// Errors produced by loading, extraction and reasoning.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("unknown entity `{0}`")]
    UnknownEntity(String),

    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),

    #[error("no path from `{from}` to `{to}` over traversable edges")]
    NoPath { from: String, to: String },

    #[error("seed `{0}` has no neighbors; segment holds the seed alone")]
    EmptySegment(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("missing knowledge segment for query edge {0}")]
    MissingSegment(usize),

    #[error(
        "kernel system not solvable: decay {decay} with spectral bound {spectral_bound} \
         (no convergence after {iterations} iterations)"
    )]
    SingularSystem {
        decay: f64,
        spectral_bound: f64,
        iterations: usize,
    },

    #[error("malformed model file: {0}")]
    Model(String),

    #[error("{source}")]
    WithEvidence {
        #[source]
        source: Box<Error>,
        evidence: Box<serde_json::Value>,
    },
}

/// Coarse error classes used by the service and CLI to pick status/exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ErrorClass {
    /// The request named something absent from the graph or model.
    NotFound,
    /// Extraction produced no usable segment.
    Unprocessable,
    /// Caller supplied bad input.
    Invalid,
    /// Numerical failure.
    Numerical,
    Io,
}

impl Error {
    /// Stable machine-readable name, used in JSON error bodies.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "IoError",
            Error::Format { .. } => "FormatError",
            Error::UnknownEntity(_) => "UnknownEntity",
            Error::UnknownPredicate(_) => "UnknownPredicate",
            Error::NoPath { .. } => "NoPath",
            Error::EmptySegment(_) => "EmptySegment",
            Error::InvalidQuery(_) => "InvalidQuery",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::MissingSegment(_) => "MissingSegment",
            Error::SingularSystem { .. } => "SingularSystem",
            Error::Model(_) => "ModelError",
            Error::WithEvidence { source, .. } => source.kind(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io { .. } => ErrorClass::Io,
            Error::UnknownEntity(_) | Error::UnknownPredicate(_) => ErrorClass::NotFound,
            Error::NoPath { .. } | Error::EmptySegment(_) | Error::MissingSegment(_) => {
                ErrorClass::Unprocessable
            }
            Error::Format { .. }
            | Error::InvalidQuery(_)
            | Error::InvalidParameter(_)
            | Error::Model(_) => ErrorClass::Invalid,
            Error::SingularSystem { .. } => ErrorClass::Numerical,
            Error::WithEvidence { source, .. } => source.class(),
        }
    }

    /// Partial results attached to the error, if any.
    pub fn evidence(&self) -> Option<&serde_json::Value> {
        match self {
            Error::WithEvidence { evidence, .. } => Some(evidence),
            _ => None,
        }
    }

    /// The innermost error, with any evidence wrapper removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::WithEvidence { source, .. } => source.root(),
            e => e,
        }
    }

    pub(crate) fn with_evidence(self, evidence: serde_json::Value) -> Error {
        match self {
            Error::WithEvidence { source, .. } => Error::WithEvidence {
                source,
                evidence: Box::new(evidence),
            },
            e => Error::WithEvidence {
                source: Box::new(e),
                evidence: Box::new(evidence),
            },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
