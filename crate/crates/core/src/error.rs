use thiserror::Error;

use crate::harness::HypothesisReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A domain was empty, malformed, or of the wrong kind for the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A function produced a non-finite value.
    #[error("evaluation error at {point:?}: {message}")]
    Evaluation { point: Vec<f64>, message: String },

    #[error("syntax error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("index {index} out of range (max {max})")]
    Index { index: usize, max: usize },

    /// A type invariant does not hold (bad distortion, grid mismatch, ...).
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// The hypothesis gate refused to run a convergence experiment.
    #[error("hypothesis gate refused: {0}")]
    GateRefused(Box<HypothesisReport>),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
