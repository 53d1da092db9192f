use thiserror::Error;

use crate::probability::{Outcome, VariableIndex};

pub type Result<T> = std::result::Result<T, Error>;

/// Exact verdict for data whose branch proportions are all 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateVerdict {
    pub margin: f64,
    pub violated: bool,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid joint distribution: {0}")]
    InvalidJoint(String),

    #[error("conditioning event {variable}={outcome} has zero probability")]
    ZeroConditioningEvent { variable: VariableIndex, outcome: Outcome },

    #[error("interference coefficient undefined: alternative probabilities must be positive (p1={p1}, p2={p2})")]
    DegenerateAlternatives { p1: f64, p2: f64 },

    #[error("no respondent answered {variable}={outcome} first; the conditional frequency {estimator} cannot be formed")]
    EmptyConditioningBranch {
        estimator: &'static str,
        variable: VariableIndex,
        outcome: Outcome,
    },

    #[error("all branch proportions are 0 or 1 (margin {}); asymptotic test undefined", .0.margin)]
    DegenerateVariance(DegenerateVerdict),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("record {respondent_id}: {message}")]
    InconsistentBranch { respondent_id: String, message: String },

    #[error("line {line}: {message}")]
    Format { line: u64, message: String },

    #[error("line {line}: duplicate respondent id {respondent_id}")]
    DuplicateRespondent { line: u64, respondent_id: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by malformed input rather than by the data's
    /// statistical content.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidJoint(_)
                | Error::InconsistentBranch { .. }
                | Error::Format { .. }
                | Error::DuplicateRespondent { .. }
                | Error::InvalidArgument(_)
                | Error::EmptyDataset
        )
    }
}
