//! Classical versus quantum-like behaviour tests for dichotomic response data.
//!
//! The crate evaluates Bell- and Wigner-type inequalities over finite
//! probability laws on three ±1 variables, models agents whose answers depend
//! on question order (a real-qubit collapse model), simulates two-question
//! survey designs, and decides whether an observed violation of the
//! conditional Wigner inequality is statistically significant.

pub mod dataset;
pub mod error;
pub mod inequality;
pub mod probability;
pub mod qubit;
pub mod report;
pub mod rng;
pub mod search;
pub mod stats;
pub mod survey;

pub use error::{Error, Result};
pub use inequality::{
    bell_covariance_check, cond_triple_from_joint, interference_coefficient, wigner_conditional_check,
    wigner_joint_check, CondTriple, InequalityKind, InequalityReport, InterferenceRegime,
    InterferenceResult, DEFAULT_TOLERANCE,
};
pub use probability::{JointDistribution3, Outcome, SignTriple, VariableIndex};
pub use qubit::{BlochAngle, QuestionTriple, RealQubitState};
