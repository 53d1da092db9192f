//! Bell and Wigner inequality checks and the interference coefficient.
//!
//! Every report carries a signed margin where negative means violated, so the
//! covariance form is rearranged as `(1 - <a,c>) - |<a,b> - <c,b>|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probability::{JointDistribution3, Outcome, VariableIndex};

/// Violation tolerance for analytically computed inputs.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityKind {
    BellCovariance,
    WignerJoint,
    WignerConditional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub kind: InequalityKind,
    pub lhs_terms: Vec<f64>,
    pub rhs: f64,
    pub margin: f64,
    pub violated: bool,
    pub tolerance: f64,
}

impl InequalityReport {
    fn new(kind: InequalityKind, lhs_terms: Vec<f64>, rhs: f64, margin: f64, tolerance: f64) -> Self {
        Self { kind, lhs_terms, rhs, margin, violated: margin < -tolerance, tolerance }
    }
}

/// The three conditional probabilities of the conditional Wigner inequality
/// `P(a+|b+) + P(c+|b-) >= P(a+|c+)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CondTriple {
    pub p_a_given_b_plus: f64,
    pub p_c_given_b_minus: f64,
    pub p_a_given_c_plus: f64,
}

impl CondTriple {
    pub fn new(p_a_given_b_plus: f64, p_c_given_b_minus: f64, p_a_given_c_plus: f64) -> Result<Self> {
        let t = Self { p_a_given_b_plus, p_c_given_b_minus, p_a_given_c_plus };
        if t.terms().iter().all(|p| (0.0..=1.0).contains(p)) {
            Ok(t)
        } else {
            Err(Error::InvalidArgument(format!("conditional probabilities must lie in [0, 1]: {t:?}")))
        }
    }

    pub fn terms(&self) -> [f64; 3] {
        [self.p_a_given_b_plus, self.p_c_given_b_minus, self.p_a_given_c_plus]
    }

    pub fn margin(&self) -> f64 {
        self.p_a_given_b_plus + self.p_c_given_b_minus - self.p_a_given_c_plus
    }
}

/// Conditional triple of a classical law.
pub fn cond_triple_from_joint(joint: &JointDistribution3) -> Result<CondTriple> {
    use Outcome::{Minus, Plus};
    use VariableIndex::{A, B, C};
    Ok(CondTriple {
        p_a_given_b_plus: joint.conditional((A, Plus), (B, Plus))?,
        p_c_given_b_minus: joint.conditional((C, Plus), (B, Minus))?,
        p_a_given_c_plus: joint.conditional((A, Plus), (C, Plus))?,
    })
}

/// `|<a,b> - <c,b>| <= 1 - <a,c>`.
pub fn bell_covariance_check(joint: &JointDistribution3, tolerance: f64) -> InequalityReport {
    use VariableIndex::{A, B, C};
    let ab = joint.covariance(A, B);
    let cb = joint.covariance(C, B);
    let rhs = 1.0 - joint.covariance(A, C);
    let margin = rhs - (ab - cb).abs();
    InequalityReport::new(InequalityKind::BellCovariance, vec![ab, cb], rhs, margin, tolerance)
}

/// `P(a+, b+) + P(b-, c+) >= P(a+, c+)`.
///
/// The margin reduces to `w(++-) + w(--+)`.
pub fn wigner_joint_check(joint: &JointDistribution3, tolerance: f64) -> InequalityReport {
    use Outcome::{Minus, Plus};
    use VariableIndex::{A, B, C};
    let ab = joint.probability_of(&[(A, Plus), (B, Plus)]);
    let bc = joint.probability_of(&[(B, Minus), (C, Plus)]);
    let rhs = joint.probability_of(&[(A, Plus), (C, Plus)]);
    InequalityReport::new(InequalityKind::WignerJoint, vec![ab, bc], rhs, ab + bc - rhs, tolerance)
}

pub fn wigner_conditional_check(triple: &CondTriple, tolerance: f64) -> InequalityReport {
    InequalityReport::new(
        InequalityKind::WignerConditional,
        vec![triple.p_a_given_b_plus, triple.p_c_given_b_minus],
        triple.p_a_given_c_plus,
        triple.margin(),
        tolerance,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterferenceRegime {
    Classical,
    Trigonometric,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceResult {
    /// Normalized interference term, `cos θ` when it lies in `[-1, 1]`.
    pub coefficient: f64,
    pub regime: InterferenceRegime,
}

/// Solves `p = p1 + p2 + 2 λ sqrt(p1 p2)` for `λ` and classifies it.
pub fn interference_coefficient(p: f64, p1: f64, p2: f64) -> Result<InterferenceResult> {
    interference_coefficient_with_tolerance(p, p1, p2, DEFAULT_TOLERANCE)
}

/// As [`interference_coefficient`]; `tolerance` applies at both regime
/// boundaries (`|λ| = 0` and `|λ| = 1`).
pub fn interference_coefficient_with_tolerance(
    p: f64,
    p1: f64,
    p2: f64,
    tolerance: f64,
) -> Result<InterferenceResult> {
    for (name, v) in [("p", p), ("p1", p1), ("p2", p2)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidArgument(format!("{name} = {v} is not a probability")));
        }
    }
    if p1 <= 0.0 || p2 <= 0.0 {
        return Err(Error::DegenerateAlternatives { p1, p2 });
    }
    let coefficient = (p - p1 - p2) / (2.0 * (p1 * p2).sqrt());
    let magnitude = coefficient.abs();
    let regime = if magnitude <= tolerance {
        InterferenceRegime::Classical
    } else if magnitude <= 1.0 + tolerance {
        InterferenceRegime::Trigonometric
    } else {
        InterferenceRegime::Hyperbolic
    };
    Ok(InterferenceResult { coefficient, regime })
}
