//! Quantum-like agent model on the real Bloch circle.
//!
//! A question is a measurement direction; its `+1` eigenstate sits at the
//! question's angle and its `-1` eigenstate at that angle plus π. Answering
//! collapses the agent onto the eigenstate of the given answer, so the answer
//! to a later question depends on which questions came before it.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::inequality::CondTriple;
use crate::probability::{Outcome, VariableIndex};

/// Angle on the Bloch circle, normalized into `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct BlochAngle(f64);

impl BlochAngle {
    pub fn new(radians: f64) -> Self {
        let mut phi = radians.rem_euclid(TAU);
        // rem_euclid rounds tiny negatives up to exactly TAU
        if phi >= TAU {
            phi = 0.0;
        }
        BlochAngle(phi)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// Direction of the eigenstate for `outcome`.
    pub fn eigenstate(self, outcome: Outcome) -> BlochAngle {
        match outcome {
            Outcome::Plus => self,
            Outcome::Minus => BlochAngle::new(self.0 + PI),
        }
    }
}

impl From<f64> for BlochAngle {
    fn from(radians: f64) -> Self {
        BlochAngle::new(radians)
    }
}

impl From<BlochAngle> for f64 {
    fn from(angle: BlochAngle) -> Self {
        angle.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RealQubitState {
    Pure(BlochAngle),
    /// Maximally mixed.
    Unpolarized,
}

impl RealQubitState {
    /// A pure state with uniformly random direction. Averaged over draws this
    /// is indistinguishable from [`RealQubitState::Unpolarized`].
    pub fn random_pure<R: Rng + ?Sized>(rng: &mut R) -> Self {
        RealQubitState::Pure(BlochAngle::new(rng.random::<f64>() * TAU))
    }
}

/// Measurement directions for questions `a`, `b`, `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuestionTriple {
    pub a: BlochAngle,
    pub b: BlochAngle,
    pub c: BlochAngle,
}

impl QuestionTriple {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a: BlochAngle::new(a), b: BlochAngle::new(b), c: BlochAngle::new(c) }
    }

    pub fn angle(&self, question: VariableIndex) -> BlochAngle {
        match question {
            VariableIndex::A => self.a,
            VariableIndex::B => self.b,
            VariableIndex::C => self.c,
        }
    }
}

/// `a,b,c` in radians.
impl FromStr for QuestionTriple {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(format!("expected three comma-separated angles, got {s:?}"));
        };
        let parse = |t: &str| t.parse::<f64>().map_err(|_| format!("invalid angle {t:?}"));
        let (a, b, c) = (parse(a)?, parse(b)?, parse(c)?);
        if ![a, b, c].iter().all(|x| x.is_finite()) {
            return Err("angles must be finite".into());
        }
        Ok(QuestionTriple::new(a, b, c))
    }
}

impl fmt::Display for QuestionTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a.0, self.b.0, self.c.0)
    }
}

/// Born rule between two directions: `cos²((from - to)/2)`.
pub fn transition_probability(from: BlochAngle, to: BlochAngle) -> f64 {
    let half = 0.5 * (from.0 - to.0);
    let c = half.cos();
    c * c
}

/// The three conditional probabilities predicted for sequential questioning.
pub fn predicted_conditional_triple(q: &QuestionTriple) -> CondTriple {
    CondTriple {
        p_a_given_b_plus: transition_probability(q.b, q.a),
        p_c_given_b_minus: transition_probability(q.b.eigenstate(Outcome::Minus), q.c),
        p_a_given_c_plus: transition_probability(q.c, q.a),
    }
}

/// Asks `questions` in order, collapsing the state after each answer.
pub fn sample_sequential<R: Rng + ?Sized>(
    state: RealQubitState,
    questions: &[BlochAngle],
    rng: &mut R,
) -> Vec<Outcome> {
    let mut state = state;
    questions.iter().map(|&q| measure(&mut state, q, rng)).collect()
}

/// One projective question: draws the answer by the Born rule and collapses
/// `state` onto the matching eigenstate.
pub fn measure<R: Rng + ?Sized>(state: &mut RealQubitState, question: BlochAngle, rng: &mut R) -> Outcome {
    let p_plus = match *state {
        RealQubitState::Unpolarized => 0.5,
        RealQubitState::Pure(phi) => transition_probability(phi, question),
    };
    let answer = if rng.random::<f64>() < p_plus { Outcome::Plus } else { Outcome::Minus };
    *state = RealQubitState::Pure(question.eigenstate(answer));
    answer
}

/// `P(first = +1, then second = +1)`.
pub fn sequential_joint_probability(
    initial: RealQubitState,
    first: BlochAngle,
    second: BlochAngle,
) -> f64 {
    let p_first = match initial {
        RealQubitState::Unpolarized => 0.5,
        RealQubitState::Pure(phi) => transition_probability(phi, first),
    };
    p_first * transition_probability(first, second)
}
