//! Finite probability laws on three ±1-valued variables.
//!
//! Atoms are stored in the canonical order
//! `(+++, ++-, +-+, +--, -++, -+-, --+, ---)`, components ordered `(a, b, c)`.
//! Atom index bit 2 is set when `a = -1`, bit 1 for `b`, bit 0 for `c`, so the
//! global sign flip of atom `i` is atom `7 - i`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization tolerance for validated joints.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Sum tolerance accepted when ingesting externally supplied weights, which
/// are then renormalized exactly.
pub const INGEST_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Outcome {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Plus => "+1",
            Outcome::Minus => "-1",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Outcome {
    type Err = String;

    /// Only the exact tokens `+1` and `-1` are accepted.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "+1" => Ok(Outcome::Plus),
            "-1" => Ok(Outcome::Minus),
            other => Err(format!("invalid answer {other:?}: expected +1 or -1")),
        }
    }
}

/// Which of the three questions / random variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableIndex {
    A,
    B,
    C,
}

impl VariableIndex {
    pub const ALL: [VariableIndex; 3] = [VariableIndex::A, VariableIndex::B, VariableIndex::C];

    pub fn position(self) -> usize {
        match self {
            VariableIndex::A => 0,
            VariableIndex::B => 1,
            VariableIndex::C => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VariableIndex::A => "a",
            VariableIndex::B => "b",
            VariableIndex::C => "c",
        }
    }
}

impl fmt::Display for VariableIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VariableIndex {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "a" => Ok(VariableIndex::A),
            "b" => Ok(VariableIndex::B),
            "c" => Ok(VariableIndex::C),
            other => Err(format!("invalid question {other:?}: expected a, b or c")),
        }
    }
}

/// One joint value `(s_a, s_b, s_c)` of the three variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignTriple(pub [Outcome; 3]);

impl SignTriple {
    /// All eight triples in canonical atom order.
    pub fn all() -> [SignTriple; 8] {
        std::array::from_fn(SignTriple::from_atom_index)
    }

    pub fn new(a: Outcome, b: Outcome, c: Outcome) -> Self {
        SignTriple([a, b, c])
    }

    pub fn from_atom_index(index: usize) -> Self {
        assert!(index < 8, "atom index out of range: {index}");
        let bit = |shift: usize| {
            if index >> shift & 1 == 1 {
                Outcome::Minus
            } else {
                Outcome::Plus
            }
        };
        SignTriple([bit(2), bit(1), bit(0)])
    }

    pub fn atom_index(self) -> usize {
        self.0
            .iter()
            .fold(0, |acc, o| (acc << 1) | usize::from(*o == Outcome::Minus))
    }

    pub fn get(self, var: VariableIndex) -> Outcome {
        self.0[var.position()]
    }

    pub fn negate(self) -> Self {
        SignTriple(self.0.map(Outcome::flip))
    }
}

impl fmt::Display for SignTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in self.0 {
            f.write_str(match o {
                Outcome::Plus => "+",
                Outcome::Minus => "-",
            })?;
        }
        Ok(())
    }
}

/// Classical probability law on the eight sign triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 8]", into = "[f64; 8]")]
pub struct JointDistribution3 {
    weights: [f64; 8],
}

impl TryFrom<[f64; 8]> for JointDistribution3 {
    type Error = Error;

    fn try_from(weights: [f64; 8]) -> Result<Self> {
        JointDistribution3::new(weights)
    }
}

impl From<JointDistribution3> for [f64; 8] {
    fn from(joint: JointDistribution3) -> Self {
        joint.weights
    }
}

fn check_nonnegative(weights: &[f64; 8]) -> Result<()> {
    for (i, w) in weights.iter().enumerate() {
        if !w.is_finite() || *w < 0.0 {
            return Err(Error::InvalidJoint(format!(
                "weight of atom {} is {w}",
                SignTriple::from_atom_index(i)
            )));
        }
    }
    Ok(())
}

impl JointDistribution3 {
    /// Validates weights in canonical order; they must sum to 1 within
    /// [`NORMALIZATION_TOLERANCE`].
    pub fn new(weights: [f64; 8]) -> Result<Self> {
        check_nonnegative(&weights)?;
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidJoint(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { weights })
    }

    /// Ingestion path: accepts weights summing to 1 within
    /// [`INGEST_TOLERANCE`] and renormalizes them.
    pub fn ingest(weights: [f64; 8]) -> Result<Self> {
        check_nonnegative(&weights)?;
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > INGEST_TOLERANCE {
            return Err(Error::InvalidJoint(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { weights: weights.map(|w| w / total) })
    }

    pub fn uniform() -> Self {
        Self { weights: [0.125; 8] }
    }

    pub fn point_mass(triple: SignTriple) -> Self {
        let mut weights = [0.0; 8];
        weights[triple.atom_index()] = 1.0;
        Self { weights }
    }

    /// Law of three independent variables with the given `P(+1)` each.
    pub fn independent(p_plus: [f64; 3]) -> Result<Self> {
        if p_plus.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidJoint(format!("marginals out of range: {p_plus:?}")));
        }
        let weights = SignTriple::all().map(|t| {
            (0..3)
                .map(|k| match t.0[k] {
                    Outcome::Plus => p_plus[k],
                    Outcome::Minus => 1.0 - p_plus[k],
                })
                .product()
        });
        Self::ingest(weights)
    }

    pub fn weights(&self) -> &[f64; 8] {
        &self.weights
    }

    pub fn weight(&self, triple: SignTriple) -> f64 {
        self.weights[triple.atom_index()]
    }

    /// Probability that every listed variable takes its listed value.
    pub fn probability_of(&self, event: &[(VariableIndex, Outcome)]) -> f64 {
        SignTriple::all()
            .iter()
            .zip(self.weights.iter())
            .filter(|(t, _)| event.iter().all(|&(v, o)| t.get(v) == o))
            .map(|(_, w)| w)
            .sum()
    }

    /// `E[ξ_i ξ_j]` under this law.
    pub fn covariance(&self, i: VariableIndex, j: VariableIndex) -> f64 {
        SignTriple::all()
            .iter()
            .zip(self.weights.iter())
            .map(|(t, w)| t.get(i).sign() * t.get(j).sign() * w)
            .sum()
    }

    pub fn marginal_plus(&self, i: VariableIndex) -> f64 {
        self.probability_of(&[(i, Outcome::Plus)])
    }

    /// `P(target | given)`.
    pub fn conditional(
        &self,
        target: (VariableIndex, Outcome),
        given: (VariableIndex, Outcome),
    ) -> Result<f64> {
        let denominator = self.probability_of(&[given]);
        if denominator <= 0.0 {
            return Err(Error::ZeroConditioningEvent { variable: given.0, outcome: given.1 });
        }
        let numerator = self.probability_of(&[target, given]);
        Ok((numerator / denominator).clamp(0.0, 1.0))
    }

    /// Averages the law with its global sign flip, making every marginal ½.
    pub fn symmetrize(&self) -> Self {
        let weights = std::array::from_fn(|i| 0.5 * (self.weights[i] + self.weights[7 - i]));
        Self { weights }
    }

    /// Sample from a symmetric Dirichlet law over the eight atoms.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, concentration: f64) -> Result<Self> {
        if !(concentration > 0.0 && concentration.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Dirichlet concentration must be positive, got {concentration}"
            )));
        }
        let gamma = Gamma::new(concentration, 1.0)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        loop {
            let draws: [f64; 8] = std::array::from_fn(|_| gamma.sample(rng));
            let total: f64 = draws.iter().sum();
            // Tiny concentrations can underflow every gamma draw to zero.
            if total > 0.0 && total.is_finite() {
                return Ok(Self { weights: draws.map(|g| g / total) });
            }
        }
    }

    /// Draws one sign triple (one classical agent's predetermined answers).
    pub fn sample_triple<R: Rng + ?Sized>(&self, rng: &mut R) -> SignTriple {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (i, w) in self.weights.iter().enumerate() {
            if *w > 0.0 {
                last_nonzero = i;
            }
            acc += w;
            if u < acc {
                return SignTriple::from_atom_index(i);
            }
        }
        SignTriple::from_atom_index(last_nonzero)
    }

    /// One hidden-variable pair `(ξ, η)` with `η` a copy of `ξ`.
    pub fn sample_copy_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (SignTriple, SignTriple) {
        let t = self.sample_triple(rng);
        (t, t)
    }
}

/// Comma-separated weights in canonical atom order.
impl fmt::Display for JointDistribution3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.weights.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

impl FromStr for JointDistribution3 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 8 {
            return Err(Error::InvalidJoint(format!("expected 8 weights, got {}", parts.len())));
        }
        let mut weights = [0.0; 8];
        for (w, p) in weights.iter_mut().zip(parts) {
            *w = p
                .parse()
                .map_err(|_| Error::InvalidJoint(format!("not a number: {p:?}")))?;
        }
        Self::ingest(weights)
    }
}
