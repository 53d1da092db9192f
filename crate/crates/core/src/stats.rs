//! Significance of an empirical violation of the conditional Wigner
//! inequality.
//!
//! The three frequencies come from disjoint sub-ensembles, so they are treated
//! as independent binomial proportions and the margin is tested one-sided
//! with a normal approximation.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{DegenerateVerdict, Error, Result};
use crate::survey::FrequencyTable;

/// Confidence of the per-term intervals attached to a [`TestResult`].
pub const TERM_INTERVAL_CONFIDENCE: f64 = 0.95;

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal is valid")
}

/// Wilson score interval for `successes / trials`, clamped to `[0, 1]`.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= successes <= trials and trials >= 1, got {successes}/{trials}"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidArgument(format!("confidence {confidence} outside (0, 1)")));
    }
    let z = standard_normal().inverse_cdf(1.0 - (1.0 - confidence) / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    Ok((low, high))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub margin_estimate: f64,
    pub standard_error: f64,
    pub z_statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub significant_violation: bool,
    /// Wilson intervals for the three conditional frequencies, in the order
    /// `a|b+`, `c|b-`, `a|c+`.
    pub term_intervals: [(f64, f64); 3],
}

/// One-sided test of `H0: margin >= 0` against a violation.
pub fn violation_test(table: &FrequencyTable, alpha: f64) -> Result<TestResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside (0, 1)")));
    }
    let terms = table.terms();
    if let Some(t) = terms.iter().find(|t| t.denominator == 0) {
        return Err(Error::InvalidArgument(format!("empty denominator in {t:?}")));
    }
    let margin_estimate = table.margin();
    let variance: f64 = terms
        .iter()
        .map(|t| {
            let p = t.value();
            p * (1.0 - p) / t.denominator as f64
        })
        .sum();
    if variance == 0.0 {
        return Err(Error::DegenerateVariance(DegenerateVerdict {
            margin: margin_estimate,
            violated: margin_estimate < 0.0,
        }));
    }
    let standard_error = variance.sqrt();
    let z_statistic = margin_estimate / standard_error;
    let p_value = standard_normal().cdf(z_statistic);
    let mut term_intervals = [(0.0, 0.0); 3];
    for (slot, t) in term_intervals.iter_mut().zip(terms) {
        *slot = wilson_interval(t.numerator, t.denominator, TERM_INTERVAL_CONFIDENCE)?;
    }
    Ok(TestResult {
        margin_estimate,
        standard_error,
        z_statistic,
        p_value,
        alpha,
        significant_violation: margin_estimate < 0.0 && p_value < alpha,
        term_intervals,
    })
}

/// Either the asymptotic test or the exact verdict for degenerate data.
#[derive(Debug, Clone, PartialEq)]
pub enum TestOutcome {
    Asymptotic(TestResult),
    Degenerate(DegenerateVerdict),
}

/// [`violation_test`] with the degenerate-variance case folded into the
/// outcome; other errors pass through.
pub fn run_violation_test(table: &FrequencyTable, alpha: f64) -> Result<TestOutcome> {
    match violation_test(table, alpha) {
        Ok(r) => Ok(TestOutcome::Asymptotic(r)),
        Err(Error::DegenerateVariance(v)) => Ok(TestOutcome::Degenerate(v)),
        Err(e) => Err(e),
    }
}
