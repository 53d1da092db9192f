//! Run configuration and the JSON analysis report.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::stats::{wilson_interval, TestOutcome, TERM_INTERVAL_CONFIDENCE};
use crate::survey::{symmetry_from_counts, DesignVariant, FrequencyTable, RatioCount, SymmetryReport};

/// Default tolerance for the fair-marginal preparation check.
pub const DEFAULT_SYMMETRY_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Simulate,
    Test,
    Search,
    Interference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignInfo {
    pub variant: DesignVariant,
    /// Unknown for ingested data without run metadata.
    pub n_per_branch: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    /// Model description, e.g. `quantum angles=0,2.09,1.05`.
    pub model: Option<String>,
    pub design: Option<DesignInfo>,
    pub seed: u64,
    pub alpha: f64,
    pub symmetry_tolerance: f64,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            model: None,
            design: None,
            seed: 0,
            alpha: 0.05,
            symmetry_tolerance: DEFAULT_SYMMETRY_TOLERANCE,
            input: None,
            output: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ClassicalConsistent,
    QuantumLikeViolation,
    InconclusiveDegenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuTerm {
    pub value: f64,
    pub numerator: u64,
    pub denominator: u64,
    pub wilson_95: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuTerms {
    pub a_given_b_plus: NuTerm,
    pub c_given_b_minus: NuTerm,
    pub a_given_c_plus: NuTerm,
}

/// Field order here is the key order of the emitted JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub nu: NuTerms,
    pub margin: f64,
    pub standard_error: f64,
    pub z: Option<f64>,
    pub p_value: Option<f64>,
    pub alpha: f64,
    pub verdict: Verdict,
    pub symmetry_check: SymmetryReport,
    pub seed: u64,
    pub design: Option<DesignInfo>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }
}

fn nu_term(r: RatioCount) -> Result<NuTerm> {
    let (low, high) = wilson_interval(r.numerator, r.denominator, TERM_INTERVAL_CONFIDENCE)?;
    Ok(NuTerm { value: r.value(), numerator: r.numerator, denominator: r.denominator, wilson_95: [low, high] })
}

pub fn emit_report(test: &TestOutcome, table: &FrequencyTable, config: &RunConfig) -> Result<Report> {
    let nu = NuTerms {
        a_given_b_plus: nu_term(table.nu_a_given_b_plus)?,
        c_given_b_minus: nu_term(table.nu_c_given_b_minus)?,
        a_given_c_plus: nu_term(table.nu_a_given_c_plus)?,
    };
    let symmetry_check =
        symmetry_from_counts(table.first_answer_marginals.iter().copied(), config.symmetry_tolerance);
    let (margin, standard_error, z, p_value, verdict) = match test {
        TestOutcome::Asymptotic(r) => (
            r.margin_estimate,
            r.standard_error,
            Some(r.z_statistic),
            Some(r.p_value),
            if r.significant_violation { Verdict::QuantumLikeViolation } else { Verdict::ClassicalConsistent },
        ),
        TestOutcome::Degenerate(v) => (v.margin, 0.0, None, None, Verdict::InconclusiveDegenerate),
    };
    Ok(Report {
        nu,
        margin,
        standard_error,
        z,
        p_value,
        alpha: config.alpha,
        verdict,
        symmetry_check,
        seed: config.seed,
        design: config.design,
    })
}
