//! Two-question survey designs: simulation and frequency estimation.
//!
//! Three-ensemble design: disjoint branches ask `(b, a)`, `(b, c)` and
//! `(c, a)`. Two-ensemble design: `S1` asks `b` and routes `+1` answers to `a`
//! and `-1` answers to `c`; `S2` asks `(c, a)`. `S1` gets twice the agents of
//! other branches so its two sub-branches have comparable sizes.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequality::CondTriple;
use crate::probability::{JointDistribution3, Outcome, SignTriple, VariableIndex};
use crate::qubit::{measure, QuestionTriple, RealQubitState};
use crate::rng::named_stream;

use Outcome::{Minus, Plus};
use VariableIndex::{A, B, C};

#[derive(Debug, Clone, PartialEq)]
pub enum PopulationModel {
    /// Each agent carries one predetermined answer triple drawn from the law.
    ClassicalHiddenVariable(JointDistribution3),
    /// Agents start maximally mixed and collapse on every answer.
    QuantumUnpolarized(QuestionTriple),
}

impl PopulationModel {
    pub fn describe(&self) -> String {
        match self {
            PopulationModel::ClassicalHiddenVariable(j) => format!("classical atoms={j}"),
            PopulationModel::QuantumUnpolarized(q) => format!("quantum angles={q}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignVariant {
    Three,
    Two,
}

impl DesignVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            DesignVariant::Three => "three",
            DesignVariant::Two => "two",
        }
    }
}

impl FromStr for DesignVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "three" => Ok(DesignVariant::Three),
            "two" => Ok(DesignVariant::Two),
            other => Err(format!("unknown design {other:?}: expected three or two")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolDesign {
    pub variant: DesignVariant,
    pub n_per_branch: usize,
}

impl ProtocolDesign {
    pub fn new(variant: DesignVariant, n_per_branch: usize) -> Result<Self> {
        if n_per_branch == 0 {
            return Err(Error::InvalidArgument("n_per_branch must be at least 1".into()));
        }
        Ok(Self { variant, n_per_branch })
    }

    pub fn three(n_per_branch: usize) -> Result<Self> {
        Self::new(DesignVariant::Three, n_per_branch)
    }

    pub fn two(n_per_branch: usize) -> Result<Self> {
        Self::new(DesignVariant::Two, n_per_branch)
    }

    /// Branches in dataset order with their agent counts.
    pub fn branches(&self) -> Vec<(Branch, usize)> {
        let n = self.n_per_branch;
        match self.variant {
            DesignVariant::Three => vec![(Branch::BA, n), (Branch::BC, n), (Branch::CA, n)],
            DesignVariant::Two => vec![(Branch::S1, 2 * n), (Branch::S2, n)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    BA,
    BC,
    CA,
    S1,
    S2,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::BA => "BA",
            Branch::BC => "BC",
            Branch::CA => "CA",
            Branch::S1 => "S1",
            Branch::S2 => "S2",
        }
    }

    pub fn variant(self) -> DesignVariant {
        match self {
            Branch::BA | Branch::BC | Branch::CA => DesignVariant::Three,
            Branch::S1 | Branch::S2 => DesignVariant::Two,
        }
    }

    pub fn first_question(self) -> VariableIndex {
        match self {
            Branch::BA | Branch::BC | Branch::S1 => B,
            Branch::CA | Branch::S2 => C,
        }
    }

    /// Second question, which in `S1` depends on the first answer.
    pub fn second_question(self, first_answer: Outcome) -> VariableIndex {
        match (self, first_answer) {
            (Branch::BA | Branch::CA | Branch::S2, _) => A,
            (Branch::BC, _) => C,
            (Branch::S1, Plus) => A,
            (Branch::S1, Minus) => C,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "BA" => Ok(Branch::BA),
            "BC" => Ok(Branch::BC),
            "CA" => Ok(Branch::CA),
            "S1" => Ok(Branch::S1),
            "S2" => Ok(Branch::S2),
            other => Err(format!("unknown branch {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub respondent_id: String,
    pub branch: Branch,
    pub first_question: VariableIndex,
    pub first_answer: Outcome,
    pub second_question: VariableIndex,
    pub second_answer: Outcome,
}

impl ResponseRecord {
    /// Checks the question pair against the branch's design.
    pub fn validate(&self) -> Result<()> {
        let fail = |message: String| {
            Err(Error::InconsistentBranch { respondent_id: self.respondent_id.clone(), message })
        };
        if self.first_question == self.second_question {
            return fail(format!("question {} asked twice", self.first_question));
        }
        let first = self.branch.first_question();
        let second = self.branch.second_question(self.first_answer);
        if self.first_question != first || self.second_question != second {
            return fail(format!(
                "branch {} after first answer {} expects questions ({first}, {second}), got ({}, {})",
                self.branch, self.first_answer, self.first_question, self.second_question
            ));
        }
        Ok(())
    }
}

/// Response records plus ordered `key=value` metadata describing how they
/// were produced.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResponseDataset {
    pub metadata: Vec<(String, String)>,
    pub records: Vec<ResponseRecord>,
}

impl ResponseDataset {
    pub fn new(records: Vec<ResponseRecord>) -> Self {
        Self { metadata: Vec::new(), records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Checks every record and that branches come from a single design.
    pub fn validate(&self) -> Result<DesignVariant> {
        let first = self.records.first().ok_or(Error::EmptyDataset)?;
        let variant = first.branch.variant();
        let mut seen = HashSet::with_capacity(self.records.len());
        for r in &self.records {
            r.validate()?;
            if r.branch.variant() != variant {
                return Err(Error::InconsistentBranch {
                    respondent_id: r.respondent_id.clone(),
                    message: format!(
                        "branch {} belongs to the {} design but the dataset started with {}",
                        r.branch,
                        r.branch.variant().as_str(),
                        variant.as_str()
                    ),
                });
            }
            if !seen.insert(r.respondent_id.as_str()) {
                return Err(Error::InconsistentBranch {
                    respondent_id: r.respondent_id.clone(),
                    message: "duplicate respondent id".into(),
                });
            }
        }
        Ok(variant)
    }
}

pub fn respondent_id(index: usize) -> String {
    format!("r{index:07}")
}

enum Agent {
    Classical(SignTriple),
    Quantum { state: RealQubitState, questions: QuestionTriple },
}

impl Agent {
    fn draw<R: Rng + ?Sized>(pop: &PopulationModel, rng: &mut R) -> Self {
        match pop {
            PopulationModel::ClassicalHiddenVariable(joint) => Agent::Classical(joint.sample_triple(rng)),
            PopulationModel::QuantumUnpolarized(q) => {
                Agent::Quantum { state: RealQubitState::Unpolarized, questions: *q }
            }
        }
    }

    fn ask<R: Rng + ?Sized>(&mut self, question: VariableIndex, rng: &mut R) -> Outcome {
        match self {
            Agent::Classical(t) => t.get(question),
            Agent::Quantum { state, questions } => measure(state, questions.angle(question), rng),
        }
    }
}

fn simulate_agent(pop: &PopulationModel, branch: Branch, seed: u64, index: usize, global: usize) -> ResponseRecord {
    let mut rng = named_stream(seed, branch.as_str(), index as u64);
    let mut agent = Agent::draw(pop, &mut rng);
    let first_question = branch.first_question();
    let first_answer = agent.ask(first_question, &mut rng);
    let second_question = branch.second_question(first_answer);
    let second_answer = agent.ask(second_question, &mut rng);
    ResponseRecord {
        respondent_id: respondent_id(global),
        branch,
        first_question,
        first_answer,
        second_question,
        second_answer,
    }
}

/// Simulates the design over fresh agents from `pop`.
///
/// Agent `i` of branch `X` draws from the stream named `(seed, X, i)`, so the
/// output is identical for every `workers` value (0 means rayon's default).
pub fn run_protocol(
    pop: &PopulationModel,
    design: ProtocolDesign,
    seed: u64,
    workers: usize,
) -> Result<ResponseDataset> {
    if design.n_per_branch == 0 {
        return Err(Error::InvalidArgument("n_per_branch must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;

    let mut records = Vec::with_capacity(design.branches().iter().map(|(_, n)| n).sum());
    let mut offset = 0;
    for (branch, count) in design.branches() {
        let chunk: Vec<ResponseRecord> = pool.install(|| {
            (0..count)
                .into_par_iter()
                .map(|i| simulate_agent(pop, branch, seed, i, offset + i))
                .collect()
        });
        records.extend(chunk);
        offset += count;
    }

    let mut metadata = vec![
        ("design".to_string(), design.variant.as_str().to_string()),
        ("n_per_branch".to_string(), design.n_per_branch.to_string()),
    ];
    for (branch, count) in design.branches() {
        metadata.push((format!("size_{branch}"), count.to_string()));
    }
    metadata.push(("model".to_string(), pop.describe()));
    metadata.push(("seed".to_string(), seed.to_string()));
    Ok(ResponseDataset { metadata, records })
}

/// Successes over trials for one estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioCount {
    pub numerator: u64,
    pub denominator: u64,
}

impl RatioCount {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginalCount {
    pub question: VariableIndex,
    pub plus: u64,
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub nu_a_given_b_plus: RatioCount,
    pub nu_c_given_b_minus: RatioCount,
    pub nu_a_given_c_plus: RatioCount,
    /// First-answer counts per question, ordered a, b, c; questions never
    /// asked first are absent.
    pub first_answer_marginals: Vec<MarginalCount>,
}

impl FrequencyTable {
    pub fn terms(&self) -> [RatioCount; 3] {
        [self.nu_a_given_b_plus, self.nu_c_given_b_minus, self.nu_a_given_c_plus]
    }

    pub fn cond_triple(&self) -> CondTriple {
        CondTriple {
            p_a_given_b_plus: self.nu_a_given_b_plus.value(),
            p_c_given_b_minus: self.nu_c_given_b_minus.value(),
            p_a_given_c_plus: self.nu_a_given_c_plus.value(),
        }
    }

    pub fn margin(&self) -> f64 {
        self.cond_triple().margin()
    }
}

#[derive(Default)]
struct Tally {
    numerator: u64,
    denominator: u64,
}

/// Conditional frequencies `n(target=+1 | given)/N(given)` from the branch
/// that asks `given` first and `target` second.
pub fn estimate_frequencies(data: &ResponseDataset) -> Result<FrequencyTable> {
    data.validate()?;
    let mut a_b_plus = Tally::default();
    let mut c_b_minus = Tally::default();
    let mut a_c_plus = Tally::default();
    let mut marginals: BTreeMap<VariableIndex, (u64, u64)> = BTreeMap::new();

    for r in &data.records {
        let m = marginals.entry(r.first_question).or_default();
        m.0 += u64::from(r.first_answer == Plus);
        m.1 += 1;

        let tally = match (r.first_question, r.first_answer, r.second_question) {
            (B, Plus, A) => &mut a_b_plus,
            (B, Minus, C) => &mut c_b_minus,
            (C, Plus, A) => &mut a_c_plus,
            _ => continue,
        };
        tally.denominator += 1;
        tally.numerator += u64::from(r.second_answer == Plus);
    }

    let finish = |t: Tally, estimator: &'static str, variable, outcome| {
        if t.denominator == 0 {
            Err(Error::EmptyConditioningBranch { estimator, variable, outcome })
        } else {
            Ok(RatioCount { numerator: t.numerator, denominator: t.denominator })
        }
    };
    Ok(FrequencyTable {
        nu_a_given_b_plus: finish(a_b_plus, "nu(a=+1|b=+1)", B, Plus)?,
        nu_c_given_b_minus: finish(c_b_minus, "nu(c=+1|b=-1)", B, Minus)?,
        nu_a_given_c_plus: finish(a_c_plus, "nu(a=+1|c=+1)", C, Plus)?,
        first_answer_marginals: marginals
            .into_iter()
            .map(|(question, (plus, total))| MarginalCount { question, plus, total })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionFairness {
    pub question: VariableIndex,
    pub plus: u64,
    pub total: u64,
    pub fraction: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub tolerance: f64,
    pub questions: Vec<QuestionFairness>,
    pub passed: bool,
}

/// Fraction of `+1` first answers per question; flags any farther than
/// `tolerance` from ½.
pub fn check_symmetry(data: &ResponseDataset, tolerance: f64) -> SymmetryReport {
    let mut counts: BTreeMap<VariableIndex, (u64, u64)> = BTreeMap::new();
    for r in &data.records {
        let c = counts.entry(r.first_question).or_default();
        c.0 += u64::from(r.first_answer == Plus);
        c.1 += 1;
    }
    symmetry_from_counts(counts.into_iter().map(|(q, (plus, total))| MarginalCount { question: q, plus, total }), tolerance)
}

pub fn symmetry_from_counts(
    counts: impl IntoIterator<Item = MarginalCount>,
    tolerance: f64,
) -> SymmetryReport {
    let questions: Vec<QuestionFairness> = counts
        .into_iter()
        .filter(|m| m.total > 0)
        .map(|m| {
            let fraction = m.plus as f64 / m.total as f64;
            QuestionFairness {
                question: m.question,
                plus: m.plus,
                total: m.total,
                fraction,
                flagged: (fraction - 0.5).abs() > tolerance,
            }
        })
        .collect();
    let passed = questions.iter().all(|q| !q.flagged);
    SymmetryReport { tolerance, questions, passed }
}

/// True iff every pair agrees on all three components.
pub fn check_perfect_correlation(pairs: &[(SignTriple, SignTriple)]) -> bool {
    pairs
        .iter()
        .all(|(xi, eta)| VariableIndex::ALL.iter().all(|&v| xi.get(v) == eta.get(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use std::f64::consts::PI;

    fn rec(id: &str, branch: Branch, fq: VariableIndex, fa: Outcome, sq: VariableIndex, sa: Outcome) -> ResponseRecord {
        ResponseRecord {
            respondent_id: id.into(),
            branch,
            first_question: fq,
            first_answer: fa,
            second_question: sq,
            second_answer: sa,
        }
    }

    fn correlated() -> PopulationModel {
        PopulationModel::ClassicalHiddenVariable(
            JointDistribution3::point_mass(SignTriple::new(Plus, Plus, Plus)).symmetrize(),
        )
    }

    #[test]
    fn hand_counted_frequency() {
        let data = ResponseDataset::new(vec![
            rec("r1", Branch::BA, B, Plus, A, Plus),
            rec("r2", Branch::BA, B, Plus, A, Minus),
            rec("r3", Branch::BA, B, Minus, A, Plus),
            rec("r4", Branch::BA, B, Plus, A, Plus),
            rec("r5", Branch::BC, B, Minus, C, Plus),
            rec("r6", Branch::CA, C, Plus, A, Minus),
        ]);
        let t = estimate_frequencies(&data).unwrap();
        assert_eq!(t.nu_a_given_b_plus, RatioCount { numerator: 2, denominator: 3 });
        assert!((t.nu_a_given_b_plus.value() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(t.nu_c_given_b_minus, RatioCount { numerator: 1, denominator: 1 });
        assert_eq!(t.nu_a_given_c_plus, RatioCount { numerator: 0, denominator: 1 });
        assert_eq!(
            t.first_answer_marginals,
            vec![
                MarginalCount { question: B, plus: 3, total: 5 },
                MarginalCount { question: C, plus: 1, total: 1 }
            ]
        );
    }

    #[test]
    fn empty_conditioning_branch() {
        let data = ResponseDataset::new(vec![
            rec("r1", Branch::BA, B, Minus, A, Plus),
            rec("r2", Branch::BA, B, Minus, A, Minus),
            rec("r3", Branch::BC, B, Minus, C, Plus),
            rec("r4", Branch::CA, C, Plus, A, Plus),
        ]);
        assert!(matches!(
            estimate_frequencies(&data),
            Err(Error::EmptyConditioningBranch { variable: B, outcome: Plus, .. })
        ));
    }

    #[test]
    fn rejects_inconsistent_records() {
        let bad_pair = ResponseDataset::new(vec![rec("r1", Branch::BA, B, Plus, C, Plus)]);
        assert!(matches!(estimate_frequencies(&bad_pair), Err(Error::InconsistentBranch { .. })));
        let repeated = ResponseDataset::new(vec![rec("r1", Branch::BA, B, Plus, B, Plus)]);
        assert!(matches!(estimate_frequencies(&repeated), Err(Error::InconsistentBranch { .. })));
        let s1_routing = ResponseDataset::new(vec![rec("r1", Branch::S1, B, Minus, A, Plus)]);
        assert!(matches!(estimate_frequencies(&s1_routing), Err(Error::InconsistentBranch { .. })));
        let mixed = ResponseDataset::new(vec![
            rec("r1", Branch::BA, B, Plus, A, Plus),
            rec("r2", Branch::S2, C, Plus, A, Plus),
        ]);
        assert!(matches!(estimate_frequencies(&mixed), Err(Error::InconsistentBranch { .. })));
        assert!(matches!(estimate_frequencies(&ResponseDataset::default()), Err(Error::EmptyDataset)));
    }

    #[test]
    fn deterministic_agents_give_exact_frequencies() {
        for design in [ProtocolDesign::three(500).unwrap(), ProtocolDesign::two(500).unwrap()] {
            let data = run_protocol(&correlated(), design, 5, 2).unwrap();
            let t = estimate_frequencies(&data).unwrap();
            assert_eq!(t.nu_a_given_b_plus.value(), 1.0);
            assert_eq!(t.nu_c_given_b_minus.value(), 0.0);
            assert_eq!(t.nu_a_given_c_plus.value(), 1.0);
        }
    }

    #[test]
    fn two_ensemble_sizes_and_routing() {
        let pop = PopulationModel::QuantumUnpolarized(QuestionTriple::new(0.0, 1.0, 2.0));
        let data = run_protocol(&pop, ProtocolDesign::two(100).unwrap(), 1, 1).unwrap();
        assert_eq!(data.len(), 300);
        assert_eq!(data.records.iter().filter(|r| r.branch == Branch::S1).count(), 200);
        assert_eq!(data.meta("size_S1"), Some("200"));
        assert_eq!(data.meta("size_S2"), Some("100"));
        for r in &data.records {
            r.validate().unwrap();
        }
        assert_eq!(data.records[0].respondent_id, "r0000000");
        assert_eq!(data.records[299].respondent_id, "r0000299");
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let pop = PopulationModel::QuantumUnpolarized(QuestionTriple::new(0.0, 2.0 * PI / 3.0, PI / 3.0));
        let design = ProtocolDesign::three(2000).unwrap();
        let one = run_protocol(&pop, design, 42, 1).unwrap();
        let eight = run_protocol(&pop, design, 42, 8).unwrap();
        assert_eq!(one, eight);
        assert_ne!(one, run_protocol(&pop, design, 43, 1).unwrap());
    }

    #[test]
    fn zero_agents_rejected() {
        assert!(ProtocolDesign::three(0).is_err());
        let design = ProtocolDesign { variant: DesignVariant::Three, n_per_branch: 0 };
        assert!(run_protocol(&correlated(), design, 0, 1).is_err());
    }

    #[test]
    fn classical_answers_ignore_order() {
        let mut rng = seeded(6);
        let joint = JointDistribution3::random(&mut rng, 1.0).unwrap();
        let pop = PopulationModel::ClassicalHiddenVariable(joint);
        for _ in 0..1000 {
            let mut agent = Agent::draw(&pop, &mut rng);
            let Agent::Classical(t) = agent else { unreachable!() };
            let forward = (agent.ask(B, &mut rng), agent.ask(A, &mut rng));
            let backward = (agent.ask(A, &mut rng), agent.ask(B, &mut rng));
            assert_eq!(forward, (backward.1, backward.0));
            assert_eq!(forward, (t.get(B), t.get(A)));
        }
    }

    #[test]
    fn symmetry_examples() {
        let point = PopulationModel::ClassicalHiddenVariable(JointDistribution3::point_mass(SignTriple::new(
            Plus, Plus, Plus,
        )));
        let data = run_protocol(&point, ProtocolDesign::three(50).unwrap(), 0, 1).unwrap();
        let report = check_symmetry(&data, 0.05);
        assert!(!report.passed);
        assert_eq!(report.questions.len(), 2);
        for q in &report.questions {
            assert_eq!(q.fraction, 1.0);
            assert!(q.flagged);
        }
        // a is never asked first, so it does not appear.
        assert!(report.questions.iter().all(|q| q.question != A));
    }

    #[test]
    fn perfect_correlation_check() {
        let mut rng = seeded(12);
        let joint = JointDistribution3::random(&mut rng, 1.0).unwrap();
        let mut pairs: Vec<_> = (0..1000).map(|_| joint.sample_copy_pair(&mut rng)).collect();
        assert!(check_perfect_correlation(&pairs));
        let (xi, _) = pairs[500];
        let mut eta = xi;
        eta.0[1] = eta.0[1].flip();
        pairs[500] = (xi, eta);
        assert!(!check_perfect_correlation(&pairs));
        assert!(check_perfect_correlation(&[]));
    }
}
