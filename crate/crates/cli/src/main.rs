use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ctxbell_core::qubit::QuestionTriple;
use ctxbell_core::report::DEFAULT_SYMMETRY_TOLERANCE;
use ctxbell_core::survey::DesignVariant;
use ctxbell_core::JointDistribution3;

mod commands;

/// Classical vs quantum-like tests for two-question survey data.
#[derive(Debug, Parser)]
#[command(name = "ctxbell", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelKind {
    Quantum,
    Classical,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Design {
    Three,
    Two,
}

impl From<Design> for DesignVariant {
    fn from(d: Design) -> Self {
        match d {
            Design::Three => DesignVariant::Three,
            Design::Two => DesignVariant::Two,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Simulate a survey and write the response CSV.
    Simulate {
        #[arg(long, value_enum)]
        model: ModelKind,
        /// Question angles `a,b,c` in radians (quantum model).
        #[arg(long, required_if_eq("model", "quantum"), allow_hyphen_values = true)]
        angles: Option<QuestionTriple>,
        /// Eight atom weights in order +++,++-,+-+,+--,-++,-+-,--+,--- (classical model).
        #[arg(long, required_if_eq("model", "classical"), value_parser = parse_atoms)]
        atoms: Option<JointDistribution3>,
        /// Replace the classical law by its sign-flip average (fair marginals).
        #[arg(long)]
        symmetrize: bool,
        #[arg(long, value_enum, default_value = "three")]
        design: Design,
        /// Agents per branch.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (0 = all cores); output does not depend on it.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate conditional frequencies from a CSV and test for violation.
    Test {
        file: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Report JSON path; stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Allowed deviation of first-answer +1 fractions from 1/2.
        #[arg(long, default_value_t = DEFAULT_SYMMETRY_TOLERANCE)]
        symmetry_tol: f64,
        /// Seed to record when the dataset carries none.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Search question angles for the largest predicted violation.
    Search {
        #[arg(long, default_value_t = 360)]
        grid: usize,
        #[arg(long, default_value_t = 1e-9)]
        refine_tol: f64,
        /// Also certify the classical floor over this many random laws.
        #[arg(long, default_value_t = 0)]
        floor_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Interference coefficient of p against alternatives p1, p2.
    Interference {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        p2: f64,
    },
}

fn parse_atoms(s: &str) -> Result<JointDistribution3, String> {
    s.parse().map_err(|e: ctxbell_core::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code_for(&err))
        }
    }
}
