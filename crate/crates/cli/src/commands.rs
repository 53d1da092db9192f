use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use ctxbell_core::dataset::{parse_dataset, write_dataset};
use ctxbell_core::report::{emit_report, Command, DesignInfo, RunConfig, Verdict};
use ctxbell_core::rng::seeded;
use ctxbell_core::search::{classical_margin_floor, maximize_quantum_violation};
use ctxbell_core::stats::run_violation_test;
use ctxbell_core::survey::{estimate_frequencies, run_protocol, PopulationModel, ProtocolDesign};
use ctxbell_core::{interference_coefficient, Error};

use crate::{Cmd, ModelKind};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;

pub fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::DegenerateVariance(_))
        | Some(Error::EmptyConditioningBranch { .. })
        | Some(Error::DegenerateAlternatives { .. })
        | Some(Error::ZeroConditioningEvent { .. }) => EXIT_INCONCLUSIVE,
        Some(e) if e.is_validation() => EXIT_VALIDATION,
        _ => 1,
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn run(cmd: Cmd) -> Result<u8> {
    match cmd {
        Cmd::Simulate { model, angles, atoms, symmetrize, design, n, seed, workers, out } => {
            let pop = match model {
                ModelKind::Quantum => PopulationModel::QuantumUnpolarized(angles.context("--angles is required")?),
                ModelKind::Classical => {
                    let joint = atoms.context("--atoms is required")?;
                    PopulationModel::ClassicalHiddenVariable(if symmetrize { joint.symmetrize() } else { joint })
                }
            };
            let design = ProtocolDesign::new(design.into(), n)?;
            let data = run_protocol(&pop, design, seed, workers)?;
            write_output(out.as_deref(), &write_dataset(&data))?;
            Ok(EXIT_OK)
        }
        Cmd::Test { file, alpha, report, symmetry_tol, seed } => {
            let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let data = parse_dataset(&text)?;
            let variant = data.validate()?;
            let table = estimate_frequencies(&data)?;
            let outcome = run_violation_test(&table, alpha)?;

            let mut config = RunConfig::new(Command::Test);
            config.alpha = alpha;
            config.symmetry_tolerance = symmetry_tol;
            config.input = Some(file.clone());
            config.output = report.clone();
            config.model = data.meta("model").map(str::to_string);
            config.seed = match data.meta("seed") {
                Some(s) => s.parse().with_context(|| format!("dataset seed {s:?} is not a u64"))?,
                None => seed.unwrap_or(0),
            };
            config.design = Some(DesignInfo {
                variant,
                n_per_branch: data.meta("n_per_branch").and_then(|s| s.parse().ok()),
            });

            let rep = emit_report(&outcome, &table, &config)?;
            write_output(report.as_deref(), &rep.to_json())?;
            eprintln!(
                "margin {:+.6}  verdict {}",
                rep.margin,
                serde_json::to_value(rep.verdict)?.as_str().unwrap_or_default()
            );
            Ok(if rep.verdict == Verdict::InconclusiveDegenerate { EXIT_INCONCLUSIVE } else { EXIT_OK })
        }
        Cmd::Search { grid, refine_tol, floor_samples, seed } => {
            let result = maximize_quantum_violation(grid, refine_tol)?;
            let mut value = serde_json::to_value(&result)?;
            if floor_samples > 0 {
                let floor = classical_margin_floor(floor_samples, &mut seeded(seed))?;
                value["classical_floor"] = serde_json::to_value(&floor)?;
                value["gap"] = serde_json::json!(floor.floor - result.best_margin);
            }
            write_output(None, &to_json(&value))?;
            Ok(EXIT_OK)
        }
        Cmd::Interference { p, p1, p2 } => {
            let result = interference_coefficient(p, p1, p2)?;
            write_output(None, &to_json(&serde_json::to_value(result)?))?;
            Ok(EXIT_OK)
        }
    }
}
