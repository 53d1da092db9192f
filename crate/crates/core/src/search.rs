//! Searches for the most negative conditional-Wigner margin in the qubit
//! model, and for the smallest margin any symmetric classical law reaches.
//!
//! The qubit margin depends only on angle differences, so the search fixes
//! `a = 0` and scans `(b, c)` on a grid before a compass pattern search.

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequality::{cond_triple_from_joint, wigner_conditional_check, DEFAULT_TOLERANCE};
use crate::probability::{JointDistribution3, SignTriple};
use crate::qubit::{predicted_conditional_triple, QuestionTriple};

/// Dirichlet concentration used when fuzzing classical laws.
pub const FLOOR_CONCENTRATION: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchSpace {
    /// `b` and `c` both free.
    Full,
    /// `b = a`; only `c` is free.
    FirstPairCoincident,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_angles: QuestionTriple,
    pub best_margin: f64,
    /// Best margin on the grid, before refinement.
    pub grid_margin: f64,
    pub evaluations: u64,
    pub refinement_tolerance: f64,
}

/// Predicted margin of the qubit model at `(0, b, c)`.
pub fn quantum_margin(b: f64, c: f64) -> f64 {
    let triple = predicted_conditional_triple(&QuestionTriple::new(0.0, b, c));
    wigner_conditional_check(&triple, DEFAULT_TOLERANCE).margin
}

pub fn maximize_quantum_violation(grid_steps: usize, refine_tol: f64) -> Result<SearchResult> {
    maximize_quantum_violation_in(SearchSpace::Full, grid_steps, refine_tol)
}

pub fn maximize_quantum_violation_in(
    space: SearchSpace,
    grid_steps: usize,
    refine_tol: f64,
) -> Result<SearchResult> {
    if grid_steps < 8 {
        return Err(Error::InvalidArgument(format!("grid_steps must be >= 8, got {grid_steps}")));
    }
    if !(refine_tol > 0.0 && refine_tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("refine_tol must be positive, got {refine_tol}")));
    }
    let h = TAU / grid_steps as f64;
    let objective = |x: [f64; 2]| match space {
        SearchSpace::Full => quantum_margin(x[0], x[1]),
        SearchSpace::FirstPairCoincident => quantum_margin(0.0, x[1]),
    };

    let rows = match space {
        SearchSpace::Full => grid_steps,
        SearchSpace::FirstPairCoincident => 1,
    };
    // Per-row minima keep the first (smallest column) on ties; rows are then
    // reduced in index order, giving the lexicographically smallest cell.
    let row_best: Vec<(usize, f64)> = (0..rows)
        .into_par_iter()
        .map(|i| {
            let mut best = (0, f64::INFINITY);
            for j in 0..grid_steps {
                let m = objective([i as f64 * h, j as f64 * h]);
                if m < best.1 {
                    best = (j, m);
                }
            }
            best
        })
        .collect();
    let mut cell = (0, 0);
    let mut grid_margin = f64::INFINITY;
    for (i, &(j, m)) in row_best.iter().enumerate() {
        if m < grid_margin {
            grid_margin = m;
            cell = (i, j);
        }
    }
    let mut evaluations = (rows * grid_steps) as u64;

    let mut x = [cell.0 as f64 * h, cell.1 as f64 * h];
    let mut best = grid_margin;
    let free: &[usize] = match space {
        SearchSpace::Full => &[0, 1],
        SearchSpace::FirstPairCoincident => &[1],
    };
    let mut step = h;
    while step >= refine_tol {
        let mut moved = false;
        'poll: for &k in free {
            for dir in [1.0, -1.0] {
                let mut trial = x;
                trial[k] += dir * step;
                let m = objective(trial);
                evaluations += 1;
                if m < best {
                    best = m;
                    x = trial;
                    moved = true;
                    break 'poll;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }

    Ok(SearchResult {
        best_angles: QuestionTriple::new(0.0, x[0], x[1]),
        best_margin: best,
        grid_margin,
        evaluations,
        refinement_tolerance: refine_tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorResult {
    pub floor: f64,
    pub evaluated: u64,
    /// Samples dropped because a conditioning event had zero probability.
    pub skipped: u64,
}

/// Smallest conditional-Wigner margin over `samples` symmetrized Dirichlet
/// laws and the symmetrized point masses.
pub fn classical_margin_floor<R: Rng + ?Sized>(samples: usize, rng: &mut R) -> Result<FloorResult> {
    let mut result = FloorResult { floor: f64::INFINITY, evaluated: 0, skipped: 0 };
    let consider = |joint: JointDistribution3, result: &mut FloorResult| -> Result<()> {
        match cond_triple_from_joint(&joint.symmetrize()) {
            Ok(t) => {
                result.floor = result.floor.min(t.margin());
                result.evaluated += 1;
                Ok(())
            }
            Err(Error::ZeroConditioningEvent { .. }) => {
                result.skipped += 1;
                Ok(())
            }
            Err(e) => Err(e),
        }
    };
    for vertex in SignTriple::all() {
        consider(JointDistribution3::point_mass(vertex), &mut result)?;
    }
    for _ in 0..samples {
        consider(JointDistribution3::random(rng, FLOOR_CONCENTRATION)?, &mut result)?;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::Outcome::{Minus as M, Plus as P};
    use crate::rng::seeded;
    use std::f64::consts::PI;

    // Closed form of the qubit margin with a = 0, written independently of
    // the model code: ½[1 + cos b − cos(c − b) − cos c].
    fn oracle_margin(b: f64, c: f64) -> f64 {
        0.5 * (1.0 + b.cos() - (c - b).cos() - c.cos())
    }

    #[test]
    fn closed_form_agrees_with_model() {
        let mut rng = seeded(1);
        for _ in 0..10_000 {
            let (b, c) = (rng.random::<f64>() * TAU, rng.random::<f64>() * TAU);
            assert!((quantum_margin(b, c) - oracle_margin(b, c)).abs() < 1e-14);
        }
    }

    #[test]
    fn fine_grid_optimum() {
        let r = maximize_quantum_violation(360, 1e-9).unwrap();
        assert!((r.best_margin + 0.25).abs() < 1e-8);
        assert!(r.best_margin <= r.grid_margin);
        let again = quantum_margin(r.best_angles.b.radians(), r.best_angles.c.radians());
        assert!((again - r.best_margin).abs() < 1e-12);

        // Optimum has |cos(b/2)| = ½: (b, c) = (2π/3, π/3) or the
        // reflection (4π/3, 5π/3).
        let (b, c) = (r.best_angles.b.radians(), r.best_angles.c.radians());
        assert!(((0.5 * b).cos().abs() - 0.5).abs() < 1e-6);
        let near = |x: f64, y: f64| (x - y).abs() < 1e-6;
        assert!(
            (near(b, 2.0 * PI / 3.0) && near(c, PI / 3.0)) || (near(b, 4.0 * PI / 3.0) && near(c, 5.0 * PI / 3.0)),
            "unexpected optimum ({b}, {c})"
        );
    }

    #[test]
    fn dense_grid_oracle_agrees() {
        let k = 1200;
        let h = TAU / k as f64;
        let mut best = f64::INFINITY;
        for i in 0..k {
            for j in 0..k {
                best = best.min(oracle_margin(i as f64 * h, j as f64 * h));
            }
        }
        let r = maximize_quantum_violation(360, 1e-9).unwrap();
        assert!((best - r.best_margin).abs() < 1e-8);
    }

    #[test]
    fn coarse_grid_finds_basin() {
        let r = maximize_quantum_violation(8, 1e-9).unwrap();
        // Best 8-grid cell: ½(1 − √2) at (3π/4, π/4).
        assert!((r.grid_margin - 0.5 * (1.0 - 2f64.sqrt())).abs() < 1e-12);
        assert!(r.grid_margin <= -0.2);
        assert!(r.best_margin <= -0.2);
        assert_eq!(r.best_angles.a.radians(), 0.0);
    }

    #[test]
    fn grid_tie_break_is_lexicographic() {
        // 360 hits both optima exactly; the (2π/3, π/3) cell comes first.
        let r = maximize_quantum_violation(360, 1.0).unwrap();
        assert!((r.best_angles.b.radians() - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!((r.best_angles.c.radians() - PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_first_pair_cannot_violate() {
        let r = maximize_quantum_violation_in(SearchSpace::FirstPairCoincident, 360, 1e-9).unwrap();
        assert!(r.best_margin >= -1e-15);
        assert_eq!(r.best_angles.b.radians(), 0.0);
        // 1-D sweep oracle: margin = 1 − cos c >= 0.
        for j in 0..10_000 {
            let c = j as f64 * TAU / 10_000.0;
            assert!(oracle_margin(0.0, c) >= -1e-15);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(maximize_quantum_violation(7, 1e-9).is_err());
        assert!(maximize_quantum_violation(8, 0.0).is_err());
    }

    #[test]
    fn vertex_floor_is_zero() {
        let r = classical_margin_floor(0, &mut seeded(0)).unwrap();
        assert_eq!(r.floor, 0.0);
        assert_eq!((r.evaluated, r.skipped), (8, 0));
    }

    #[test]
    fn symmetrized_vertex_margins() {
        // For a law with fair marginals the conditional margin is twice the
        // joint margin w(++-) + w(--+): vertices ±(+,+,-) give 2, all others 0.
        for t in SignTriple::all() {
            let j = JointDistribution3::point_mass(t).symmetrize();
            let m = cond_triple_from_joint(&j).unwrap().margin();
            let expected = if t == SignTriple::new(P, P, M) || t == SignTriple::new(M, M, P) { 2.0 } else { 0.0 };
            assert_eq!(m, expected, "vertex {t}");
        }
    }

    #[test]
    fn sampled_floor_is_nonnegative() {
        let r = classical_margin_floor(20_000, &mut seeded(9)).unwrap();
        assert!(r.floor >= -1e-12);
        assert!(r.floor <= 1e-12, "vertex minimum 0 must be attained");
        assert_eq!(r.evaluated, 20_008);
    }
}
