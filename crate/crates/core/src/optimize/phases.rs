use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::interferometer::{evaluate, InterferometerConfig};
use crate::numerics::golden_section;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseOptimum {
    pub phi_las: f64,
    pub phi_int: f64,
    pub variance: f64,
    /// Set when the whole grid lies within a relative `1e-10` band: no phase is preferred.
    pub flat: bool,
    pub evaluations: usize,
}

/// Coarse grid resolution and refinement tolerance for [`optimize_phases`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSearch {
    pub grid: usize,
    pub tolerance: f64,
}

impl Default for PhaseSearch {
    fn default() -> Self {
        PhaseSearch {
            grid: 64,
            tolerance: 1e-6,
        }
    }
}

fn variance_at(base: &InterferometerConfig, phi_las: f64, phi_int: f64) -> f64 {
    match evaluate(&base.with_phases(phi_las, phi_int)) {
        Ok(r) if r.estimable => r.variance_epsilon,
        _ => f64::INFINITY,
    }
}

/// Every `(phi_las, phi_int, variance)` on a `grid x grid` lattice over `[0, 2pi)^2`,
/// in row-major order with `phi_las` the slow index.
pub fn phase_grid(base: &InterferometerConfig, grid: usize) -> Vec<(f64, f64, f64)> {
    let step = TAU / grid as f64;
    (0..grid * grid)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / grid, idx % grid);
            let (pl, pi) = (i as f64 * step, j as f64 * step);
            (pl, pi, variance_at(base, pl, pi))
        })
        .collect()
}

/// Minimises the sensitivity over both phases of `base`.
///
/// Among grid points tied with the minimum to a relative `1e-9`, the one with the smallest
/// `phi_las` (then `phi_int`) wins, so mirror-image optima resolve deterministically.
pub fn optimize_phases(base: &InterferometerConfig, search: PhaseSearch) -> Result<PhaseOptimum> {
    base.validate()?;
    base.r2.finite()?;
    let grid = phase_grid(base, search.grid);
    let min = grid.iter().map(|p| p.2).fold(f64::INFINITY, f64::min);
    let max = grid.iter().map(|p| p.2).fold(f64::NEG_INFINITY, f64::max);
    let flat = min.is_finite() && (max - min) <= 1e-10 * min.abs();
    let &(mut pl, mut pi, mut best) = grid.iter().find(|p| p.2 <= min * (1.0 + 1e-9)).unwrap_or(&grid[0]);
    let mut evaluations = grid.len();
    if flat || !best.is_finite() {
        return Ok(PhaseOptimum {
            phi_las: pl,
            phi_int: pi,
            variance: best,
            flat,
            evaluations,
        });
    }
    let step = TAU / search.grid as f64;
    let (grid_l, grid_i) = (pl, pi);
    for _ in 0..20 {
        let (before_l, before_i) = (pl, pi);
        let (x, _, n) = golden_section(|x| Ok(variance_at(base, x, pi)), pl - step, pl + step, search.tolerance)?;
        pl = x;
        evaluations += n;
        let (y, _, n) = golden_section(|y| Ok(variance_at(base, pl, y)), pi - step, pi + step, search.tolerance)?;
        pi = y;
        evaluations += n;
        if (pl - before_l).abs() < search.tolerance && (pi - before_i).abs() < search.tolerance {
            break;
        }
    }
    let refined = variance_at(base, pl, pi);
    if refined > best {
        (pl, pi) = (grid_l, grid_i);
    } else {
        best = refined;
    }
    // Refinement may step just below zero; report such points as 0, not 2pi.
    let wrap = |x: f64| {
        let y = x.rem_euclid(TAU);
        if TAU - y < search.tolerance {
            0.0
        } else {
            y
        }
    };
    Ok(PhaseOptimum {
        phi_las: wrap(pl),
        phi_int: wrap(pi),
        variance: best,
        flat,
        evaluations,
    })
}
