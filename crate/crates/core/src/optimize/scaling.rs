use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{linear_fit, logspace};
use crate::sensitivity::{strategy_variance, DetectionStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    /// `gamma` in `Var(eps) ~ n_s^{-gamma}`.
    pub exponent_gamma: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub ns_range: (f64, f64),
}

/// Nine points, log-spaced from `10^2` to `10^4`.
pub fn default_scaling_grid() -> Vec<f64> {
    logspace(1e2, 1e4, 9)
}

/// Fits `log Var(eps)` against `log n_s` for the optimised strategy.
pub fn scaling_exponent(m: u32, strategy: DetectionStrategy, eta_in: f64, ns_grid: &[f64]) -> Result<ScalingFit> {
    if ns_grid.len() < 6 {
        return Err(Error::DegenerateFit(format!(
            "need at least 6 photon numbers, got {}",
            ns_grid.len()
        )));
    }
    if ns_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::DegenerateFit(
            "photon numbers must be strictly increasing".into(),
        ));
    }
    if ns_grid[0] < 100.0 {
        return Err(Error::DegenerateFit(format!(
            "scaling is fitted in the asymptotic regime n_s >= 100, got {}",
            ns_grid[0]
        )));
    }
    let y: Vec<f64> = ns_grid
        .par_iter()
        .map(|&n| strategy_variance(m, n, strategy, eta_in).map(f64::ln))
        .collect::<Result<_>>()?;
    let x: Vec<f64> = ns_grid.iter().map(|n| n.ln()).collect();
    let (slope, intercept, r_squared) = linear_fit(&x, &y)?;
    Ok(ScalingFit {
        exponent_gamma: -slope,
        intercept,
        r_squared,
        ns_range: (ns_grid[0], ns_grid[ns_grid.len() - 1]),
    })
}
