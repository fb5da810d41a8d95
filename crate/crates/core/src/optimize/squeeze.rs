use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{real_expectation, ModeLabel, OperatorPolynomial};
use crate::interferometer::{amplitude_for_ns, evaluate, max_r1, sample_scene, InterferometerConfig, SecondSqueeze};
use crate::numerics::golden_section;
use crate::sensitivity::{su11_limit_variance_variant, ClosedFormInput, ClosedFormVariant};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_r1: f64,
    pub best_alpha: f64,
    pub best_phi_las: f64,
    pub best_phi_int: f64,
    pub best_variance: f64,
    pub evaluations: usize,
}

/// Knobs of the first-squeezing search at fixed photon number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeSearch {
    pub m: u32,
    pub n_s: f64,
    pub r2: SecondSqueeze,
    pub eta_in: f64,
    pub eta_ex: f64,
    pub variant: ClosedFormVariant,
}

impl SqueezeSearch {
    pub fn new(m: u32, n_s: f64, r2: SecondSqueeze, eta_in: f64, eta_ex: f64) -> Self {
        SqueezeSearch {
            m,
            n_s,
            r2,
            eta_in,
            eta_ex,
            variant: ClosedFormVariant::Stable,
        }
    }

    /// Sensitivity at `r1` with the seed re-solved from the photon-number constraint.
    pub fn variance(&self, r1: f64) -> Result<f64> {
        match self.r2 {
            SecondSqueeze::Infinite => {
                let input = ClosedFormInput::on_constraint(self.m, self.n_s, r1, self.eta_in, self.eta_ex)?;
                su11_limit_variance_variant(&input, self.variant)
            }
            SecondSqueeze::Finite(r2) => {
                let config = InterferometerConfig::new(self.m, self.n_s, r1, r2).with_losses(self.eta_in, self.eta_ex);
                let report = evaluate(&config)?;
                Ok(if report.estimable {
                    report.variance_epsilon
                } else {
                    f64::INFINITY
                })
            }
        }
    }
}

const COARSE: usize = 64;
const DENSE: usize = 2048;

fn scan(search: &SqueezeSearch, hi: f64, points: usize) -> Result<Vec<(f64, f64)>> {
    (0..points)
        .map(|i| {
            let r1 = hi * i as f64 / (points - 1) as f64;
            Ok((r1, search.variance(r1)?))
        })
        .collect()
}

fn argmin(values: &[(f64, f64)]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if v.1 < values[best].1 {
            best = i;
        }
    }
    best
}

fn local_minima(values: &[(f64, f64)]) -> usize {
    let n = values.len();
    (0..n)
        .filter(|&i| {
            let left = i == 0 || values[i - 1].1 > values[i].1;
            let right = i == n - 1 || values[i + 1].1 >= values[i].1;
            left && right
        })
        .count()
}

/// Minimises the sensitivity over `r1 in [0, arcsinh sqrt(n_s)]` at the optimum phases.
///
/// A 64-point scan brackets the minimum before golden-section refinement to `1e-8`.
/// If the scan shows more than one local minimum the bracket comes from a 2048-point scan instead.
pub fn optimize_r1(search: &SqueezeSearch) -> Result<OptimizationResult> {
    if !(search.n_s > 0.0) || !search.n_s.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "n_s must be positive, got {}",
            search.n_s
        )));
    }
    let hi = max_r1(search.n_s);
    let mut points = scan(search, hi, COARSE)?;
    let mut evaluations = points.len();
    if local_minima(&points) > 1 {
        points = scan(search, hi, DENSE)?;
        evaluations += points.len();
    }
    let k = argmin(&points);
    let lo = points[k.saturating_sub(1)].0;
    let up = points[(k + 1).min(points.len() - 1)].0;
    let (r1, v, n) = golden_section(|r| search.variance(r), lo, up, 1e-8)?;
    evaluations += n;
    let (best_r1, best_variance) = if v <= points[k].1 { (r1, v) } else { points[k] };
    Ok(OptimizationResult {
        best_r1,
        best_alpha: amplitude_for_ns(search.n_s, best_r1, FRAC_PI_2)?,
        best_phi_las: FRAC_PI_2,
        best_phi_int: PI,
        best_variance,
        evaluations,
    })
}

/// [`optimize_r1`] in the infinite-gain limit.
pub fn optimize_r1_limit(m: u32, n_s: f64, eta_in: f64, eta_ex: f64) -> Result<OptimizationResult> {
    optimize_r1(&SqueezeSearch::new(m, n_s, SecondSqueeze::Infinite, eta_in, eta_ex))
}

/// Quadrature moments of the light at the sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleQuadratures {
    pub mean_p: f64,
    pub second_q: f64,
    pub mean_n: f64,
    /// `Var(p^2)` after the internal loss: the detected variance divided by
    /// `(e^{2 r2}/2)^2` once the second gain is large.
    pub noise_floor: f64,
}

/// Quadrature statistics at the sample for `n_s` photons with first squeezing `r1`.
pub fn sample_quadratures(n_s: f64, r1: f64, phi_las: f64, eta_in: f64) -> Result<SampleQuadratures> {
    let alpha = amplitude_for_ns(n_s, r1, phi_las)?;
    let scene = sample_scene(alpha, phi_las, r1, 1.0)?;
    let a = ModeLabel::SIGNAL;
    let p = OperatorPolynomial::momentum(a);
    let q = OperatorPolynomial::position(a);
    let mean_p = real_expectation(&scene, &p)?;
    let second_q = real_expectation(&scene, &q.pow(2))?;
    let mean_n = real_expectation(&scene, &OperatorPolynomial::number(a))?;
    let lossy = scene.apply_loss(eta_in)?;
    let p2 = real_expectation(&lossy, &p.pow(2))?;
    let p4 = real_expectation(&lossy, &p.pow(4))?;
    Ok(SampleQuadratures {
        mean_p,
        second_q,
        mean_n,
        noise_floor: p4 - p2 * p2,
    })
}

/// `<p>^2 / <q^2>` at the sample; equal to one for the states that saturate the optimal scaling.
pub fn optimal_state_condition(n_s: f64, r1: f64, phi_las: f64) -> Result<f64> {
    let s = sample_quadratures(n_s, r1, phi_las, 1.0)?;
    Ok(s.mean_p * s.mean_p / s.second_q)
}
