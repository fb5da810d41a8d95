//! Closed-form sensitivities: the coherent baseline, its degradation by absorption
//! spread through the sample, and the infinite-gain interferometer limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interferometer::{amplitude_for_ns, check_order, SensitivityReport};
use crate::numerics::bisect;

fn check_transmission(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::TransmissionOutOfRange(eta));
    }
    if eta == 0.0 {
        return Err(Error::InvalidParameter("zero transmission leaves no signal".into()));
    }
    Ok(())
}

/// `1 / (eta_in eta_ex n_s^{2m-1})`: direct detection of a coherent probe.
pub fn coherent_variance(m: u32, n_s: f64, eta_in: f64, eta_ex: f64) -> Result<f64> {
    check_order(m)?;
    check_transmission(eta_in)?;
    check_transmission(eta_ex)?;
    if !(n_s > 0.0) || !n_s.is_finite() {
        return Err(Error::InvalidParameter(format!("n_s must be positive, got {n_s}")));
    }
    Ok(1.0 / (eta_in * eta_ex * n_s.powi(2 * m as i32 - 1)))
}

/// `((m-1) ln eta / (1 - eta^{m-1}))^2`, the penalty for single-photon loss spread
/// through the sample. Tends to 1 as `eta -> 1`.
pub fn spa_prefactor(m: u32, eta_in: f64) -> Result<f64> {
    check_order(m)?;
    if m == 1 {
        return Err(Error::UnsupportedOrder(m));
    }
    check_transmission(eta_in)?;
    let x = (m as f64 - 1.0) * eta_in.ln();
    if x == 0.0 {
        return Ok(1.0);
    }
    let ratio = x / -x.exp_m1();
    Ok(ratio * ratio)
}

/// Coherent probe with the internal loss spread uniformly through the absorbing sample.
pub fn coherent_variance_spa(m: u32, n_s: f64, eta_in: f64, eta_ex: f64) -> Result<f64> {
    Ok(spa_prefactor(m, eta_in)? * coherent_variance(m, n_s, eta_in, eta_ex)?)
}

/// Inputs of the infinite-gain formulas: seed amplitude and first-squeezer photon number
/// `n_r1 = sinh^2 r1`, at laser phase `pi/2` and interferometer phase `pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormInput {
    pub m: u32,
    pub alpha: f64,
    pub n_r1: f64,
    pub eta_in: f64,
    pub eta_ex: f64,
}

impl ClosedFormInput {
    /// Input on the sample-photon constraint for a given `r1`.
    pub fn on_constraint(m: u32, n_s: f64, r1: f64, eta_in: f64, eta_ex: f64) -> Result<Self> {
        let alpha = amplitude_for_ns(n_s, r1, std::f64::consts::FRAC_PI_2)?;
        Ok(ClosedFormInput {
            m,
            alpha,
            n_r1: r1.sinh().powi(2),
            eta_in,
            eta_ex,
        })
    }

    fn validate(&self) -> Result<()> {
        check_order(self.m)?;
        check_transmission(self.eta_in)?;
        if !(0.0..=1.0).contains(&self.eta_ex) {
            return Err(Error::TransmissionOutOfRange(self.eta_ex));
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 || !self.n_r1.is_finite() || self.n_r1 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha and n_r1 must be finite and non-negative, got {} and {}",
                self.alpha, self.n_r1
            )));
        }
        Ok(())
    }
}

/// Which transcription of the infinite-gain formulas to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormVariant {
    /// Rewritten in `e^{-2 r1}` and `alpha^2 e^{-2 r1}`; no cancellation at large `n_r1`.
    #[default]
    Stable,
    /// Term-by-term as printed in the original expansion in `n_r1` and `alpha`.
    Printed,
    /// [`ClosedFormVariant::Stable`] with the leading two-photon coefficient deliberately
    /// perturbed by 1%, for fault-injection runs of the validation suite.
    MutatedB2,
}

// Terms (power of beta^2, power of e^{-2 r1}, coefficient) of the bracket whose square
// is the denominator, for m = 1..4.
const B1: &[(i32, i32, f64)] = &[(0, 1, 1.0), (1, 0, 4.0)];
const B2: &[(i32, i32, f64)] = &[
    (0, 0, 0.25),
    (0, 1, -1.0),
    (0, 2, 0.75),
    (1, -1, 1.0),
    (1, 0, -4.0),
    (1, 1, 6.0),
    (2, 0, 4.0),
];
const B3: &[(i32, i32, f64)] = &[
    (0, -1, 3.0 / 16.0),
    (0, 0, -0.75),
    (0, 1, 15.0 / 8.0),
    (0, 2, -2.25),
    (0, 3, 15.0 / 16.0),
    (1, -2, 0.75),
    (1, -1, -3.0),
    (1, 0, 9.0),
    (1, 1, -18.0),
    (1, 2, 11.25),
    (2, -1, 2.0),
    (2, 0, -12.0),
    (2, 1, 15.0),
    (3, 0, 4.0),
];
const B4: &[(i32, i32, f64)] = &[
    (0, -2, 15.0 / 64.0),
    (0, -1, -9.0 / 8.0),
    (0, 0, 171.0 / 64.0),
    (0, 1, -5.25),
    (0, 2, 477.0 / 64.0),
    (0, 3, -45.0 / 8.0),
    (0, 4, 105.0 / 64.0),
    (1, -3, 15.0 / 16.0),
    (1, -2, -4.5),
    (1, -1, 99.0 / 8.0),
    (1, 0, -30.0),
    (1, 1, 999.0 / 16.0),
    (1, 2, -67.5),
    (1, 3, 26.25),
    (2, -2, 2.25),
    (2, -1, -12.0),
    (2, 0, 47.25),
    (2, 1, -90.0),
    (2, 2, 52.5),
    (3, -1, 3.0),
    (3, 0, -24.0),
    (3, 1, 28.0),
    (4, 0, 4.0),
];

fn bracket_terms(m: u32) -> &'static [(i32, i32, f64)] {
    match m {
        1 => B1,
        2 => B2,
        3 => B3,
        _ => B4,
    }
}

/// `Var(eps_m)` of the interferometer in the limit of infinite second gain.
/// External loss drops out entirely.
pub fn su11_limit_variance(input: &ClosedFormInput) -> Result<f64> {
    su11_limit_variance_variant(input, ClosedFormVariant::Stable)
}

pub fn su11_limit_variance_variant(input: &ClosedFormInput, variant: ClosedFormVariant) -> Result<f64> {
    input.validate()?;
    let value = match variant {
        ClosedFormVariant::Printed => printed(input),
        ClosedFormVariant::Stable | ClosedFormVariant::MutatedB2 => stable(input, variant),
    };
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "closed form is not a positive finite number ({value}) at {input:?}"
        )));
    }
    Ok(value)
}

fn stable(input: &ClosedFormInput, variant: ClosedFormVariant) -> f64 {
    let n = input.n_r1;
    let eta = input.eta_in;
    let e = 1.0 / ((n + 1.0).sqrt() + n.sqrt()).powi(2);
    let b2 = input.alpha * input.alpha * e;
    let sigma = eta * e + 1.0 - eta;
    let numerator = 2.0 * sigma * sigma + 16.0 * eta * b2 * sigma;
    let bracket: f64 = bracket_terms(input.m)
        .iter()
        .map(|&(i, k, c)| {
            let c = if variant == ClosedFormVariant::MutatedB2 && input.m == 2 && (i, k) == (2, 0) {
                c * 1.01
            } else {
                c
            };
            c * b2.powi(i) * e.powi(k)
        })
        .sum();
    numerator / (eta * eta * bracket * bracket)
}

fn printed(input: &ClosedFormInput) -> f64 {
    let n = input.n_r1;
    let a2 = input.alpha * input.alpha;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let a8 = a4 * a4;
    let eta = input.eta_in;
    let s1 = (n * n + n).sqrt();
    let s2 = (n.powi(4) + n.powi(3)).sqrt();
    let s3 = (n.powi(6) + n.powi(5)).sqrt();
    let s4 = (n.powi(8) + n.powi(7)).sqrt();
    let numerator = 8.0
        * eta
        * (2.0 * a2 + 2.0 * (8.0 * a2 + 1.0) * eta * (n * n - s2) - (4.0 * a2 * eta + 4.0 * a2 + 1.0) * s1
            + ((12.0 * a2 + 1.0) * eta + 4.0 * a2 + 1.0) * n)
        + 2.0;
    let bracket = match input.m {
        1 => (4.0 * a2 + 1.0) * (2.0 * n - 2.0 * s1 + 1.0),
        2 => {
            (4.0 * a2 + 3.0) * a2
                + (32.0 * a4 + 48.0 * a2 + 6.0) * (n * n - s2)
                + 4.0 * (8.0 * a4 + 10.0 * a2 + 1.0) * n
                - (16.0 * (a4 + a2) + 1.0) * s1
        }
        3 => {
            (4.0 * a2 + 5.0) * a4 - 2.0 * (12.0 * a4 + 23.0 * a2 + 6.0) * a2 * s1
                + 3.0 * (4.0 * a2 + 3.0) * (16.0 * a4 + 40.0 * a2 + 3.0) * n * n
                + (72.0 * a6 + 178.0 * a4 + 78.0 * a2 + 3.0) * n
                + 2.0 * (64.0 * a6 + 240.0 * a4 + 180.0 * a2 + 15.0) * (n.powi(3) - s3)
                - 4.0 * (32.0 * a6 + 96.0 * a4 + 54.0 * a2 + 3.0) * s2
        }
        _ => {
            (4.0 * a2 + 7.0) * a6 - (32.0 * a4 + 92.0 * a2 + 45.0) * a4 * s1
                + (128.0 * a6 + 488.0 * a4 + 414.0 * a2 + 63.0) * a2 * n
                + 2.0 * (256.0 * a8 + 1792.0 * a6 + 3360.0 * a4 + 1680.0 * a2 + 105.0) * (n.powi(4) - s4)
                + (640.0 * a8 + 3352.0 * a6 + 4458.0 * a4 + 1467.0 * a2 + 54.0) * n * n
                + 16.0 * (64.0 * a8 + 400.0 * a6 + 660.0 * a4 + 285.0 * a2 + 15.0) * n.powi(3)
                - 3.0 * (256.0 * a8 + 1536.0 * a6 + 2400.0 * a4 + 960.0 * a2 + 45.0) * s3
                - (320.0 * a8 + 1496.0 * a6 + 1698.0 * a4 + 432.0 * a2 + 9.0) * s2
        }
    };
    numerator / (eta * eta * bracket * bracket)
}

/// `eps_m / sqrt(Var eps_m)`.
pub fn snr(eps_m: f64, report: &SensitivityReport) -> f64 {
    eps_m / report.variance_epsilon.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectionStrategy {
    Coherent,
    /// Infinite-gain interferometer with the first squeezing optimised at each photon number.
    Su11Optimal,
}

/// Variance of the given strategy at `n_s`, lossless outside the sample.
pub fn strategy_variance(m: u32, n_s: f64, strategy: DetectionStrategy, eta_in: f64) -> Result<f64> {
    match strategy {
        DetectionStrategy::Coherent => coherent_variance(m, n_s, eta_in, 1.0),
        DetectionStrategy::Su11Optimal => Ok(crate::optimize::optimize_r1_limit(m, n_s, eta_in, 1.0)?.best_variance),
    }
}

/// Smallest sample photon number at which `eps_m` is resolved with unit signal-to-noise.
pub fn min_photons_for_detection(m: u32, eps_m: f64, strategy: DetectionStrategy, eta_in: f64) -> Result<f64> {
    if !(eps_m > 0.0) || !eps_m.is_finite() {
        return Err(Error::InvalidParameter(format!("eps_m must be positive, got {eps_m}")));
    }
    let target = eps_m * eps_m;
    let gap =
        |log_n: f64| -> Result<f64> { Ok((strategy_variance(m, 10f64.powf(log_n), strategy, eta_in)? / target).ln()) };
    let log_n = bisect(gap, -3.0, 12.0, 1e-13)?;
    Ok(10f64.powf(log_n))
}
