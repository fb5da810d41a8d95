use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::{check_order, InterferometerConfig, MpaModel};
use crate::error::{Error, Result};
use crate::gaussian::{real_expectation, GaussianScene, LinearMap, ModeLabel, OperatorPolynomial};
use crate::numerics::integrate_unit;

/// Detector statistics and the resulting absorbance uncertainty for one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub mean_n: f64,
    pub var_n: f64,
    /// `d<n>/d eps_m` at `eps_m = 0`.
    pub signal_derivative: f64,
    /// `var_n / signal_derivative^2`; infinite when the signal does not respond.
    pub variance_epsilon: f64,
    pub n_at_sample: f64,
    pub estimable: bool,
}

impl SensitivityReport {
    pub fn from_moments(mean_n: f64, var_n: f64, signal_derivative: f64, n_at_sample: f64) -> Self {
        let var_n = var_n.max(0.0);
        let estimable = signal_derivative != 0.0 && signal_derivative.is_finite();
        let variance_epsilon = if estimable {
            var_n / (signal_derivative * signal_derivative)
        } else {
            f64::INFINITY
        };
        SensitivityReport {
            mean_n,
            var_n,
            signal_derivative,
            variance_epsilon,
            n_at_sample,
            estimable,
        }
    }
}

/// Single-photon absorption inside the sample, in addition to the m-photon process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaConfig {
    pub epsilon_s: f64,
    pub quadrature_order: usize,
}

impl Default for SpaConfig {
    fn default() -> Self {
        SpaConfig {
            epsilon_s: 0.0,
            quadrature_order: 16,
        }
    }
}

impl SpaConfig {
    pub fn new(epsilon_s: f64) -> Self {
        SpaConfig {
            epsilon_s,
            ..Default::default()
        }
    }

    /// Absorbance giving a total sample transmission `eta`.
    pub fn from_transmission(eta: f64) -> Self {
        Self::new(-eta.ln() / 2.0)
    }

    pub fn transmission(&self) -> f64 {
        (-2.0 * self.epsilon_s).exp()
    }
}

/// Action of the adjoint m-photon absorption generator on `poly`, taken on the signal mode:
/// `(2 a^dagger^m X a^m - a^dagger^m a^m X - X a^dagger^m a^m) / (2m)`.
pub fn mpa_adjoint(poly: &OperatorPolynomial, m: u32) -> Result<OperatorPolynomial> {
    mpa_adjoint_on(poly, m, ModeLabel::SIGNAL)
}

pub fn mpa_adjoint_on(poly: &OperatorPolynomial, m: u32, mode: ModeLabel) -> Result<OperatorPolynomial> {
    check_order(m)?;
    let m = m as usize;
    let up = OperatorPolynomial::normal_power(mode, m, 0);
    let down = OperatorPolynomial::normal_power(mode, 0, m);
    let both = OperatorPolynomial::normal_power(mode, m, m);
    let out = up * poly.clone() * down * 2.0 - both.clone() * poly.clone() - poly.clone() * both;
    Ok((out * (1.0 / (2.0 * m as f64))).normal_ordered())
}

/// Linear polynomial `sum_j (u_j a_j + v_j a_j^dagger) + d` with `a_j` the physical modes of a frame.
pub fn linear_polynomial(map: &LinearMap) -> OperatorPolynomial {
    let mut out = OperatorPolynomial::constant(map.displacement());
    for (j, &(u, v)) in map.coefficients().iter().enumerate() {
        if u != Complex64::new(0.0, 0.0) {
            out = out + OperatorPolynomial::annihilate(ModeLabel(j)) * u;
        }
        if v != Complex64::new(0.0, 0.0) {
            out = out + OperatorPolynomial::create(ModeLabel(j)) * v;
        }
    }
    out
}

/// State at the sample: seed displaced, squeezed by `r1`, then attenuated by `eta_before`.
pub fn sample_scene(alpha: f64, phi_las: f64, r1: f64, eta_before: f64) -> Result<GaussianScene> {
    let scene = GaussianScene::vacuum()
        .apply_displacement(alpha, phi_las)
        .apply_squeeze(r1, 0.0)?;
    if eta_before < 1.0 {
        scene.apply_loss(eta_before)
    } else {
        Ok(scene)
    }
}

/// Everything after the sample, written over the sample-plane modes.
pub fn downstream_scene(sample_modes: usize, eta_in: f64, r2: f64, phi_int: f64, eta_ex: f64) -> Result<GaussianScene> {
    GaussianScene::identity(sample_modes)
        .apply_loss(eta_in)?
        .apply_squeeze(r2, phi_int)?
        .apply_loss(eta_ex)
}

/// `d<n>/d eps_m` at zero absorbance for a sample sitting between two stages.
pub fn signal_derivative(sample: &GaussianScene, downstream: &GaussianScene, m: u32, model: MpaModel) -> Result<f64> {
    let frame = sample.with_fresh_vacua(downstream.vacuum_modes() - sample.mode_count());
    let out = downstream.signal();
    let a_out = linear_polynomial(out);
    let poly = match model {
        MpaModel::HeisenbergSubstitution => {
            let delta = mpa_adjoint(&OperatorPolynomial::annihilate(ModeLabel::SIGNAL), m)?;
            let (u, v) = out.coefficients()[0];
            let shift = delta.clone() * u + delta.adjoint() * v;
            shift.adjoint() * a_out.clone() + a_out.adjoint() * shift
        }
        MpaModel::AdjointLindblad => mpa_adjoint(&(a_out.adjoint() * a_out), m)?,
    };
    real_expectation(&frame, &poly)
}

/// `(<n>, Var n)` of the signal mode.
pub fn number_moments(scene: &GaussianScene) -> Result<(f64, f64)> {
    let n = OperatorPolynomial::number(ModeLabel::SIGNAL);
    let mean = real_expectation(scene, &n)?;
    let second = real_expectation(scene, &(n.clone() * n))?;
    Ok((mean, second - mean * mean))
}

struct Stages {
    sample: GaussianScene,
    downstream: GaussianScene,
}

impl Stages {
    fn build(config: &InterferometerConfig, alpha: f64, eta_before: f64, eta_after: f64) -> Result<Self> {
        let r2 = config.r2.finite()?;
        let sample = sample_scene(alpha, config.phi_las, config.r1, eta_before)?;
        let downstream = downstream_scene(sample.mode_count(), eta_after, r2, config.phi_int, config.eta_ex)?;
        Ok(Stages { sample, downstream })
    }

    fn detector(&self) -> GaussianScene {
        self.sample.then(&self.downstream)
    }
}

/// Detector statistics and absorbance sensitivity of a finite-gain configuration.
pub fn evaluate(config: &InterferometerConfig) -> Result<SensitivityReport> {
    config.validate()?;
    let alpha = config.alpha()?;
    let stages = Stages::build(config, alpha, 1.0, config.eta_in)?;
    let (mean, var) = number_moments(&stages.detector())?;
    let deriv = signal_derivative(&stages.sample, &stages.downstream, config.m, config.model)?;
    Ok(SensitivityReport::from_moments(mean, var, deriv, config.n_at_sample()?))
}

/// Like [`evaluate`], but the internal loss is single-photon absorption spread through
/// the sample itself. `config.eta_in` is ignored; the sample transmission is `e^{-2 eps_s}`.
pub fn evaluate_with_spa(config: &InterferometerConfig, spa: &SpaConfig) -> Result<SensitivityReport> {
    config.validate()?;
    if !spa.epsilon_s.is_finite() || spa.epsilon_s < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon_s must be finite and non-negative, got {}",
            spa.epsilon_s
        )));
    }
    if spa.quadrature_order < 4 {
        return Err(Error::InvalidParameter(format!(
            "quadrature order must be at least 4, got {}",
            spa.quadrature_order
        )));
    }
    let mut lossless = *config;
    lossless.eta_in = 1.0;
    if spa.epsilon_s == 0.0 {
        return evaluate(&lossless);
    }
    let alpha = config.alpha()?;
    let eps = spa.epsilon_s;
    let total = Stages::build(config, alpha, 1.0, spa.transmission())?;
    let (mean, var) = number_moments(&total.detector())?;

    let slice = |k: f64| -> Result<f64> {
        let stages = Stages::build(config, alpha, (-2.0 * k * eps).exp(), (-2.0 * (1.0 - k) * eps).exp())?;
        signal_derivative(&stages.sample, &stages.downstream, config.m, config.model)
    };
    let low = spa.quadrature_order;
    let high = 2 * low;
    let coarse = integrate_unit(low, slice)?;
    let fine = integrate_unit(high, slice)?;
    let drift = ((fine - coarse) / fine).abs();
    if !(drift < 1e-8) {
        return Err(Error::QuadratureNonConvergence { low, high, drift });
    }
    Ok(SensitivityReport::from_moments(mean, var, fine, config.n_at_sample()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjoint_examples() {
        let id = OperatorPolynomial::identity();
        for m in 1..=4 {
            assert!(mpa_adjoint(&id, m).unwrap().is_zero());
            let n = OperatorPolynomial::number(ModeLabel::SIGNAL);
            let expect = -OperatorPolynomial::normal_power(ModeLabel::SIGNAL, m as usize, m as usize);
            assert!(mpa_adjoint(&n, m).unwrap().approx_eq(&expect, 1e-14));
            let a = OperatorPolynomial::annihilate(ModeLabel::SIGNAL);
            let expect = OperatorPolynomial::normal_power(ModeLabel::SIGNAL, m as usize - 1, m as usize) * -0.5;
            assert!(mpa_adjoint(&a, m).unwrap().approx_eq(&expect, 1e-14));
        }
        assert!(matches!(mpa_adjoint(&id, 5), Err(Error::UnsupportedOrder(5))));
    }

    #[test]
    fn coherent_beer_lambert() {
        let r = evaluate(&InterferometerConfig::coherent(1, 7.0)).unwrap();
        assert!((r.signal_derivative + 7.0).abs() < 1e-12);
        assert!((r.var_n - 7.0).abs() < 1e-12);
        assert!((r.variance_epsilon - 1.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn models_agree_without_second_squeezer() {
        let c = InterferometerConfig::new(3, 2.5, 0.4, 0.0).with_losses(0.8, 0.7);
        let a = evaluate(&c).unwrap();
        let b = evaluate(&c.with_model(MpaModel::AdjointLindblad)).unwrap();
        assert!((a.signal_derivative - b.signal_derivative).abs() < 1e-12 * a.signal_derivative.abs());
    }

    #[test]
    fn infinite_gain_is_rejected() {
        let mut c = InterferometerConfig::new(2, 15.0, 0.9, 1.0);
        c.r2 = super::super::config::SecondSqueeze::Infinite;
        assert!(matches!(evaluate(&c), Err(Error::InfiniteR2)));
    }
}
