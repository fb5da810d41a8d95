use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the coherent seed is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Drive {
    /// Seed amplitude before the first amplifier.
    #[serde(rename = "alpha")]
    Alpha(f64),
    /// Mean photon number required at the sample; the amplitude is solved for.
    #[serde(rename = "n_s")]
    PhotonsAtSample(f64),
}

/// Gain of the second amplifier, possibly the analytic infinite-gain limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawSqueeze", into = "RawSqueeze")]
pub enum SecondSqueeze {
    Finite(f64),
    Infinite,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawSqueeze {
    Number(f64),
    Tag(InfiniteTag),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum InfiniteTag {
    Infinite,
}

impl From<RawSqueeze> for SecondSqueeze {
    fn from(raw: RawSqueeze) -> Self {
        match raw {
            RawSqueeze::Number(r) => SecondSqueeze::Finite(r),
            RawSqueeze::Tag(InfiniteTag::Infinite) => SecondSqueeze::Infinite,
        }
    }
}

impl From<SecondSqueeze> for RawSqueeze {
    fn from(s: SecondSqueeze) -> Self {
        match s {
            SecondSqueeze::Finite(r) => RawSqueeze::Number(r),
            SecondSqueeze::Infinite => RawSqueeze::Tag(InfiniteTag::Infinite),
        }
    }
}

impl SecondSqueeze {
    pub fn finite(self) -> Result<f64> {
        match self {
            SecondSqueeze::Finite(r) => Ok(r),
            SecondSqueeze::Infinite => Err(Error::InfiniteR2),
        }
    }
}

/// First-order treatment of the absorbing sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MpaModel {
    /// The sample replaces its input operator by `a - (eps/2) a^dagger^{m-1} a^m`
    /// and the detected number is rebuilt from that operator. The large-gain
    /// closed forms in [`crate::sensitivity`] are exact limits of this model.
    #[default]
    HeisenbergSubstitution,
    /// Exact first-order master-equation action on the detected number operator.
    AdjointLindblad,
}

/// Every physical knob of the seeded two-amplifier interferometer.
/// The first amplifier's phase is fixed to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferometerConfig {
    pub m: u32,
    pub r1: f64,
    pub r2: SecondSqueeze,
    pub phi_las: f64,
    pub phi_int: f64,
    pub eta_in: f64,
    pub eta_ex: f64,
    pub drive: Drive,
    #[serde(default)]
    pub model: MpaModel,
}

impl InterferometerConfig {
    /// Lossless configuration at the conventional optimum phases
    /// (`phi_las = pi/2`, `phi_int = pi`).
    pub fn new(m: u32, n_s: f64, r1: f64, r2: f64) -> Self {
        InterferometerConfig {
            m,
            r1,
            r2: SecondSqueeze::Finite(r2),
            phi_las: std::f64::consts::FRAC_PI_2,
            phi_int: std::f64::consts::PI,
            eta_in: 1.0,
            eta_ex: 1.0,
            drive: Drive::PhotonsAtSample(n_s),
            model: MpaModel::default(),
        }
    }

    /// Plain coherent probe: no squeezing anywhere.
    pub fn coherent(m: u32, n_s: f64) -> Self {
        Self::new(m, n_s, 0.0, 0.0)
    }

    pub fn with_losses(mut self, eta_in: f64, eta_ex: f64) -> Self {
        self.eta_in = eta_in;
        self.eta_ex = eta_ex;
        self
    }

    pub fn with_phases(mut self, phi_las: f64, phi_int: f64) -> Self {
        self.phi_las = phi_las;
        self.phi_int = phi_int;
        self
    }

    pub fn with_model(mut self, model: MpaModel) -> Self {
        self.model = model;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_order(self.m)?;
        if !self.r1.is_finite() || self.r1 < 0.0 {
            return Err(Error::InvalidSqueeze(self.r1));
        }
        if let SecondSqueeze::Finite(r2) = self.r2 {
            if !r2.is_finite() || r2 < 0.0 {
                return Err(Error::InvalidSqueeze(r2));
            }
        }
        for eta in [self.eta_in, self.eta_ex] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::TransmissionOutOfRange(eta));
            }
        }
        if !self.phi_las.is_finite() || !self.phi_int.is_finite() {
            return Err(Error::InvalidParameter("phases must be finite".into()));
        }
        match self.drive {
            Drive::Alpha(a) if !a.is_finite() || a < 0.0 => Err(Error::InvalidParameter(format!(
                "alpha must be finite and non-negative, got {a}"
            ))),
            Drive::PhotonsAtSample(n) if !n.is_finite() || n <= 0.0 => Err(Error::InvalidParameter(format!(
                "n_s must be finite and positive, got {n}"
            ))),
            _ => Ok(()),
        }
    }

    /// Seed amplitude, solving the sample-photon constraint when needed.
    pub fn alpha(&self) -> Result<f64> {
        self.validate()?;
        match self.drive {
            Drive::Alpha(a) => Ok(a),
            Drive::PhotonsAtSample(n) => amplitude_for_ns(n, self.r1, self.phi_las),
        }
    }

    /// Mean photon number arriving at the sample.
    pub fn n_at_sample(&self) -> Result<f64> {
        match self.drive {
            Drive::PhotonsAtSample(n) => {
                self.alpha()?;
                Ok(n)
            }
            Drive::Alpha(a) => Ok(photons_at_sample(self.r1, a, self.phi_las)),
        }
    }
}

pub(crate) fn check_order(m: u32) -> Result<()> {
    if (1..=4).contains(&m) {
        Ok(())
    } else {
        Err(Error::UnsupportedOrder(m))
    }
}

/// Mean photon number after the seed is squeezed by `r1` with laser phase `phi_las`.
pub fn photons_at_sample(r1: f64, alpha: f64, phi_las: f64) -> f64 {
    alpha * alpha * quadrature_factor(r1, phi_las) + r1.sinh().powi(2)
}

// sinh(2r) cos(2phi) + cosh(2r), written without cancellation at phi = pi/2.
fn quadrature_factor(r1: f64, phi_las: f64) -> f64 {
    (2.0 * r1).exp() * phi_las.cos().powi(2) + (-2.0 * r1).exp() * phi_las.sin().powi(2)
}

/// Largest first-squeezing gain compatible with `n_s` photons at the sample.
pub fn max_r1(n_s: f64) -> f64 {
    n_s.sqrt().asinh()
}

/// Seed amplitude that puts `n_s` photons on the sample for the given `r1` and laser phase.
pub fn amplitude_for_ns(n_s: f64, r1: f64, phi_las: f64) -> Result<f64> {
    if !n_s.is_finite() || n_s <= 0.0 {
        return Err(Error::InvalidParameter(format!("n_s must be positive, got {n_s}")));
    }
    if !r1.is_finite() || r1 < 0.0 {
        return Err(Error::InvalidSqueeze(r1));
    }
    let limit = max_r1(n_s);
    if r1 > limit * (1.0 + 1e-12) {
        return Err(Error::InfeasibleSqueeze { r1, n_s, limit });
    }
    let factor = quadrature_factor(r1, phi_las);
    let coherent_part = (n_s - r1.sinh().powi(2)).max(0.0);
    if coherent_part == 0.0 {
        return Ok(0.0);
    }
    if !(factor > 0.0) {
        return Err(Error::DegenerateQuadrature { n_s, phi_las, factor });
    }
    Ok((coherent_part / factor).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn constraint_examples() {
        assert!((photons_at_sample(0.0, 15f64.sqrt(), 0.7) - 15.0).abs() < 1e-12);
        assert!((photons_at_sample(max_r1(15.0), 0.0, 0.0) - 15.0).abs() < 1e-12);
        let expect = (-1f64).exp() + (1f64.cosh() - 1.0) / 2.0;
        assert!((photons_at_sample(0.5, 1.0, FRAC_PI_2) - expect).abs() < 1e-15);
    }

    #[test]
    fn amplitude_round_trip() {
        assert!((amplitude_for_ns(15.0, 0.0, FRAC_PI_2).unwrap() - 15f64.sqrt()).abs() < 1e-14);
        assert_eq!(amplitude_for_ns(15.0, max_r1(15.0), FRAC_PI_2).unwrap(), 0.0);
        let a = amplitude_for_ns(15.0, 0.939, FRAC_PI_2).unwrap();
        assert!((photons_at_sample(0.939, a, FRAC_PI_2) - 15.0).abs() < 1e-12);
    }

    #[test]
    fn amplitude_errors() {
        assert!(matches!(
            amplitude_for_ns(1.0, 3.0, FRAC_PI_2),
            Err(Error::InfeasibleSqueeze { .. })
        ));
        // The quadrature factor is at least e^{-2 r1}; only a non-finite phase degenerates it.
        assert!(amplitude_for_ns(15.0, 0.5, f64::NAN).is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let mut c = InterferometerConfig::new(2, 15.0, 0.939, 1.447);
        c.r2 = SecondSqueeze::Infinite;
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"infinite\""));
        let back: InterferometerConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        let c2: InterferometerConfig = serde_json::from_str(
            r#"{"m":1,"r1":0,"r2":0.5,"phi_las":0,"phi_int":0,"eta_in":1,"eta_ex":1,"drive":{"alpha":2}}"#,
        )
        .unwrap();
        assert_eq!(c2.r2, SecondSqueeze::Finite(0.5));
        assert_eq!(c2.drive, Drive::Alpha(2.0));
        assert_eq!(c2.model, MpaModel::HeisenbergSubstitution);
    }
}
