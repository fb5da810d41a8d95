//! Conversions between the dimensionless absorbance and laboratory quantities.
//!
//! Lengths are in centimetres, times in seconds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 value, exact by definition.
pub const AVOGADRO: f64 = 6.022_140_76e23;

/// Atomic field strength in V/m, used as a bare normalisation in [`estimate_epsilon_m`].
pub const ATOMIC_FIELD: f64 = 5.14e11;

const CM3_PER_LITRE: f64 = 1000.0;

/// Absorber concentration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Concentration {
    /// Molecules per cm^3.
    NumberDensity(f64),
    /// Moles per litre.
    Molar(f64),
}

impl Concentration {
    pub fn micromolar(c: f64) -> Self {
        Concentration::Molar(c * 1e-6)
    }

    /// Molecules per cm^3.
    pub fn number_density(self) -> f64 {
        match self {
            Concentration::NumberDensity(nu) => nu,
            Concentration::Molar(c) => c * AVOGADRO / CM3_PER_LITRE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionParams {
    /// cm^2 per molecule.
    pub sigma_e: f64,
    pub concentration: Concentration,
    /// cm.
    pub path_length: f64,
    /// s.
    pub pulse_duration: f64,
    /// cm^2.
    pub beam_area: f64,
    /// Photons per pulse.
    pub mean_photons: f64,
    /// Photons per cm^2 per s. Derived from the pulse when absent; checked against it when given.
    #[serde(default)]
    pub flux_density: Option<f64>,
}

impl CrossSectionParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sigma_e", self.sigma_e),
            ("path_length", self.path_length),
            ("pulse_duration", self.pulse_duration),
            ("beam_area", self.beam_area),
            ("mean_photons", self.mean_photons),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        let nu = self.concentration.number_density();
        if !(nu.is_finite() && nu >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "concentration must be non-negative, got {nu}"
            )));
        }
        if let Some(phi) = self.flux_density {
            let expect = self.mean_photons / (self.pulse_duration * self.beam_area);
            if !((phi - expect).abs() <= 1e-12 * expect) {
                return Err(Error::UnitMismatch(format!(
                    "flux density {phi} does not match photons/(T A) = {expect}"
                )));
            }
        }
        Ok(())
    }

    pub fn flux_density(&self) -> f64 {
        self.flux_density
            .unwrap_or(self.mean_photons / (self.pulse_duration * self.beam_area))
    }
}

/// Two-photon absorbance `sigma_e * nu * l`.
pub fn absorbance_from_cross_section(params: &CrossSectionParams) -> Result<f64> {
    params.validate()?;
    Ok(params.sigma_e * params.concentration.number_density() * params.path_length)
}

/// Inverse of [`absorbance_from_cross_section`] for a known density and path.
pub fn cross_section_from_absorbance(epsilon: f64, concentration: Concentration, path_length: f64) -> Result<f64> {
    let nu = concentration.number_density();
    if !(nu > 0.0 && path_length > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need positive density and path length, got {nu} and {path_length}"
        )));
    }
    Ok(epsilon / (nu * path_length))
}

/// Classical two-photon cross section `3 sigma_e T A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalCrossSection {
    pub cm4_s: f64,
}

impl ClassicalCrossSection {
    pub fn m4_s(&self) -> f64 {
        self.cm4_s * 1e-8
    }
}

pub fn classical_cross_section(sigma_e: f64, pulse_duration: f64, beam_area: f64) -> Result<ClassicalCrossSection> {
    for v in [sigma_e, pulse_duration, beam_area] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cross-section inputs must be non-negative, got {v}"
            )));
        }
    }
    Ok(ClassicalCrossSection {
        cm4_s: 3.0 * sigma_e * pulse_duration * beam_area,
    })
}

/// Order-of-magnitude guess, not a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub estimate: bool,
}

/// `(2m-1)!! <n>^m / E_at^(2m-2)` with the atomic field taken as a pure number.
pub fn estimate_epsilon_m(m: u32, mean_photons: f64) -> Result<Estimate> {
    if m == 0 {
        return Err(Error::UnsupportedOrder(m));
    }
    let double_factorial: f64 = (1..=m).map(|k| (2 * k - 1) as f64).product();
    let value = double_factorial * mean_photons.powi(m as i32) / ATOMIC_FIELD.powi(2 * m as i32 - 2);
    Ok(Estimate { value, estimate: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rhodamine() -> CrossSectionParams {
        CrossSectionParams {
            sigma_e: 4.2e-18,
            concentration: Concentration::micromolar(38.0),
            path_length: 0.1,
            pulse_duration: 1e-13,
            beam_area: 1e-6,
            mean_photons: 1e6,
            flux_density: None,
        }
    }

    #[test]
    fn dye_example_is_near_one_percent() {
        let eps = absorbance_from_cross_section(&rhodamine()).unwrap();
        assert!((0.9e-2..=1.1e-2).contains(&eps), "{eps}");
    }

    #[test]
    fn molar_conversion_by_hand() {
        // 10 uM = 1e-5 mol/L = 1e-8 mol/cm^3
        let p = CrossSectionParams {
            sigma_e: 1e-18,
            concentration: Concentration::micromolar(10.0),
            path_length: 1.0,
            ..rhodamine()
        };
        let expect = 1e-18 * 1e-8 * 6.022_140_76e23;
        assert!((absorbance_from_cross_section(&p).unwrap() / expect - 1.0).abs() < 1e-14);
    }

    #[test]
    fn empty_cell_is_transparent() {
        let p = CrossSectionParams {
            concentration: Concentration::NumberDensity(0.0),
            ..rhodamine()
        };
        assert_eq!(absorbance_from_cross_section(&p).unwrap(), 0.0);
    }

    #[test]
    fn inconsistent_flux_is_rejected() {
        let mut p = rhodamine();
        p.flux_density = Some(p.flux_density() * 1.001);
        assert!(matches!(p.validate(), Err(Error::UnitMismatch(_))));
    }

    #[test]
    fn classical_cross_section_product() {
        let d = classical_cross_section(4.2e-18, 1e-13, 1e-6).unwrap();
        assert!((d.cm4_s / 1.26e-36 - 1.0).abs() < 1e-12);
        assert_eq!(classical_cross_section(4.2e-18, 0.0, 1e-6).unwrap().cm4_s, 0.0);
    }

    #[test]
    fn estimates() {
        assert_eq!(estimate_epsilon_m(1, 7.0).unwrap().value, 7.0);
        let two = estimate_epsilon_m(2, 7.0).unwrap().value;
        assert!((two / (3.0 * 49.0 / ATOMIC_FIELD.powi(2)) - 1.0).abs() < 1e-14);
        assert!(estimate_epsilon_m(3, 7.0).unwrap().value < two);
    }
}
