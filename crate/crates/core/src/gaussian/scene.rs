use num_complex::Complex64;

use super::map::{LinearMap, ModeLabel};
use crate::error::{Error, Result};

/// Squeezing above this is rejected: `e^{2r}` is then close to the largest
/// exactly representable integer in a double.
pub const DEFAULT_SQUEEZE_GUARD: f64 = 20.0;

/// Heisenberg-picture operators of every physical mode, each written over the
/// initial vacuum modes. Physical mode 0 is the signal; every loss stage appends
/// one ancilla mode holding the reflected port of its beam splitter.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianScene {
    maps: Vec<LinearMap>,
    vacuum_modes: usize,
}

impl Default for GaussianScene {
    fn default() -> Self {
        Self::vacuum()
    }
}

impl GaussianScene {
    /// A single signal mode in vacuum.
    pub fn vacuum() -> Self {
        Self::identity(1)
    }

    /// `modes` physical modes, each equal to its own vacuum input.
    pub fn identity(modes: usize) -> Self {
        assert!(modes > 0, "a scene needs at least the signal mode");
        GaussianScene {
            maps: (0..modes).map(|j| LinearMap::vacuum_mode(j, modes)).collect(),
            vacuum_modes: modes,
        }
    }

    /// Builds a scene from explicit maps, padding them to a common vacuum space.
    pub fn from_maps(maps: Vec<LinearMap>) -> Self {
        assert!(!maps.is_empty(), "a scene needs at least the signal mode");
        let vacuum_modes = maps.iter().map(LinearMap::vacuum_modes).max().unwrap_or(1);
        GaussianScene {
            maps: maps.iter().map(|m| m.padded(vacuum_modes)).collect(),
            vacuum_modes,
        }
    }

    pub fn mode_count(&self) -> usize {
        self.maps.len()
    }

    pub fn vacuum_modes(&self) -> usize {
        self.vacuum_modes
    }

    pub fn signal(&self) -> &LinearMap {
        &self.maps[0]
    }

    pub fn maps(&self) -> &[LinearMap] {
        &self.maps
    }

    pub fn map(&self, mode: ModeLabel) -> Result<&LinearMap> {
        self.maps.get(mode.0).ok_or(Error::UnknownMode {
            mode: mode.0,
            modes: self.maps.len(),
        })
    }

    /// Adds `amplitude * e^{i phase}` to the signal operator.
    pub fn apply_displacement(&self, amplitude: f64, phase: f64) -> GaussianScene {
        let mut out = self.clone();
        out.maps[0] = self.maps[0].shifted(Complex64::from_polar(amplitude, phase));
        out
    }

    /// `a -> cosh r a + sinh r e^{i phase} a^dagger` on the signal, with the default guard.
    pub fn apply_squeeze(&self, r: f64, phase: f64) -> Result<GaussianScene> {
        self.apply_squeeze_guarded(r, phase, DEFAULT_SQUEEZE_GUARD)
    }

    pub fn apply_squeeze_guarded(&self, r: f64, phase: f64, limit: f64) -> Result<GaussianScene> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidSqueeze(r));
        }
        if r > limit {
            return Err(Error::SqueezeOverflow { r, limit });
        }
        if r == 0.0 {
            return Ok(self.clone());
        }
        let mut out = self.clone();
        out.maps[0] =
            self.maps[0].mix_with_adjoint(Complex64::new(r.cosh(), 0.0), Complex64::from_polar(r.sinh(), phase));
        Ok(out)
    }

    /// Beam splitter with transmission `eta` against a fresh vacuum ancilla.
    pub fn apply_loss(&self, eta: f64) -> Result<GaussianScene> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::TransmissionOutOfRange(eta));
        }
        let modes = self.vacuum_modes + 1;
        let fresh = LinearMap::vacuum_mode(modes - 1, modes);
        let signal = self.maps[0].padded(modes);
        let t = eta.sqrt();
        let rho = (1.0 - eta).sqrt();
        let mut maps: Vec<LinearMap> = self.maps.iter().map(|m| m.padded(modes)).collect();
        maps[0] = signal.scaled_plus(t, &fresh, rho);
        maps.push(fresh.scaled_plus(t, &signal, -rho));
        Ok(GaussianScene {
            maps,
            vacuum_modes: modes,
        })
    }

    /// Appends `extra` physical modes, each a new untouched vacuum input.
    pub fn with_fresh_vacua(&self, extra: usize) -> GaussianScene {
        let modes = self.vacuum_modes + extra;
        let mut maps: Vec<LinearMap> = self.maps.iter().map(|m| m.padded(modes)).collect();
        for j in self.vacuum_modes..modes {
            maps.push(LinearMap::vacuum_mode(j, modes));
        }
        GaussianScene {
            maps,
            vacuum_modes: modes,
        }
    }

    /// Runs `later` on top of `self`: `later` must be written over exactly
    /// `self.mode_count()` vacuum modes plus any number of its own fresh vacua.
    /// Those fresh vacua become new vacuum modes of the result.
    pub fn then(&self, later: &GaussianScene) -> GaussianScene {
        assert!(
            later.vacuum_modes >= self.maps.len(),
            "later stage must be written over this scene's modes"
        );
        let frame = self.with_fresh_vacua(later.vacuum_modes - self.maps.len());
        GaussianScene::from_maps(later.maps.iter().map(|m| m.compose(frame.maps())).collect())
    }

    /// Largest deviation of any physical mode's commutator from 1.
    pub fn commutator_defect(&self) -> f64 {
        self.maps
            .iter()
            .map(|m| (m.commutator() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}
