use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Index of a bosonic mode: 0 is the signal, 1.. are loss ancillas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeLabel(pub usize);

impl ModeLabel {
    pub const SIGNAL: ModeLabel = ModeLabel(0);

    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for ModeLabel {
    fn from(index: usize) -> Self {
        ModeLabel(index)
    }
}

/// An operator that is affine in the initial vacuum modes,
/// `b = sum_j (u_j a_j + v_j a_j^dagger) + d`.
///
/// Each entry of `coeffs` is the pair `(u_j, v_j)` for vacuum mode `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    coeffs: Vec<(Complex64, Complex64)>,
    displacement: Complex64,
}

impl LinearMap {
    /// The bare annihilator of vacuum mode `j` within a space of `modes` vacuum modes.
    pub fn vacuum_mode(j: usize, modes: usize) -> Self {
        assert!(j < modes, "vacuum mode {j} out of range for {modes} modes");
        let mut coeffs = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); modes];
        coeffs[j].0 = Complex64::new(1.0, 0.0);
        LinearMap {
            coeffs,
            displacement: Complex64::new(0.0, 0.0),
        }
    }

    pub fn from_parts(coeffs: Vec<(Complex64, Complex64)>, displacement: Complex64) -> Self {
        LinearMap { coeffs, displacement }
    }

    pub fn coefficients(&self) -> &[(Complex64, Complex64)] {
        &self.coeffs
    }

    pub fn displacement(&self) -> Complex64 {
        self.displacement
    }

    pub fn vacuum_modes(&self) -> usize {
        self.coeffs.len()
    }

    /// `sum_j |u_j|^2 - |v_j|^2`, which equals `[b, b^dagger]` and is 1 for a bosonic mode.
    pub fn commutator(&self) -> f64 {
        self.coeffs.iter().map(|(u, v)| u.norm_sqr() - v.norm_sqr()).sum()
    }

    /// Coefficients of the hermitian conjugate `b^dagger`, written in the same
    /// `(u_j, v_j)` layout: `b^dagger = sum_j (v_j^* a_j + u_j^* a_j^dagger) + d^*`.
    pub fn adjoint(&self) -> LinearMap {
        LinearMap {
            coeffs: self.coeffs.iter().map(|(u, v)| (v.conj(), u.conj())).collect(),
            displacement: self.displacement.conj(),
        }
    }

    pub(crate) fn padded(&self, modes: usize) -> LinearMap {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(modes, (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
        LinearMap {
            coeffs,
            displacement: self.displacement,
        }
    }

    /// `x * self + y * self^dagger`, the general Bogoliubov mixing of a map with its conjugate.
    pub(crate) fn mix_with_adjoint(&self, x: Complex64, y: Complex64) -> LinearMap {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(u, v)| (x * u + y * v.conj(), x * v + y * u.conj()))
            .collect();
        LinearMap {
            coeffs,
            displacement: x * self.displacement + y * self.displacement.conj(),
        }
    }

    pub(crate) fn shifted(&self, by: Complex64) -> LinearMap {
        LinearMap {
            coeffs: self.coeffs.clone(),
            displacement: self.displacement + by,
        }
    }

    pub(crate) fn scaled_plus(&self, scale: f64, other: &LinearMap, other_scale: f64) -> LinearMap {
        let modes = self.coeffs.len().max(other.coeffs.len());
        let a = self.padded(modes);
        let b = other.padded(modes);
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|((u1, v1), (u2, v2))| (u1 * scale + u2 * other_scale, v1 * scale + v2 * other_scale))
            .collect();
        LinearMap {
            coeffs,
            displacement: a.displacement * scale + b.displacement * other_scale,
        }
    }

    /// Substitutes every vacuum mode `j` of `self` by `inner[j]`.
    ///
    /// If `self` expresses an operator in terms of modes `b_j` and `inner[j]`
    /// expresses `b_j` in terms of deeper modes, the result expresses the
    /// operator in terms of those deeper modes.
    pub fn compose(&self, inner: &[LinearMap]) -> LinearMap {
        assert_eq!(
            inner.len(),
            self.coeffs.len(),
            "composition needs one inner map per vacuum mode"
        );
        let modes = inner.iter().map(LinearMap::vacuum_modes).max().unwrap_or(0);
        let mut out = LinearMap {
            coeffs: vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); modes],
            displacement: self.displacement,
        };
        for ((u, v), b) in self.coeffs.iter().zip(inner) {
            let b = b.padded(modes);
            let term = b.mix_with_adjoint(*u, *v);
            for (acc, add) in out.coeffs.iter_mut().zip(term.coeffs) {
                acc.0 += add.0;
                acc.1 += add.1;
            }
            out.displacement += term.displacement;
        }
        out
    }
}
