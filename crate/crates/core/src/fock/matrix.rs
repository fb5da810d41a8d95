use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// How far the number basis may grow and how little population may sit at its edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Bound on the population of the top five number states.
    pub tail_tolerance: f64,
    pub max_dim: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            tail_tolerance: 1e-10,
            max_dim: 400,
        }
    }
}

/// Density matrix in the number basis `|0>, ..., |dim - 1>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    rho: Array2<Complex64>,
}

impl FockDensityMatrix {
    pub fn from_matrix(rho: Array2<Complex64>) -> Self {
        assert_eq!(rho.nrows(), rho.ncols(), "density matrix must be square");
        FockDensityMatrix { rho }
    }

    pub fn from_pure(psi: &Array1<Complex64>) -> Self {
        let n = psi.len();
        let rho = Array2::from_shape_fn((n, n), |(i, j)| psi[i] * psi[j].conj());
        FockDensityMatrix { rho }
    }

    pub fn number_state(k: usize, dim: usize) -> Self {
        let mut rho = Array2::zeros((dim, dim));
        rho[(k, k)] = ONE;
        FockDensityMatrix { rho }
    }

    pub fn vacuum(dim: usize) -> Self {
        Self::number_state(0, dim)
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.rho
    }

    pub fn into_matrix(self) -> Array2<Complex64> {
        self.rho
    }

    pub fn populations(&self) -> Vec<f64> {
        self.rho.diag().iter().map(|c| c.re).collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.diag().sum()
    }

    /// Population of the top `width` number states.
    pub fn tail_population(&self, width: usize) -> f64 {
        let n = self.dim();
        self.rho.diag().iter().skip(n.saturating_sub(width)).map(|c| c.re).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..=i {
                worst = worst.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// True when `rho + tol * I` has a Cholesky factorisation, i.e. every eigenvalue exceeds `-tol`.
    pub fn is_positive(&self, tol: f64) -> bool {
        let n = self.dim();
        let mut l: Array2<Complex64> = Array2::zeros((n, n));
        for j in 0..n {
            let mut d = self.rho[(j, j)].re + tol;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) {
                return false;
            }
            let d = d.sqrt();
            l[(j, j)] = Complex64::new(d, 0.0);
            for i in j + 1..n {
                let mut s = self.rho[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / d;
            }
        }
        true
    }

    /// `<psi| rho |psi>`, the fidelity with a pure target.
    pub fn fidelity_with_pure(&self, psi: &Array1<Complex64>) -> f64 {
        let n = self.dim().min(psi.len());
        let mut f = ZERO;
        for i in 0..n {
            for j in 0..n {
                f += psi[i].conj() * self.rho[(i, j)] * psi[j];
            }
        }
        f.re
    }

    /// `tr(rho X)` for an operator given on at least this dimension.
    pub fn expectation(&self, op: &Array2<Complex64>) -> Complex64 {
        let n = self.dim();
        assert!(op.nrows() >= n && op.ncols() >= n, "operator smaller than state");
        let mut s = ZERO;
        for i in 0..n {
            for j in 0..n {
                s += self.rho[(i, j)] * op[(j, i)];
            }
        }
        s
    }

    /// Copy embedded in a larger basis, padded with zeros.
    pub fn padded(&self, dim: usize) -> FockDensityMatrix {
        let n = self.dim();
        assert!(dim >= n);
        let mut rho = Array2::zeros((dim, dim));
        rho.slice_mut(ndarray::s![..n, ..n]).assign(&self.rho);
        FockDensityMatrix { rho }
    }
}

/// Truncated annihilation operator.
pub fn annihilation(dim: usize) -> Array2<Complex64> {
    let mut a = Array2::zeros((dim, dim));
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn creation(dim: usize) -> Array2<Complex64> {
    annihilation(dim).t().to_owned()
}

pub fn number_operator(dim: usize) -> Array2<Complex64> {
    let mut n = Array2::zeros((dim, dim));
    for k in 0..dim {
        n[(k, k)] = Complex64::new(k as f64, 0.0);
    }
    n
}

pub(crate) fn dagger(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|c| c.conj())
}

fn one_norm(m: &Array2<Complex64>) -> f64 {
    m.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(m: &Array2<Complex64>) -> Array2<Complex64> {
    let n = m.nrows();
    let norm = one_norm(m);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m.mapv(|z| z / 2f64.powi(squarings as i32));
    let mut result: Array2<Complex64> = Array2::eye(n);
    let mut term: Array2<Complex64> = Array2::eye(n);
    for k in 1..=40 {
        term = term.dot(&scaled).mapv(|z| z / k as f64);
        result += &term;
        if one_norm(&term) < 1e-18 * one_norm(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// `ln(k!)` for `k < len`.
pub(crate) fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len.max(1)];
    for k in 1..len {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}
