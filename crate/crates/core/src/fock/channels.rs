use ndarray::{Array1, Array2};
use num_complex::Complex64;

use super::matrix::{annihilation, creation, dagger, expm, ln_factorials, FockDensityMatrix, TruncationPolicy, ZERO};
use crate::error::{Error, Result};
use crate::interferometer::photons_at_sample;

const TAIL_WIDTH: usize = 5;

/// Coherent-state amplitudes `e^{-|z|^2/2} z^n / sqrt(n!)` on `dim` levels.
pub fn coherent_vector(z: Complex64, dim: usize) -> Array1<Complex64> {
    let lnf = ln_factorials(dim);
    let r = z.norm();
    let theta = z.arg();
    Array1::from_shape_fn(dim, |n| {
        if r == 0.0 {
            return if n == 0 { Complex64::new(1.0, 0.0) } else { ZERO };
        }
        let ln_mag = -0.5 * r * r + n as f64 * r.ln() - 0.5 * lnf[n];
        Complex64::from_polar(ln_mag.exp(), n as f64 * theta)
    })
}

/// `exp((z a^dagger^2 - z^* a^2)/2)` with `z = r e^{i phase}`, on the truncated space.
pub fn squeeze_unitary(r: f64, phase: f64, dim: usize) -> Array2<Complex64> {
    let a = annihilation(dim);
    let ad = creation(dim);
    let z = Complex64::from_polar(r, phase);
    let g = ad.dot(&ad).mapv(|x| x * z * 0.5) - a.dot(&a).mapv(|x| x * z.conj() * 0.5);
    expm(&g)
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::TransmissionOutOfRange(eta))
    }
}

fn check_m(m: u32) -> Result<()> {
    if (1..=4).contains(&m) {
        Ok(())
    } else {
        Err(Error::UnsupportedOrder(m))
    }
}

fn starting_dim(mean: f64, r: f64, tol: f64) -> usize {
    let squeeze_tail = if r > 0.0 { tol.ln() / r.tanh().ln() } else { 0.0 };
    (3.0 * mean + 8.0 * mean.sqrt() + squeeze_tail + 20.0).ceil() as usize
}

fn grow(dim: usize, policy: &TruncationPolicy, tail: f64) -> Result<usize> {
    if dim >= policy.max_dim {
        return Err(Error::CutoffExhausted {
            dim,
            max_dim: policy.max_dim,
            tail,
        });
    }
    Ok(((dim as f64 * 1.5).ceil() as usize).min(policy.max_dim))
}

/// Seed `|alpha e^{i phi_las}>` squeezed by `r` at zero phase, grown until the edge is empty.
pub fn prepare_displaced_squeezed(
    alpha: f64,
    phi_las: f64,
    r: f64,
    policy: &TruncationPolicy,
) -> Result<FockDensityMatrix> {
    if !alpha.is_finite() || !phi_las.is_finite() || !r.is_finite() || alpha < 0.0 || r < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "state parameters must be finite and non-negative: alpha={alpha}, r={r}"
        )));
    }
    let z = Complex64::from_polar(alpha, phi_las);
    // The seed itself needs room before the squeezer pulls it in.
    let seed = alpha * alpha + 8.0 * alpha + 20.0;
    let at_sample = photons_at_sample(r, alpha, phi_las);
    let mut dim = (seed.ceil() as usize)
        .max(starting_dim(at_sample, r, policy.tail_tolerance))
        .min(policy.max_dim);
    loop {
        let mut psi = coherent_vector(z, dim);
        if r > 0.0 {
            psi = squeeze_unitary(r, 0.0, dim).dot(&psi);
        }
        let rho = FockDensityMatrix::from_pure(&psi);
        let tail = rho.tail_population(TAIL_WIDTH);
        if tail < policy.tail_tolerance {
            return Ok(rho);
        }
        dim = grow(dim, policy, tail)?;
    }
}

/// `U rho U^dagger` for the squeezer of gain `r` and phase `phase`, enlarging the basis as needed.
pub fn apply_squeeze(
    rho: &FockDensityMatrix,
    r: f64,
    phase: f64,
    policy: &TruncationPolicy,
) -> Result<FockDensityMatrix> {
    if r == 0.0 {
        return Ok(rho.clone());
    }
    let mean = rho
        .populations()
        .iter()
        .enumerate()
        .map(|(k, p)| k as f64 * p)
        .sum::<f64>();
    let mut dim = (rho.dim() + starting_dim(mean * (2.0 * r).exp(), r, policy.tail_tolerance) / 2).min(policy.max_dim);
    dim = dim.max(rho.dim());
    loop {
        let u = squeeze_unitary(r, phase, dim);
        let padded = rho.padded(dim);
        let out = FockDensityMatrix::from_matrix(u.dot(padded.matrix()).dot(&dagger(&u)));
        let tail = out.tail_population(TAIL_WIDTH);
        if tail < policy.tail_tolerance {
            return Ok(out);
        }
        dim = grow(dim, policy, tail)?;
    }
}

/// Photon loss with transmission `eta`, applied through its Kraus operators.
pub fn apply_loss_kraus(rho: &FockDensityMatrix, eta: f64) -> Result<FockDensityMatrix> {
    check_eta(eta)?;
    Ok(FockDensityMatrix::from_matrix(loss_map(rho.matrix(), eta)))
}

/// The loss channel on any square matrix (it is linear, so traceless inputs are fine).
pub(crate) fn loss_map(rho: &Array2<Complex64>, eta: f64) -> Array2<Complex64> {
    let n = rho.nrows();
    if eta == 1.0 {
        return rho.clone();
    }
    let mut out = Array2::zeros((n, n));
    if eta == 0.0 {
        out[(0, 0)] = rho.diag().sum();
        return out;
    }
    let lnf = ln_factorials(n);
    let ln_binom = |top: usize, j: usize| lnf[top] - lnf[j] - lnf[top - j];
    let (ln_eta, ln_loss) = (eta.ln(), (1.0 - eta).ln());
    for p in 0..n {
        for q in 0..n {
            let mut s = ZERO;
            for j in 0..n - p.max(q) {
                let w = 0.5 * (ln_binom(p + j, j) + ln_binom(q + j, j))
                    + j as f64 * ln_loss
                    + 0.5 * (p + q) as f64 * ln_eta;
                s += rho[(p + j, q + j)] * w.exp();
            }
            out[(p, q)] = s;
        }
    }
    out
}

/// Generator of m-photon absorption: `(2 a^m rho a^dagger^m - {a^dagger^m a^m, rho}) / (2m)`.
pub fn mpa_generator(rho: &Array2<Complex64>, m: u32) -> Array2<Complex64> {
    let n = rho.nrows();
    let mu = m as usize;
    let lnf = ln_factorials(n + mu);
    // a^m |k> = sqrt(k!/(k-m)!) |k-m>
    let rate = |k: usize| if k >= mu { (lnf[k] - lnf[k - mu]).exp() } else { 0.0 };
    let lift = |k: usize| ((lnf[k + mu] - lnf[k]) * 0.5).exp();
    let scale = 1.0 / (2.0 * m as f64);
    Array2::from_shape_fn((n, n), |(p, q)| {
        let jump = if p + mu < n && q + mu < n {
            rho[(p + mu, q + mu)] * (2.0 * lift(p) * lift(q))
        } else {
            ZERO
        };
        (jump - rho[(p, q)] * (rate(p) + rate(q))) * scale
    })
}

/// Linear loss generator `2 a rho a^dagger - {a^dagger a, rho}`; unit time gives transmission `e^{-2}`.
pub fn spa_generator(rho: &Array2<Complex64>) -> Array2<Complex64> {
    let n = rho.nrows();
    Array2::from_shape_fn((n, n), |(p, q)| {
        let jump = if p + 1 < n && q + 1 < n {
            rho[(p + 1, q + 1)] * (2.0 * (((p + 1) * (q + 1)) as f64).sqrt())
        } else {
            ZERO
        };
        jump - rho[(p, q)] * (p + q) as f64
    })
}

/// `rho + eps_m L_m rho`: absorption to first order in the absorbance.
pub fn apply_mpa_first_order(rho: &FockDensityMatrix, m: u32, eps_m: f64) -> Result<FockDensityMatrix> {
    check_m(m)?;
    let d = mpa_generator(rho.matrix(), m);
    Ok(FockDensityMatrix::from_matrix(rho.matrix() + &d.mapv(|z| z * eps_m)))
}

fn mixed_rhs(rho: &Array2<Complex64>, m: u32, eps_m: f64, eps_s: f64) -> Array2<Complex64> {
    let mut out = spa_generator(rho).mapv(|z| z * eps_s);
    if eps_m != 0.0 {
        out = out + mpa_generator(rho, m).mapv(|z| z * eps_m);
    }
    out
}

fn mean_number(rho: &Array2<Complex64>) -> f64 {
    rho.diag().iter().enumerate().map(|(k, z)| k as f64 * z.re).sum()
}

// The generator only lowers photon number, so its spectrum is the diagonal decay rates.
// Keeping h * rate <= 1 stays well inside the RK4 stability interval.
fn stable_steps(dim: usize, m: u32, eps_m: f64, eps_s: f64) -> usize {
    let top = dim.saturating_sub(1);
    let mu = m as usize;
    let falling: f64 = if top >= mu {
        (top - mu + 1..=top).map(|k| k as f64).product()
    } else {
        0.0
    };
    let rate = eps_m.abs() * falling / m as f64 + 2.0 * eps_s * top as f64;
    rate.ceil() as usize
}

// Fixed-step RK4 on the pair (rho, d rho / d eps_m) over unit normalised time.
fn rk4(
    rho: &Array2<Complex64>,
    m: u32,
    eps_m: f64,
    eps_s: f64,
    steps: usize,
) -> (Array2<Complex64>, Array2<Complex64>) {
    let h = 1.0 / steps as f64;
    let f = |x: &Array2<Complex64>, t: &Array2<Complex64>| {
        (
            mixed_rhs(x, m, eps_m, eps_s),
            mixed_rhs(t, m, eps_m, eps_s) + mpa_generator(x, m),
        )
    };
    let mut x = rho.clone();
    let mut t: Array2<Complex64> = Array2::zeros(rho.raw_dim());
    for _ in 0..steps {
        let (k1, l1) = f(&x, &t);
        let (k2, l2) = f(&(&x + &k1.mapv(|z| z * (h / 2.0))), &(&t + &l1.mapv(|z| z * (h / 2.0))));
        let (k3, l3) = f(&(&x + &k2.mapv(|z| z * (h / 2.0))), &(&t + &l2.mapv(|z| z * (h / 2.0))));
        let (k4, l4) = f(&(&x + &k3.mapv(|z| z * h)), &(&t + &l3.mapv(|z| z * h)));
        x = x + (k1 + k2.mapv(|z| z * 2.0) + k3.mapv(|z| z * 2.0) + k4).mapv(|z| z * (h / 6.0));
        t = t + (l1 + l2.mapv(|z| z * 2.0) + l3.mapv(|z| z * 2.0) + l4).mapv(|z| z * (h / 6.0));
    }
    (x, t)
}

/// Result of [`evolve_mixed_with_tangent`]: the evolved state and its absorbance derivative.
#[derive(Debug, Clone)]
pub struct MixedEvolution {
    pub state: FockDensityMatrix,
    /// `d rho / d eps_m` at the requested absorbances.
    pub tangent: Array2<Complex64>,
    pub steps: usize,
}

/// Joint m-photon and single-photon absorption through the sample, integrated over
/// normalised time with total absorbances `eps_m` and `eps_s`.
///
/// `steps` is a lower bound; it is raised when the truncated basis needs smaller steps
/// for stability. The run is repeated at twice the step count; the finer result is
/// returned once `<n>` agrees between the two to `1e-8`.
pub fn evolve_mixed(
    rho: &FockDensityMatrix,
    m: u32,
    eps_m: f64,
    eps_s: f64,
    steps: usize,
) -> Result<FockDensityMatrix> {
    Ok(evolve_mixed_with_tangent(rho, m, eps_m, eps_s, steps)?.state)
}

/// [`evolve_mixed`] together with the exact first derivative in `eps_m`.
pub fn evolve_mixed_with_tangent(
    rho: &FockDensityMatrix,
    m: u32,
    eps_m: f64,
    eps_s: f64,
    steps: usize,
) -> Result<MixedEvolution> {
    check_m(m)?;
    if steps == 0 || !eps_m.is_finite() || !eps_s.is_finite() || eps_s < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "need steps > 0 and finite absorbances, got steps={steps}, eps_m={eps_m}, eps_s={eps_s}"
        )));
    }
    let steps = steps.max(stable_steps(rho.dim(), m, eps_m, eps_s));
    let (x1, t1) = rk4(rho.matrix(), m, eps_m, eps_s, steps);
    let (x2, t2) = rk4(rho.matrix(), m, eps_m, eps_s, 2 * steps);
    let scale = mean_number(&x2).abs().max(1.0);
    let change = (mean_number(&x1) - mean_number(&x2))
        .abs()
        .max((mean_number(&t1) - mean_number(&t2)).abs() / scale);
    if !(change < 1e-8 * scale) {
        return Err(Error::StepNonConvergence { change });
    }
    Ok(MixedEvolution {
        state: FockDensityMatrix::from_matrix(x2),
        tangent: t2,
        steps: 2 * steps,
    })
}

/// `(<n>, Var n)`.
pub fn moments(rho: &FockDensityMatrix) -> (f64, f64) {
    let p = rho.populations();
    let mean: f64 = p.iter().enumerate().map(|(k, w)| k as f64 * w).sum();
    let second: f64 = p.iter().enumerate().map(|(k, w)| (k * k) as f64 * w).sum();
    (mean, second - mean * mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_preparation() {
        let rho = prepare_displaced_squeezed(0.0, 0.0, 0.0, &TruncationPolicy::default()).unwrap();
        assert_eq!(rho.populations()[0], 1.0);
        assert_eq!(moments(&rho), (0.0, 0.0));
    }

    #[test]
    fn squeezed_vacuum_has_even_support() {
        let rho = prepare_displaced_squeezed(0.0, 0.0, 1.0, &TruncationPolicy::default()).unwrap();
        let p = rho.populations();
        assert!(p.iter().skip(1).step_by(2).all(|&w| w.abs() < 1e-14));
        assert!((moments(&rho).0 - 1f64.sinh().powi(2)).abs() < 1e-8);
    }

    #[test]
    fn coherent_moments_are_poissonian() {
        let rho = prepare_displaced_squeezed(2.0, 0.3, 0.0, &TruncationPolicy::default()).unwrap();
        let (mean, var) = moments(&rho);
        assert!((mean - 4.0).abs() < 1e-9 && (var - 4.0).abs() < 1e-8);
    }

    #[test]
    fn vacuum_is_dark_to_absorption() {
        let rho = FockDensityMatrix::vacuum(8);
        for m in 1..=4 {
            assert_eq!(apply_mpa_first_order(&rho, m, 0.3).unwrap(), rho);
        }
    }

    #[test]
    fn two_photon_absorption_of_number_state() {
        // L_2 |2><2| = (2 * 2 |0><0| - 2 * 2 |2><2|) / 4
        let rho = FockDensityMatrix::number_state(2, 5);
        let out = apply_mpa_first_order(&rho, 2, 0.01).unwrap();
        let p = out.populations();
        assert!((p[2] - 0.99).abs() < 1e-15);
        assert!((p[0] - 0.01).abs() < 1e-15);
        assert!((out.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn loss_turns_coherent_into_coherent() {
        let z = Complex64::from_polar(1.6, 0.4);
        let rho = FockDensityMatrix::from_pure(&coherent_vector(z, 40));
        let out = apply_loss_kraus(&rho, 0.25).unwrap();
        let target = coherent_vector(z * 0.5, 40);
        assert!(out.fidelity_with_pure(&target) > 1.0 - 1e-8);
        assert_eq!(apply_loss_kraus(&rho, 1.0).unwrap(), rho);
        assert!(apply_loss_kraus(&rho, 1.2).is_err());
    }

    #[test]
    fn spa_evolution_is_loss() {
        let rho = prepare_displaced_squeezed(1.2, 0.5, 0.4, &TruncationPolicy::default()).unwrap();
        let eps_s = 0.1;
        let evolved = evolve_mixed(&rho, 2, 0.0, eps_s, 64).unwrap();
        let kraus = apply_loss_kraus(&rho, (-2.0 * eps_s).exp()).unwrap();
        let diff = (evolved.matrix() - kraus.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-8, "{diff}");
    }
}
