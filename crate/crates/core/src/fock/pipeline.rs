use ndarray::{s, Array2};
use num_complex::Complex64;

use super::channels::{loss_map, mpa_generator, prepare_displaced_squeezed};
use super::matrix::{annihilation, creation, dagger, TruncationPolicy};
use crate::error::Result;
use crate::interferometer::{InterferometerConfig, MpaModel, SensitivityReport};

// Operators are built with headroom and cut back, so products are exact on the kept block.
fn cut(op: &Array2<Complex64>, dim: usize) -> Array2<Complex64> {
    op.slice(s![..dim, ..dim]).to_owned()
}

fn trace_product(rho: &Array2<Complex64>, op: &Array2<Complex64>) -> f64 {
    let n = rho.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += rho[(i, j)] * op[(j, i)];
        }
    }
    acc.re
}

/// Number-basis evaluation of a finite-gain configuration, independent of the Wick engine.
///
/// The state is propagated up to the second squeezer; the squeezer and the external loss
/// are applied to the detected number operator instead, which keeps the basis small.
pub fn oracle_evaluate(config: &InterferometerConfig, policy: &TruncationPolicy) -> Result<SensitivityReport> {
    config.validate()?;
    let r2 = config.r2.finite()?;
    let alpha = config.alpha()?;
    let rho0 = prepare_displaced_squeezed(alpha, config.phi_las, config.r1, policy)?;
    let dim = rho0.dim();
    let m = config.m as usize;
    let big = dim + 2 * m + 4;

    let a = annihilation(big);
    let ad = creation(big);
    let (ch, sh) = (r2.cosh(), r2.sinh());
    let rot = Complex64::from_polar(sh, config.phi_int);
    let out = a.mapv(|x| x * ch) + ad.mapv(|x| x * rot);
    let num = dagger(&out).dot(&out);
    let num_sq = cut(&num.dot(&num), dim);
    let num = cut(&num, dim);

    let rho_in = loss_map(rho0.matrix(), config.eta_in);
    let eta_ex = config.eta_ex;
    let mean_m = trace_product(&rho_in, &num);
    let second_m = trace_product(&rho_in, &num_sq);
    let mean = eta_ex * mean_m;
    let var = eta_ex * eta_ex * (second_m - mean_m * mean_m) + eta_ex * (1.0 - eta_ex) * mean_m;

    let derivative = match config.model {
        MpaModel::AdjointLindblad => {
            let d_rho = loss_map(&mpa_generator(rho0.matrix(), config.m), config.eta_in);
            eta_ex * trace_product(&d_rho, &num)
        }
        MpaModel::HeisenbergSubstitution => {
            // a -> a - eps a^dagger^{m-1} a^m / 2 at the sample, carried to the detector.
            let mut lowering = a.clone();
            for _ in 1..m {
                lowering = lowering.dot(&a);
            }
            let mut raising = Array2::eye(big);
            for _ in 1..m {
                raising = raising.dot(&ad);
            }
            let delta = raising.dot(&lowering).mapv(|x| x * -0.5);
            let gain = (config.eta_in * eta_ex).sqrt();
            let shift = (delta.mapv(|x| x * ch) + dagger(&delta).mapv(|x| x * rot)).mapv(|x| x * gain);
            let signal = out.mapv(|x| x * gain);
            let op = dagger(&shift).dot(&signal) + dagger(&signal).dot(&shift);
            trace_product(rho0.matrix(), &cut(&op, dim))
        }
    };
    Ok(SensitivityReport::from_moments(
        mean,
        var,
        derivative,
        config.n_at_sample()?,
    ))
}
