use std::f64::consts::{FRAC_PI_2, PI, TAU};

use su11::interferometer::{max_r1, InterferometerConfig, SecondSqueeze};
use su11::optimize::{
    default_scaling_grid, optimal_state_condition, optimize_phases, optimize_r1, optimize_r1_limit, phase_grid,
    sample_quadratures, scaling_exponent, PhaseSearch, SqueezeSearch,
};
use su11::sensitivity::DetectionStrategy;
use su11::Error;

fn at_standard_phases(phi_las: f64, phi_int: f64, tol: f64) -> bool {
    let las = (phi_las - FRAC_PI_2).abs().min((phi_las - 3.0 * FRAC_PI_2).abs());
    las <= tol && (phi_int - PI).abs() <= tol
}

#[test]
fn two_photon_phase_optimum() {
    let config = InterferometerConfig::new(2, 15.0, 0.939, 1.447);
    let opt = optimize_phases(&config, PhaseSearch::default()).unwrap();
    assert!(!opt.flat);
    assert!(at_standard_phases(opt.phi_las, opt.phi_int, 1e-5), "{opt:?}");
    // Of the two mirror optima the smaller laser phase is reported.
    assert!(opt.phi_las < PI);
}

#[test]
fn coherent_landscape_is_flat() {
    let opt = optimize_phases(&InterferometerConfig::coherent(2, 15.0), PhaseSearch::default()).unwrap();
    assert!(opt.flat);
    let grid = phase_grid(&InterferometerConfig::coherent(2, 15.0), 16);
    let min = grid.iter().map(|p| p.2).fold(f64::INFINITY, f64::min);
    let max = grid.iter().map(|p| p.2).fold(0.0, f64::max);
    assert!(max - min < 1e-10 * min);
}

// An unsqueezed seed still sees the second amplifier's phase, so the landscape is not flat once r2 > 0.
#[test]
fn unsqueezed_seed_with_second_gain_is_not_flat() {
    let opt = optimize_phases(&InterferometerConfig::new(2, 15.0, 0.0, 1.447), PhaseSearch::default()).unwrap();
    assert!(!opt.flat);
}

#[test]
#[ignore = "contradicted: with r2 = 1.447 the variance at r1 = 0 still depends on both phases"]
fn unsqueezed_seed_is_flat() {
    let opt = optimize_phases(&InterferometerConfig::new(2, 15.0, 0.0, 1.447), PhaseSearch::default()).unwrap();
    assert!(opt.flat);
}

fn tuned(m: u32, n_s: f64) -> InterferometerConfig {
    let search = SqueezeSearch::new(m, n_s, SecondSqueeze::Finite(1.447), 1.0, 1.0);
    let best = optimize_r1(&search).unwrap();
    InterferometerConfig::new(m, n_s, best.best_r1, 1.447)
}

#[test]
fn same_phases_for_every_order() {
    for m in 1..=4 {
        for n_s in [15.0, 50.0] {
            let opt = optimize_phases(&tuned(m, n_s), PhaseSearch::default()).unwrap();
            assert!(
                at_standard_phases(opt.phi_las, opt.phi_int, TAU / 64.0),
                "m={m} n_s={n_s}: {opt:?}"
            );
        }
    }
}

// At n_s = 5 and m >= 3 the tuned squeezing sits close to the squeezed-vacuum end and
// the optimum moves to phi_las = phi_int = 0.
#[test]
#[ignore = "contradicted: at n_s = 5 the optimum for m = 3, 4 is at (0, 0)"]
fn same_phases_for_every_order_at_five_photons() {
    for m in 1..=4 {
        let opt = optimize_phases(&tuned(m, 5.0), PhaseSearch::default()).unwrap();
        assert!(
            at_standard_phases(opt.phi_las, opt.phi_int, TAU / 64.0),
            "m={m}: {opt:?}"
        );
    }
}

#[test]
fn phase_search_rejects_infinite_gain() {
    let mut config = InterferometerConfig::new(2, 15.0, 0.939, 1.447);
    config.r2 = SecondSqueeze::Infinite;
    assert!(matches!(
        optimize_phases(&config, PhaseSearch::default()),
        Err(Error::InfiniteR2)
    ));
}

#[test]
fn finite_gain_squeezing_optimum() {
    let search = SqueezeSearch::new(2, 15.0, SecondSqueeze::Finite(1.447), 1.0, 1.0);
    let best = optimize_r1(&search).unwrap();
    assert!(best.best_r1 > 0.0 && best.best_r1 < max_r1(15.0));
    assert!(best.best_variance <= search.variance(0.939).unwrap());
    assert!(best.best_variance <= search.variance(0.0).unwrap());
    assert!((best.best_r1 - 1.717).abs() < 1e-2, "{best:?}");
}

#[test]
#[ignore = "contradicted: the minimum at r2 = 1.447 lies at r1 = 1.717, not 0.939"]
fn finite_gain_squeezing_optimum_as_quoted() {
    let best = optimize_r1(&SqueezeSearch::new(2, 15.0, SecondSqueeze::Finite(1.447), 1.0, 1.0)).unwrap();
    assert!((best.best_r1 - 0.939).abs() < 1e-2);
}

#[test]
fn tiny_photon_numbers_stay_feasible() {
    let best = optimize_r1_limit(2, 0.1, 1.0, 1.0).unwrap();
    assert!(best.best_r1 >= 0.0 && best.best_r1 <= max_r1(0.1));
    assert!(best.best_variance >= 0.0);
}

#[test]
fn optimal_two_photon_state_balances_quadratures() {
    let best = optimize_r1_limit(2, 100.0, 1.0, 1.0).unwrap();
    let ratio = optimal_state_condition(100.0, best.best_r1, FRAC_PI_2).unwrap();
    assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
}

#[test]
#[ignore = "contradicted: for m = 3 the optimised state is not the balanced one"]
fn optimal_three_photon_state_balances_quadratures() {
    let best = optimize_r1_limit(3, 1000.0, 1.0, 1.0).unwrap();
    let ratio = optimal_state_condition(1000.0, best.best_r1, FRAC_PI_2).unwrap();
    assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
}

#[test]
fn state_condition_examples() {
    let n_s: f64 = 20.0;
    assert!((optimal_state_condition(n_s, 0.0, FRAC_PI_2).unwrap() - 4.0 * n_s).abs() < 1e-10);
    let q = sample_quadratures(n_s, 0.3, FRAC_PI_2, 1.0).unwrap();
    let alpha = su11::interferometer::amplitude_for_ns(n_s, 0.3, FRAC_PI_2).unwrap();
    assert!((q.mean_p - 2f64.sqrt() * alpha * (-0.3f64).exp()).abs() < 1e-12);
}

#[test]
fn coherent_scaling_is_exact() {
    let grid = default_scaling_grid();
    assert_eq!(grid.len(), 9);
    for m in 1..=4 {
        let fit = scaling_exponent(m, DetectionStrategy::Coherent, 1.0, &grid).unwrap();
        assert!((fit.exponent_gamma - (2 * m - 1) as f64).abs() < 1e-6);
        assert!((0.0..=1.0).contains(&fit.r_squared));
    }
}

#[test]
fn interferometer_scaling() {
    let grid = default_scaling_grid();
    let lossless = scaling_exponent(2, DetectionStrategy::Su11Optimal, 1.0, &grid).unwrap();
    assert!((lossless.exponent_gamma - 4.0).abs() < 0.1);
    let lossy = scaling_exponent(2, DetectionStrategy::Su11Optimal, 0.01, &grid).unwrap();
    assert!((lossy.exponent_gamma - 3.0).abs() < 0.1);
}

#[test]
fn scaling_grid_checks() {
    let s = DetectionStrategy::Coherent;
    assert!(scaling_exponent(2, s, 1.0, &[100.0, 200.0, 300.0]).is_err());
    assert!(scaling_exponent(2, s, 1.0, &[100.0, 200.0, 300.0, 300.0, 400.0, 500.0]).is_err());
    assert!(scaling_exponent(2, s, 1.0, &[10.0, 200.0, 300.0, 350.0, 400.0, 500.0]).is_err());
}

#[test]
fn external_loss_drops_out_of_the_optimum() {
    for m in 1..=4 {
        let a = optimize_r1_limit(m, 300.0, 0.9, 1.0).unwrap();
        for eta_ex in [0.3, 0.7] {
            let b = optimize_r1_limit(m, 300.0, 0.9, eta_ex).unwrap();
            assert!(((a.best_variance - b.best_variance) / a.best_variance).abs() < 1e-9);
        }
    }
}
