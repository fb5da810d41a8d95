use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use proptest::prelude::*;

use su11::fock::{
    apply_loss_kraus, apply_mpa_first_order, apply_squeeze, evolve_mixed, moments, prepare_displaced_squeezed,
    FockDensityMatrix, TruncationPolicy,
};
use su11::gaussian::{real_expectation, Ladder, ModeLabel, OperatorPolynomial};
use su11::interferometer::{amplitude_for_ns, evaluate, max_r1, sample_scene, InterferometerConfig, MpaModel};
use su11::optimize::{optimize_r1_limit, sample_quadratures, SqueezeSearch};
use su11::sensitivity::{coherent_variance, spa_prefactor, su11_limit_variance, ClosedFormInput};
use su11::units::{
    absorbance_from_cross_section, cross_section_from_absorbance, estimate_epsilon_m, Concentration, CrossSectionParams,
};
use su11::{wick_expectation, GaussianScene};

#[derive(Debug, Clone, Copy)]
enum Stage {
    Displace(f64, f64),
    Squeeze(f64, f64),
    Loss(f64),
}

fn stage() -> impl Strategy<Value = Stage> {
    prop_oneof![
        (0.0..3.0, 0.0..6.3).prop_map(|(a, p)| Stage::Displace(a, p)),
        (0.0..1.0, 0.0..6.3).prop_map(|(r, p)| Stage::Squeeze(r, p)),
        (0.0..=1.0).prop_map(Stage::Loss),
    ]
}

fn build(stages: &[Stage]) -> GaussianScene {
    stages.iter().fold(GaussianScene::vacuum(), |s, st| match *st {
        Stage::Displace(a, p) => s.apply_displacement(a, p),
        Stage::Squeeze(r, p) => s.apply_squeeze(r, p).unwrap(),
        Stage::Loss(eta) => s.apply_loss(eta).unwrap(),
    })
}

fn monomial(ladders: &[bool]) -> OperatorPolynomial {
    let factors = ladders
        .iter()
        .map(|&up| (ModeLabel::SIGNAL, if up { Ladder::Create } else { Ladder::Annihilate }))
        .collect();
    OperatorPolynomial::monomial(Complex64::new(1.0, 0.0), factors)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn commutator_survives_any_chain(stages in prop::collection::vec(stage(), 0..8)) {
        prop_assert!(build(&stages).commutator_defect() < 1e-12);
    }

    #[test]
    fn unit_transmission_changes_nothing(stages in prop::collection::vec(stage(), 0..5), word in prop::collection::vec(any::<bool>(), 0..7)) {
        let scene = build(&stages);
        let poly = monomial(&word);
        let before = wick_expectation(&scene, &poly).unwrap();
        let after = wick_expectation(&scene.apply_loss(1.0).unwrap(), &poly).unwrap();
        prop_assert!((before - after).norm() <= 1e-14 * before.norm().max(1.0));
    }

    #[test]
    fn self_adjoint_polynomials_are_real(stages in prop::collection::vec(stage(), 0..5), word in prop::collection::vec(any::<bool>(), 0..7)) {
        let scene = build(&stages);
        let x = monomial(&word);
        let h = x.clone() + x.adjoint();
        let v = wick_expectation(&scene, &h).unwrap();
        prop_assert!(v.im.abs() < 1e-10 * v.re.abs().max(1.0));
    }

    #[test]
    fn expectation_is_linear(
        stages in prop::collection::vec(stage(), 0..5),
        w1 in prop::collection::vec(any::<bool>(), 0..6),
        w2 in prop::collection::vec(any::<bool>(), 0..6),
        c1 in (-2.0..2.0, -2.0..2.0),
        c2 in (-2.0..2.0, -2.0..2.0),
    ) {
        let scene = build(&stages);
        let (c1, c2) = (Complex64::new(c1.0, c1.1), Complex64::new(c2.0, c2.1));
        let (p1, p2) = (monomial(&w1), monomial(&w2));
        let joint = wick_expectation(&scene, &(p1.clone() * c1 + p2.clone() * c2)).unwrap();
        let split = c1 * wick_expectation(&scene, &p1).unwrap() + c2 * wick_expectation(&scene, &p2).unwrap();
        prop_assert!((joint - split).norm() <= 1e-10 * split.norm().max(1.0));
    }

    #[test]
    fn coherent_reduction_scales_with_both_losses(m in 1u32..=4, n_s in 1.0..100.0, eta_in in 0.05..=1.0, eta_ex in 0.05..=1.0) {
        let config = InterferometerConfig::coherent(m, n_s).with_losses(eta_in, eta_ex);
        let v = evaluate(&config).unwrap().variance_epsilon;
        prop_assert!(close(v, coherent_variance(m, n_s, eta_in, eta_ex).unwrap(), 1e-10));
        let lossless = evaluate(&InterferometerConfig::coherent(m, n_s)).unwrap().variance_epsilon;
        prop_assert!(close(v * eta_in * eta_ex, lossless, 1e-10));
    }

    #[test]
    fn drive_sets_sample_photons(n_s in 0.1..200.0, frac in 0.0..=1.0, phi in 0.2..1.4) {
        let phi_las = FRAC_PI_2 + phi - 0.8;
        let r1 = frac * max_r1(n_s);
        if let Ok(alpha) = amplitude_for_ns(n_s, r1, phi_las) {
            let scene = sample_scene(alpha, phi_las, r1, 1.0).unwrap();
            let n = real_expectation(&scene, &OperatorPolynomial::number(ModeLabel::SIGNAL)).unwrap();
            prop_assert!(close(n, n_s, 1e-10));
        }
    }

    #[test]
    fn report_ratio_holds(m in 1u32..=4, n_s in 0.5..30.0, frac in 0.0..0.9, r2 in 0.0..2.0, pl in 0.0..TAU, pi in 0.0..TAU) {
        let config = InterferometerConfig::new(m, n_s, frac * max_r1(n_s), r2).with_phases(pl, pi);
        let r = evaluate(&config).unwrap();
        prop_assert!(r.var_n >= 0.0);
        if r.estimable {
            prop_assert!(close(r.variance_epsilon, r.var_n / (r.signal_derivative * r.signal_derivative), 1e-14));
        }
    }

    #[test]
    fn derivative_models_agree_without_second_gain(m in 1u32..=4, n_s in 0.5..30.0, frac in 0.0..0.9, pl in 0.0..TAU, eta_in in 0.1..=1.0) {
        let base = InterferometerConfig::new(m, n_s, frac * max_r1(n_s), 0.0).with_phases(pl, 0.0).with_losses(eta_in, 0.8);
        let a = evaluate(&base).unwrap().signal_derivative;
        let b = evaluate(&base.with_model(MpaModel::AdjointLindblad)).unwrap().signal_derivative;
        prop_assert!(close(a, b, 1e-10));
    }

    #[test]
    fn limit_ignores_external_loss(m in 1u32..=4, n_s in 1.0..1e4, frac in 0.0..0.95, eta_in in 0.05..=1.0, eta_ex in 0.01..=1.0) {
        let r1 = frac * max_r1(n_s);
        let a = su11_limit_variance(&ClosedFormInput::on_constraint(m, n_s, r1, eta_in, 1.0).unwrap()).unwrap();
        let b = su11_limit_variance(&ClosedFormInput::on_constraint(m, n_s, r1, eta_in, eta_ex).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn coherent_variance_falls_with_every_resource(m in 1u32..=4, n_s in 0.1..1e3, eta_in in 0.05..0.99f64, eta_ex in 0.05..0.99f64, bump in 1.001..1.01f64) {
        let v = coherent_variance(m, n_s, eta_in, eta_ex).unwrap();
        prop_assert!(coherent_variance(m, n_s * bump, eta_in, eta_ex).unwrap() < v);
        prop_assert!(coherent_variance(m, n_s, (eta_in * bump).min(1.0), eta_ex).unwrap() < v);
        prop_assert!(coherent_variance(m, n_s, eta_in, (eta_ex * bump).min(1.0)).unwrap() < v);
    }

    #[test]
    fn spa_only_degrades(m in 2u32..=4, eta in 1e-6..1.0) {
        prop_assert!(spa_prefactor(m, eta).unwrap() >= 1.0);
    }

    #[test]
    fn cross_section_round_trip(sigma in 1e-22..1e-15, micro in 0.01..1e4, path in 1e-3..10.0) {
        let concentration = Concentration::micromolar(micro);
        let params = CrossSectionParams {
            sigma_e: sigma,
            concentration,
            path_length: path,
            pulse_duration: 1e-13,
            beam_area: 1e-6,
            mean_photons: 1e6,
            flux_density: None,
        };
        let eps = absorbance_from_cross_section(&params).unwrap();
        let back = cross_section_from_absorbance(eps, concentration, path).unwrap();
        prop_assert!(((back - sigma) / sigma).abs() < 1e-12);
    }

    #[test]
    fn estimates_fall_with_order(n in 1.0..1e10, m in 1u32..4) {
        prop_assert!(estimate_epsilon_m(m + 1, n).unwrap().value < estimate_epsilon_m(m, n).unwrap().value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wick_matches_number_basis(n_s in 0.05..4.0f64, frac in 0.0..=1.0f64, phi in 0.0..TAU, eta in 0.0..=1.0) {
        let r = (frac * max_r1(n_s)).min(1.5);
        let alpha = match amplitude_for_ns(n_s, r, phi) {
            Ok(a) => a,
            Err(_) => return Ok(()),
        };
        let scene = sample_scene(alpha, phi, r, eta).unwrap();
        let n = OperatorPolynomial::number(ModeLabel::SIGNAL);
        let g1 = real_expectation(&scene, &n).unwrap();
        let g2 = real_expectation(&scene, &(n.clone() * n)).unwrap();
        let rho = prepare_displaced_squeezed(alpha, phi, r, &TruncationPolicy::default()).unwrap();
        let (mean, var) = moments(&apply_loss_kraus(&rho, eta).unwrap());
        prop_assert!(close(mean, g1, 1e-6));
        prop_assert!(close(var + mean * mean, g2, 1e-6));
    }

    #[test]
    fn channels_keep_trace_and_positivity(
        alpha in 0.0..1.5,
        phi in 0.0..TAU,
        r in 0.0..0.6,
        ops in prop::collection::vec((0u8..3, 0.0..1.0f64), 1..10),
    ) {
        let policy = TruncationPolicy::default();
        let mut rho = prepare_displaced_squeezed(alpha, phi, r, &policy).unwrap();
        for (kind, x) in ops {
            let before = rho.trace().re;
            rho = match kind {
                0 => apply_loss_kraus(&rho, x).unwrap(),
                1 => apply_squeeze(&rho, 0.3 * x, 6.0 * x, &policy).unwrap(),
                _ => evolve_mixed(&rho, 2, 0.05 * x, 0.05, 64).unwrap(),
            };
            // Squeezing in a finite basis leaks at most the tail tolerance.
            let tol = if kind == 1 { 2.0 * policy.tail_tolerance } else { 1e-10 };
            prop_assert!((rho.trace().re - before).abs() < tol);
            prop_assert!(rho.hermiticity_defect() < 1e-10);
        }
        prop_assert!(rho.is_positive(1e-8));
    }

    #[test]
    fn losses_compose(alpha in 0.0..2.0, r in 0.0..0.8, e1 in 0.0..=1.0, e2 in 0.0..=1.0) {
        let rho = prepare_displaced_squeezed(alpha, 0.4, r, &TruncationPolicy::default()).unwrap();
        let twice = apply_loss_kraus(&apply_loss_kraus(&rho, e1).unwrap(), e2).unwrap();
        let once = apply_loss_kraus(&rho, e1 * e2).unwrap();
        let diff = (twice.matrix() - once.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-10);
    }

    #[test]
    fn su11_limit_beats_coherent(m in 1u32..=4, n_s in 1.0..1e4) {
        let opt = optimize_r1_limit(m, n_s, 1.0, 1.0).unwrap();
        prop_assert!(opt.best_variance <= coherent_variance(m, n_s, 1.0, 1.0).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn optimum_is_no_worse_than_the_ends(m in 1u32..=4, n_s in 0.5..1e3, eta_in in 0.5..=1.0) {
        let opt = optimize_r1_limit(m, n_s, eta_in, 1.0).unwrap();
        let search = SqueezeSearch::new(m, n_s, su11::interferometer::SecondSqueeze::Infinite, eta_in, 1.0);
        prop_assert!(opt.best_r1 >= 0.0 && opt.best_r1 <= max_r1(n_s));
        prop_assert!(opt.best_variance <= search.variance(0.0).unwrap());
        if let Ok(v) = search.variance(max_r1(n_s)) {
            prop_assert!(opt.best_variance <= v);
        }
    }

    #[test]
    fn photon_identity_on_the_balanced_state(n_s in 100.0..1e5) {
        // alpha = e^{2 r1} / 2 on the photon-number constraint.
        let r1 = su11::numerics::bisect(
            |r| Ok(amplitude_for_ns(n_s, r, FRAC_PI_2)? - (2.0 * r).exp() / 2.0),
            0.0,
            max_r1(n_s),
            1e-14,
        ).unwrap();
        let q = sample_quadratures(n_s, r1, FRAC_PI_2, 1.0).unwrap();
        prop_assert!(((q.mean_n + 0.5) / (q.mean_p * q.mean_p) - 1.0).abs() < 0.05);
        prop_assert!((q.mean_p * q.mean_p / q.second_q - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // The truncated expansion is trace preserving but not a channel: pure states can pick up
    // negative eigenvalues of order eps^2, so only the trace is checked here.
    #[test]
    fn first_order_absorption_keeps_trace(alpha in 0.0..1.5, r in 0.0..0.8, m in 1u32..=4, eps in 0.0..0.05) {
        let rho = prepare_displaced_squeezed(alpha, 0.7, r, &TruncationPolicy::default()).unwrap();
        let out = apply_mpa_first_order(&rho, m, eps).unwrap();
        prop_assert!((out.trace().re - rho.trace().re).abs() < 1e-10);
    }
}

#[test]
fn number_state_trace_after_absorption() {
    let rho = FockDensityMatrix::number_state(3, 6);
    for m in 1..=3 {
        let out = apply_mpa_first_order(&rho, m, 0.02).unwrap();
        assert!((out.trace().re - 1.0).abs() < 1e-15);
    }
}
