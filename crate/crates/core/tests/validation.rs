use su11::validation::{criterion_ids, oracle_configs, run_criterion, ValidationOptions};

#[test]
fn perturbed_closed_form_is_caught() {
    let mutated = run_criterion(
        4,
        &ValidationOptions {
            mutate_closed_form: true,
        },
    )
    .unwrap();
    assert!(!mutated.passed, "{}", mutated.line());
    assert!(mutated.metric > 1e-3);
    let clean = run_criterion(4, &ValidationOptions::default()).unwrap();
    assert!(clean.passed, "{}", clean.line());
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    for id in [4, 9, 11] {
        let mut a = run_criterion(id, &ValidationOptions::default()).unwrap();
        let mut b = run_criterion(id, &ValidationOptions::default()).unwrap();
        a.elapsed_seconds = 0.0;
        b.elapsed_seconds = 0.0;
        assert_eq!(a, b);
    }
}

#[test]
fn oracle_cases_are_fixed_and_in_range() {
    let a = oracle_configs();
    assert_eq!(a, oracle_configs());
    assert_eq!(a.len(), 50);
    for c in &a {
        assert!((1..=3).contains(&c.m));
        assert!(c.r1 <= 1.2 && c.r2.finite().unwrap() <= 1.2);
        assert!(c.n_at_sample().unwrap() <= 4.0);
    }
}

#[test]
fn ids_are_one_to_eleven() {
    assert_eq!(criterion_ids().collect::<Vec<_>>(), (1..=11).collect::<Vec<_>>());
    assert!(run_criterion(12, &ValidationOptions::default()).is_none());
}
