//! Closed-form correlations checked against simulated ensembles, plus
//! structural invariants that tie the three regimes together.

use proptest::prelude::*;
use spectral_corr::corrkernel::{
    bochner_corr, correlation, inverse_tc_bounds, inverse_tc_corr, markov_corr, CorrelationQuery, Pairing, Regime,
};
use spectral_corr::simulate::{lag_correlations, simulate, SimConfig};
use spectral_corr::{EigenSystem, SubordinatorSpec};

/// Simulates `regime` on `grid` and returns `(estimate - closed form) / se` per lag.
fn z_scores(regime: Regime, grid: Vec<f64>, paths: usize, seed: u64) -> Vec<f64> {
    let sys = EigenSystem::classical(1.0).unwrap();
    let config = SimConfig::new(paths, seed, grid, 1.0).unwrap().with_regime(regime.clone());
    let set = simulate(&config).unwrap();
    lag_correlations(&set, &sys, 1)
        .unwrap()
        .into_iter()
        .map(|lag| {
            let q = CorrelationQuery::new(1, 1, lag.t, lag.s, Pairing::PP, regime.clone()).unwrap();
            let exact = correlation(&sys, &q).unwrap();
            (lag.estimate.estimate - exact) / lag.estimate.standard_error
        })
        .collect()
}

#[test]
fn markov_ensemble_matches_closed_form() {
    for z in z_scores(Regime::Markov, vec![0.5, 1.0, 2.0], 20_000, 11) {
        assert!(z.abs() < 4.0, "z = {z}");
    }
}

#[test]
fn bochner_stable_ensemble_matches_closed_form() {
    let regime = Regime::Bochner(SubordinatorSpec::stable(0.5).unwrap());
    for z in z_scores(regime, vec![0.5, 1.5, 3.0], 20_000, 12) {
        assert!(z.abs() < 4.0, "z = {z}");
    }
}

#[test]
fn inverse_poisson_ensemble_matches_closed_form() {
    let regime = Regime::Inverse(SubordinatorSpec::poisson(1.0).unwrap());
    for z in z_scores(regime, vec![0.5, 1.5, 3.0], 20_000, 13) {
        assert!(z.abs() < 4.0, "z = {z}");
    }
}

#[test]
fn pure_drift_reduces_to_rescaled_markov() {
    let sys = EigenSystem::small_perturbation(2.0).unwrap();
    let spec = SubordinatorSpec::drift(1.0).unwrap();
    for m in 1..=4 {
        let q = CorrelationQuery::new(m, m, 2.0, 0.5, Pairing::PP, Regime::Markov).unwrap();
        let markov = markov_corr(&sys, &q).unwrap();
        assert!((bochner_corr(&sys, &spec, &q).unwrap() - markov).abs() < 1e-14);
        assert!((inverse_tc_corr(&sys, &spec, &q).unwrap() - markov).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_stable_correlation_is_sandwiched(
        alpha in 0.2f64..0.9,
        m in 1usize..5,
        s in 0.1f64..3.0,
        gap in 0.0f64..10.0,
    ) {
        let sys = EigenSystem::classical(1.0).unwrap();
        let spec = SubordinatorSpec::stable(alpha).unwrap();
        let q = CorrelationQuery::new(m, m, s + gap, s, Pairing::PP, Regime::Inverse(spec.clone())).unwrap();
        let value = inverse_tc_corr(&sys, &spec, &q).unwrap();
        let (lo, hi) = inverse_tc_bounds(&sys, &spec, &q).unwrap();
        let slack = 1e-8 * hi.abs().max(1.0);
        prop_assert!(lo - slack <= value && value <= hi + slack, "{lo} <= {value} <= {hi}");
    }

    #[test]
    fn subordinated_clocks_decorrelate_no_faster_than_needed(
        alpha in 0.2f64..0.95,
        lag in 0.01f64..20.0,
    ) {
        // φ(λ) = λ^α, so for λ_1 = 1 every Bochner-stable kernel coincides
        // with the Markov one; for λ_2 = 2 it decays strictly slower.
        let sys = EigenSystem::classical(1.0).unwrap();
        let spec = SubordinatorSpec::stable(alpha).unwrap();
        let q1 = CorrelationQuery::new(1, 1, lag, 0.0, Pairing::PP, Regime::Markov).unwrap();
        let q2 = CorrelationQuery::new(2, 2, lag, 0.0, Pairing::PP, Regime::Markov).unwrap();
        let b1 = bochner_corr(&sys, &spec, &q1).unwrap();
        prop_assert!((b1 - markov_corr(&sys, &q1).unwrap()).abs() < 1e-14);
        prop_assert!(bochner_corr(&sys, &spec, &q2).unwrap() > markov_corr(&sys, &q2).unwrap());
    }

    #[test]
    fn correlations_lie_in_unit_interval(
        m in 0usize..6,
        n in 0usize..6,
        t in 0.0f64..5.0,
        s in 0.0f64..5.0,
    ) {
        let sys = EigenSystem::small_perturbation(2.0).unwrap();
        let q = CorrelationQuery::new(m, n, t, s, Pairing::PP, Regime::Markov).unwrap();
        let value = correlation(&sys, &q).unwrap();
        prop_assert!(value.abs() <= 1.0 + 1e-12, "{value}");
    }
}
