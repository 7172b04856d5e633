use mahler_core::entropy::{
    compare_entropies, fit_sequence, height, ln_bigint, log_height, mahler_entropy_fit, symbolic_degree_profile,
    tropical_degree_profile, EntropyBudgets, FitKind,
};
use mahler_core::mahler::{orbit_mahler_sequence, SamplerConfig};
use mahler_core::recurrence::{RecurrenceDef, SymbolicBudget, System};
use mahler_core::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn height_matches_reduced_fraction(p in -1_000_000i64..=1_000_000, q in 1i64..=1_000_000) {
        let g = p.gcd(&q);
        let want = if p == 0 { 1 } else { (p / g).abs().max(q / g) };
        let r = Rational::new(BigInt::from(p), BigInt::from(q));
        prop_assert_eq!(height(&r), BigInt::from(want));
        prop_assert!((log_height(&r) - (want as f64).ln()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ln_bigint_beyond_double_range(base in 2u32..1000, k in 1u32..3000) {
        let n = BigInt::from(base).pow(k);
        let want = k as f64 * (base as f64).ln();
        prop_assert!((ln_bigint(&n) - want).abs() <= 1e-13 * want);
        prop_assert_eq!(ln_bigint(&-n), ln_bigint(&BigInt::from(base).pow(k)));
    }

    #[test]
    fn exponential_fit_recovers_rate(rate in 0.05..1.5f64, scale in 0.1..10.0f64) {
        let pts: Vec<(usize, f64)> = (1..=30).map(|n| (n, scale * (rate * n as f64).exp())).collect();
        let fit = fit_sequence(&pts, FitKind::Exponential, None).unwrap();
        prop_assert!((fit.slope - rate).abs() < 1e-10);
        prop_assert!((fit.two_point.unwrap() - rate).abs() < 1e-10);
    }
}

#[test]
fn tropical_degrees_match_expansion() {
    for (sys, n) in [(System::Rank2(2), 14), (System::Rank2(3), 8), (System::Markoff, 9), (System::Somos4, 13)] {
        let def = RecurrenceDef::builtin(sys);
        let (sym, truncated) = symbolic_degree_profile(&def, n, SymbolicBudget::default()).unwrap();
        assert!(!truncated, "{sys}");
        assert_eq!(sym, tropical_degree_profile(&def, n).unwrap(), "{sys}");
    }
}

#[test]
fn two_point_and_regression_slopes_agree() {
    // degrees of the rank-2 r = 3 map grow like phi^2n
    let def = RecurrenceDef::builtin(System::Rank2(3));
    let degs = tropical_degree_profile(&def, 40).unwrap();
    let pts: Vec<(usize, f64)> = degs.iter().enumerate().map(|(i, d)| (i + 1, d.degree as f64)).collect();
    let fit = fit_sequence(&pts, FitKind::Exponential, None).unwrap();
    assert!((fit.slope - fit.two_point.unwrap()).abs() < 2e-3);

    let cfg = SamplerConfig::monte_carlo(2000, 11);
    let seq = orbit_mahler_sequence::<f64>(&RecurrenceDef::builtin(System::Rank2(2)), 100, &cfg, &[]).unwrap();
    let fit = mahler_entropy_fit(&seq, FitKind::Linear, Some((50, 100))).unwrap();
    assert!((fit.slope - fit.two_point.unwrap()).abs() < 2e-3, "{} vs {:?}", fit.slope, fit.two_point);
}

#[test]
fn mahler_entropy_does_not_exceed_diophantine() {
    for system in [System::Rank2(3), System::Markoff, System::Somos4] {
        let budgets = EntropyBudgets {
            degree_n: 20,
            height_n: 24,
            mahler_n: 40,
            mahler_window: Some((20, 40)),
            sampler: SamplerConfig::monte_carlo(2000, 3),
            ..EntropyBudgets::for_system(system)
        };
        let report = compare_entropies(system, &budgets);
        assert_eq!(report.ordering_holds, Some(true), "{system}: {report:?}");
        assert!(report.algebraic.slope().is_some(), "{system}");
    }
}

#[test]
fn periodic_map_has_zero_entropy() {
    let budgets = EntropyBudgets { sampler: SamplerConfig::monte_carlo(500, 1), ..EntropyBudgets::default() };
    let report = compare_entropies(System::Lyness, &budgets);
    assert_eq!(report.algebraic.slope(), Some(0.0));
    // heights cycle through 1, 1, 2, 3, 2
    let h = report.diophantine.slope().unwrap();
    assert!(h.abs() < 0.1, "{h}");
    assert!(report.diophantine.growth.is_some());
}
