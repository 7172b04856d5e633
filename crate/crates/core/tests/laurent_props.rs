use mahler_core::recurrence::{iterate_symbolic, RecurrenceDef, SymbolicBudget, System};
use mahler_core::LaurentPoly;
use num_bigint::BigInt;
use proptest::prelude::*;

fn poly(nvars: usize) -> impl Strategy<Value = LaurentPoly> {
    proptest::collection::vec((proptest::collection::vec(-3i32..=3, nvars), -9i64..=9), 0..=8)
        .prop_map(move |terms| LaurentPoly::from_terms(nvars, terms.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
}

fn triple() -> impl Strategy<Value = (LaurentPoly, LaurentPoly, LaurentPoly)> {
    (1usize..=5).prop_flat_map(|n| (poly(n), poly(n), poly(n)))
}

fn rel(a: num_complex::Complex64, b: num_complex::Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_laws((p, q, s) in triple()) {
        prop_assert_eq!(p.try_add(&q).unwrap(), q.try_add(&p).unwrap());
        prop_assert_eq!(p.try_mul(&q).unwrap(), q.try_mul(&p).unwrap());
        prop_assert_eq!(
            p.try_add(&q).unwrap().try_add(&s).unwrap(),
            p.try_add(&q.try_add(&s).unwrap()).unwrap()
        );
        prop_assert_eq!(
            p.try_mul(&q).unwrap().try_mul(&s).unwrap(),
            p.try_mul(&q.try_mul(&s).unwrap()).unwrap()
        );
        prop_assert_eq!(
            p.try_mul(&q.try_add(&s).unwrap()).unwrap(),
            p.try_mul(&q).unwrap().try_add(&p.try_mul(&s).unwrap()).unwrap()
        );
        prop_assert!(p.try_sub(&p).unwrap().is_zero());
    }

    #[test]
    fn evaluation_is_a_homomorphism(
        (p, q, _) in triple(),
        angles in proptest::collection::vec(proptest::collection::vec(-3.2..3.2f64, 5), 100),
    ) {
        let sum = p.try_add(&q).unwrap();
        let prod = p.try_mul(&q).unwrap();
        for a in &angles {
            let a = &a[..p.nvars()];
            let (vp, vq) = (p.eval_on_torus(a).to_complex(), q.eval_on_torus(a).to_complex());
            prop_assert!(rel(sum.eval_on_torus(a).to_complex(), vp + vq) <= 1e-12);
            let scale = vp.norm().max(1.0) * vq.norm().max(1.0);
            let e = (prod.eval_on_torus(a).to_complex() - vp * vq).norm() / scale;
            prop_assert!(e <= 1e-12, "product error {}", e);
        }
    }

    #[test]
    fn exact_division_undoes_multiplication((p, q, _) in triple()) {
        prop_assume!(!q.is_zero());
        let prod = p.try_mul(&q).unwrap();
        prop_assert_eq!(prod.div_exact(&q).unwrap(), p);
    }
}

#[test]
fn dvector_is_minus_the_minimum_exponent() {
    for (sys, n) in [(System::Rank2(3), 8), (System::Markoff, 9), (System::Somos4, 12), (System::Hv, 8)] {
        let orbit = iterate_symbolic(&RecurrenceDef::builtin(sys), n, SymbolicBudget::default()).unwrap();
        for p in &orbit.values {
            let d = p.dvector().unwrap();
            for (j, dj) in d.0.iter().enumerate() {
                let min = p.terms().map(|(e, _)| e[j] as i64).min().unwrap();
                assert_eq!(*dj, -min, "{sys}");
            }
        }
    }
}
