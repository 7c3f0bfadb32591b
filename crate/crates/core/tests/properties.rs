use num_bigint::BigUint;
use proptest::prelude::*;
use tilt_core::charring::{self, TiltingDecomposition};
use tilt_core::tiltbound::{self, TiltingPoly};
use tilt_core::{fusion, limitfn, spectral, theta};

fn decomposition(max_weight: u64) -> impl Strategy<Value = TiltingDecomposition> {
    prop::collection::vec((0..=max_weight, 1u64..4), 1..5)
        .prop_filter("non-trivial", |parts| parts.iter().any(|&(w, _)| w > 0))
        .prop_map(TiltingDecomposition::from_pairs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poly_round_trip(d in decomposition(12)) {
        let q = tiltbound::poly_of_tilting(&d);
        prop_assert!(q.degree().unwrap() <= 12);
        prop_assert_eq!(q.decomposition().unwrap(), d.clone());
        let again = TiltingPoly::from_coeffs(q.coeffs().to_vec());
        prop_assert_eq!(tiltbound::poly_of_character(again.character()), q.coeffs().to_vec());
        prop_assert_eq!(q.dim(), d.character().dim());
    }

    #[test]
    fn lemma_q_holds(d in decomposition(8)) {
        let q = tiltbound::poly_of_tilting(&d);
        prop_assert!(tiltbound::lemma_q_check(&q, 200).unwrap().all());
    }

    #[test]
    fn mu_rounds_to_oracle(d in decomposition(3), n in 1u64..=15, k in 0u32..=8) {
        let q = tiltbound::poly_of_tilting(&d);
        prop_assume!(q.dim() <= 6.into());
        let exact = charring::to_f64(&tiltbound::oracle_multiplicity(&q, n, k).unwrap());
        prop_assert_eq!(tiltbound::mu_n(&q, n, k).unwrap().round(), exact);
    }

    #[test]
    fn product_decomposes(a in 0u64..40, b in 0u64..40) {
        let p = &charring::chi(a) * &charring::chi(b);
        prop_assert_eq!(p.dim(), charring::chi(a).dim() * charring::chi(b).dim());
        prop_assert_eq!(charring::decompose(&p).unwrap().character(), p);
    }

    #[test]
    fn partial_fractions_match_dp(n in 1u64..48, k in 0u64..48) {
        let col = &fusion::columns(n, k)[n as usize];
        let exact = charring::to_f64(&col[k as usize]);
        let approx = spectral::coeff_general(n, k).unwrap();
        prop_assert!((approx - exact).abs() <= 1e-12 * exact.max(1.0));
        prop_assert_eq!(
            spectral::coeff_general_exact(n, k).unwrap(),
            BigUint::from(col[k as usize].clone()).into()
        );
    }

    #[test]
    fn theta_functional_equation(e in -2.0f64..2.0) {
        let x = 10f64.powf(e);
        prop_assert!(theta::fe_residual(x) < 1e-12);
        prop_assert!(theta::phi(x) > 0.0);
    }

    #[test]
    fn reduce_lands_in_fundamental_interval(e in -30.0f64..30.0) {
        let x = 2f64.powf(e);
        let (y, k) = limitfn::reduce(x);
        prop_assert!((1.0..4.0).contains(&y));
        prop_assert!((y * 4f64.powi(k) - x).abs() <= 1e-12 * x);
    }
}
