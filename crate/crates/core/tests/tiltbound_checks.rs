use tilt_core::tiltbound::{self, Parity, TiltingPoly};

#[test]
fn mu_matches_oracle_for_basic_modules() {
    for q in [TiltingPoly::from_i64(&[0, 1]), TiltingPoly::from_i64(&[0, 0, 1]), TiltingPoly::from_i64(&[0, -2, 0, 1])] {
        for n in 1..=15u64 {
            for k in 0..=12u32 {
                let exact = tiltbound::oracle_multiplicity(&q, n, k).unwrap();
                let exact = tilt_core::charring::to_f64(&exact);
                let mu = tiltbound::mu_n(&q, n, k).unwrap();
                assert_eq!(mu.round(), exact, "Q = {:?}, n = {n}, k = {k}", q.coeffs());
                if exact != 0.0 {
                    assert!(((mu - exact) / exact).abs() <= 1e-8);
                }
            }
        }
    }
}

#[test]
fn lemma_q_on_random_corpus() {
    let corpus = tiltbound::random_effective_corpus(20, 8, 7);
    let parities: Vec<Parity> = corpus.iter().map(|q| q.parity()).collect();
    assert!(parities.contains(&Parity::Even) && parities.contains(&Parity::Odd));
    assert!(parities.contains(&Parity::Mixed));
    for q in &corpus {
        assert!(q.degree().unwrap() <= 8);
        let r = tiltbound::lemma_q_check(q, 400).unwrap();
        assert!(r.all(), "{:?}: {r:?}", q.coeffs());
        let (even, odd) = q.decomposition().unwrap().iter().fold((false, false), |(e, o), (n, _)| {
            (e || n % 2 == 0, o || n % 2 == 1)
        });
        let expected = match (even, odd) {
            (true, false) => Parity::Even,
            (false, true) => Parity::Odd,
            _ => Parity::Mixed,
        };
        assert_eq!(q.parity(), expected);
    }
}

#[test]
fn witnesses() {
    for n in [1, 2, 3] {
        let q = TiltingPoly::of_tilting(n);
        let r = tiltbound::lower_bound_witness(&q, 1, 30).unwrap();
        assert!(r.c_w > 0.0 && r.tail_non_vanishing, "T({n}): {r:?}");
        assert_eq!(r.odd_steps_monotone, (n % 2 == 1).then_some(true));
    }
    assert!(tiltbound::lower_bound_witness(&TiltingPoly::from_i64(&[3]), 1, 5).is_err());
}

#[test]
fn pnprime_examples() {
    for j in [1, 3, 5, 7] {
        assert!(tiltbound::pnprime_ratio_check(6, j).unwrap());
    }
    for n in [12u64, 13, 22, 63, 100] {
        let (worst, _) = tiltbound::pnprime_all_roots(n).unwrap();
        assert!(worst >= 1.0, "n = {n}: {worst}");
    }
}
