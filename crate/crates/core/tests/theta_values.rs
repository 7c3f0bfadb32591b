//! Reference values from a 40-digit evaluation of the series and its
//! functional-equation image.

use tilt_core::theta;

const PHI: [(f64, f64); 5] = [
    (0.05, 1.040_112_747_530_877_4e-7),
    (0.3, 0.122_488_385_005_173_83),
    (1.0, 0.207_344_869_171_554_4),
    (2.0, 0.114_341_306_408_479_98),
    (5.0, 0.017_971_591_259_286_386),
];

#[test]
fn reference_values() {
    for (x, v) in PHI {
        let got = theta::phi(x);
        assert!(((got - v) / v).abs() < 1e-13, "phi({x}) = {got}, want {v}");
    }
}

#[test]
fn reference_derivatives() {
    let d1 = theta::phi_derivative(1.0, 1).unwrap();
    assert!((d1 + 0.105_343_470_268_886_18).abs() < 1e-12, "{d1}");
    let d2 = theta::phi_derivative(2.0, 2).unwrap();
    assert!((d2 - 0.042_967_189_237_483_145).abs() < 1e-12, "{d2}");
    // both branches of the evaluator agree near the switch point
    let ev = theta::ThetaEvaluator::default();
    for p in 1..=6 {
        let below = ev.phi_derivative(theta::SWITCH * (1.0 - 1e-9), p).unwrap();
        let above = ev.phi_derivative(theta::SWITCH * (1.0 + 1e-9), p).unwrap();
        assert!((below - above).abs() <= 1e-6 * above.abs().max(1e-3), "p = {p}");
    }
    assert!(theta::phi_derivative(1.0, 7).is_err());
}

#[test]
fn mass_and_residual() {
    assert!((theta::phi_integral() - 0.5).abs() < 1e-12);
    for i in 0..50 {
        let x = 0.01 * 10f64.powf(4.0 * i as f64 / 49.0);
        assert!(theta::fe_residual(x) < 1e-12, "x = {x}");
        assert!(theta::phi(x) > 0.0);
    }
}
