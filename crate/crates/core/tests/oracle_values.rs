//! Values frozen from an independent computation of tilting characters by the
//! tensor product formula `T(2m+1) = T(1) (x) T(m)^[1]`,
//! `T(2m+2) = T(2) (x) T(m)^[1]`.

use num_bigint::{BigInt, BigUint};
use tilt_core::charring::{self, SymmetricCharacter, TiltingDecomposition};
use tilt_core::tiltbound::{self, TiltingPoly};
use tilt_core::{fusion, genfun, spectral};

const B_V: [u64; 25] = [
    1, 1, 1, 3, 3, 9, 9, 29, 29, 99, 99, 351, 351, 1273, 1273, 4679, 4679, 17341, 17341, 64637,
    64637, 242019, 242019, 909789, 909789,
];
const B_T2: [u64; 13] = [1, 1, 3, 9, 29, 99, 351, 1273, 4679, 17341, 64637, 242019, 909789];
const B_T3: [u64; 13] = [1, 1, 1, 9, 15, 101, 181, 1273, 2365, 17257, 32697, 243541, 466203];
const B_T0_T1: [u64; 13] = [1, 2, 4, 10, 26, 70, 190, 520, 1432, 3970, 11078, 31108, 87868];

/// `x_{n,10}` for `n = 0..=10`.
const X_COL_10: [u64; 11] = [0, 512, 22288, 15504, 15504, 6972, 2906, 780, 152, 18, 1];

fn big(v: &[u64]) -> Vec<BigUint> {
    v.iter().map(|&x| BigUint::from(x)).collect()
}

#[test]
fn characters() {
    assert_eq!(charring::chi(5), SymmetricCharacter::from_i64(&[0, 2, 0, 1, 0, 1]));
    assert_eq!(charring::chi(6), SymmetricCharacter::from_i64(&[4, 0, 3, 0, 2, 0, 1]));
    assert_eq!(
        charring::chi(11),
        SymmetricCharacter::from_i64(&[0, 2, 0, 2, 0, 1, 0, 1, 0, 1, 0, 1])
    );
    for n in 0..200 {
        assert_eq!(charring::chi(n), charring::chi_from_support(n), "n = {n}");
    }
}

#[test]
fn b_sequences_from_characters() {
    let v = charring::chi(1);
    assert_eq!(charring::b_oracle_sequence(&v, 24).unwrap(), big(&B_V));
    assert_eq!(charring::b_oracle_sequence(&charring::chi(2), 12).unwrap(), big(&B_T2));
    assert_eq!(charring::b_oracle_sequence(&charring::chi(3), 12).unwrap(), big(&B_T3));
    let w = &charring::chi(0) + &charring::chi(1);
    assert_eq!(charring::b_oracle_sequence(&w, 12).unwrap(), big(&B_T0_T1));
}

#[test]
fn b_sequence_from_fusion_graph() {
    let even: Vec<u64> = B_V.iter().step_by(2).copied().collect();
    assert_eq!(fusion::b_sequence(12), big(&even));
}

#[test]
fn column_values() {
    let cols = fusion::columns(10, 10);
    let row: Vec<BigUint> = cols.iter().map(|c| c[10].clone()).collect();
    assert_eq!(row, big(&X_COL_10));
    let eight = genfun::coefficients(&genfun::x_power_of_two(3), 12);
    assert_eq!(
        eight[8..].to_vec(),
        [1, 16, 152, 1120, 7084].iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()
    );
    for (n, &x) in X_COL_10.iter().enumerate().skip(1) {
        assert_eq!(spectral::coeff_general(n as u64, 10).unwrap().round(), x as f64, "n = {n}");
        assert_eq!(spectral::coeff_general_exact(n as u64, 10).unwrap(), BigInt::from(x));
    }
}

#[test]
fn multiplicities_in_t3_powers() {
    let t3 = TiltingPoly::of_tilting(3);
    let square = charring::decompose(&t3.character().pow(2)).unwrap();
    assert_eq!(square, TiltingDecomposition::from_pairs([(6, 1)]));
    let expected = [0u64, 32, 24, 56, 30, 24];
    for (i, &e) in expected.iter().enumerate() {
        let n = i as u64 + 1;
        assert_eq!(tiltbound::oracle_multiplicity(&t3, n, 6).unwrap(), BigUint::from(e));
        assert_eq!(tiltbound::mu_n(&t3, n, 6).unwrap().round(), e as f64);
    }
}
