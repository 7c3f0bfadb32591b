//! Formal characters of SL2 tilting modules in characteristic 2.
//!
//! A character is a Weyl-invariant Laurent polynomial in `t`; only the
//! coefficients of non-negative powers are stored, `a_{-m} = a_m` being
//! implicit. Tilting modules are determined by their characters, so the greedy
//! top-weight decomposition below is the reference oracle every other module
//! is checked against.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Weyl-invariant Laurent polynomial with integer coefficients.
///
/// `coeffs[m]` is the coefficient of `t^m` (and of `t^{-m}`). Trailing zeros
/// are trimmed, so the zero character has no coefficients at all.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SymmetricCharacter {
    coeffs: Vec<BigInt>,
}

impl SymmetricCharacter {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Character of the trivial module, `chi(0) = 1`.
    pub fn unit() -> Self {
        Self::from_coeffs(vec![BigInt::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Coefficient of `t^m`; negative weights are reflected.
    pub fn coeff(&self, m: i64) -> BigInt {
        self.coeffs
            .get(m.unsigned_abs() as usize)
            .cloned()
            .unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Highest weight with a nonzero coefficient, `None` for the zero character.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when some coefficient is negative: the character of a virtual module.
    pub fn is_virtual(&self) -> bool {
        self.coeffs.iter().any(Signed::is_negative)
    }

    /// Evaluation at `t = 1`: `a_0 + 2 * sum_{m>0} a_m`.
    pub fn dim(&self) -> BigInt {
        let mut iter = self.coeffs.iter();
        let a0 = iter.next().cloned().unwrap_or_default();
        a0 + iter.sum::<BigInt>() * 2
    }

    /// Evaluation at `t = -1`.
    pub fn eval_minus_one(&self) -> BigInt {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| {
                let weight = if m == 0 { c.clone() } else { c * 2 };
                if m % 2 == 0 {
                    weight
                } else {
                    -weight
                }
            })
            .sum()
    }

    /// Parities of the weights carrying nonzero coefficients.
    pub fn weight_parities(&self) -> (bool, bool) {
        let mut has_even = false;
        let mut has_odd = false;
        for (m, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                if m % 2 == 0 {
                    has_even = true;
                } else {
                    has_odd = true;
                }
            }
        }
        (has_even, has_odd)
    }

    /// Sum over all weights `m` (both signs) of `a_m * m^2 / 2`.
    pub fn weight_square_index(&self) -> BigInt {
        // the two mirrored halves cancel the 1/2
        self.coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * BigInt::from(m as u64 * m as u64))
            .sum()
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::unit();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Full Laurent coefficients from `t^{-d}` to `t^d`.
    pub fn laurent(&self) -> Vec<BigInt> {
        let d = self.coeffs.len();
        if d == 0 {
            return Vec::new();
        }
        let mut full = Vec::with_capacity(2 * d - 1);
        full.extend(self.coeffs.iter().rev().cloned());
        full.extend(self.coeffs.iter().skip(1).cloned());
        full
    }
}

impl Add for &SymmetricCharacter {
    type Output = SymmetricCharacter;

    fn add(self, rhs: &SymmetricCharacter) -> SymmetricCharacter {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        SymmetricCharacter::from_coeffs(
            (0..n)
                .map(|m| self.coeff(m as i64) + rhs.coeff(m as i64))
                .collect(),
        )
    }
}

impl Sub for &SymmetricCharacter {
    type Output = SymmetricCharacter;

    fn sub(self, rhs: &SymmetricCharacter) -> SymmetricCharacter {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        SymmetricCharacter::from_coeffs(
            (0..n)
                .map(|m| self.coeff(m as i64) - rhs.coeff(m as i64))
                .collect(),
        )
    }
}

impl Mul for &SymmetricCharacter {
    type Output = SymmetricCharacter;

    /// Laurent convolution; only non-negative output weights are formed.
    fn mul(self, rhs: &SymmetricCharacter) -> SymmetricCharacter {
        multiply(self, rhs)
    }
}

pub fn multiply(a: &SymmetricCharacter, b: &SymmetricCharacter) -> SymmetricCharacter {
    if a.is_zero() || b.is_zero() {
        return SymmetricCharacter::zero();
    }
    // iterate the sparser operand's nonzero Laurent terms in the inner loop
    let (a, b) = if a.coeffs.len() >= b.coeffs.len() { (a, b) } else { (b, a) };
    let (da, db) = (a.coeffs.len() as i64 - 1, b.coeffs.len() as i64 - 1);
    let inner: Vec<(i64, &BigInt)> = (-db..=db)
        .map(|j| (j, &b.coeffs[j.unsigned_abs() as usize]))
        .filter(|(_, y)| !y.is_zero())
        .collect();
    let mut out = vec![BigInt::zero(); (da + db + 1) as usize];
    for i in -da..=da {
        let x = &a.coeffs[i.unsigned_abs() as usize];
        if x.is_zero() {
            continue;
        }
        // only non-negative output weights are formed
        for &(j, y) in &inner {
            if i + j >= 0 {
                out[(i + j) as usize] += x * y;
            }
        }
    }
    SymmetricCharacter::from_coeffs(out)
}

/// Signed dyadic support of `n`: all `2^j +- a_{j-1} 2^{j-1} +- ... +- a_0`
/// where `n + 1 = 2^j + a_{j-1} 2^{j-1} + ... + a_0`. Sorted ascending.
pub fn support(n: u64) -> Vec<u64> {
    let top = 63 - (n + 1).leading_zeros();
    let mut elems = vec![1u64 << top];
    for i in (0..top).rev() {
        if (n + 1) >> i & 1 == 1 {
            let step = 1u64 << i;
            elems = elems
                .iter()
                .flat_map(|&m| [m + step, m - step])
                .collect();
        }
    }
    elems.sort_unstable();
    elems
}

/// Character of `T(n)` from the product formula
/// `(t^{2^j} - t^{-2^j}) / (t - t^{-1}) * prod_{a_i = 1} (t^{2^i} + t^{-2^i})`.
pub fn chi(n: u64) -> SymmetricCharacter {
    let top = 63 - (n + 1).leading_zeros();
    // (t^{2^j} - t^{-2^j}) / (t - t^{-1}) = t^{2^j - 1} + t^{2^j - 3} + ... + t^{1 - 2^j}
    let lead = (1usize << top) - 1;
    let mut coeffs = vec![BigInt::zero(); lead + 1];
    for m in (lead % 2..=lead).step_by(2) {
        coeffs[m] = BigInt::one();
    }
    let mut acc = SymmetricCharacter::from_coeffs(coeffs);
    for i in 0..top {
        if (n + 1) >> i & 1 == 1 {
            let w = 1usize << i;
            let mut factor = vec![BigInt::zero(); w + 1];
            factor[w] = BigInt::one();
            acc = &acc * &SymmetricCharacter::from_coeffs(factor);
        }
    }
    acc
}

/// Character of `T(n)` as `sum_{m in supp(n)} (t^m - t^{-m}) / (t - t^{-1})`.
///
/// Independent of [`chi`]; the two routes are cross-checked in tests.
pub fn chi_from_support(n: u64) -> SymmetricCharacter {
    let supp = support(n);
    // every support element has the parity of n + 1, so the weights present
    // are w = m - 1, m - 3, ... >= 0 and the coefficient of t^w counts the
    // support elements m > w
    let top = *supp.last().expect("support is non-empty") as usize;
    let mut coeffs = vec![BigInt::zero(); top];
    let parity = (n as usize) % 2;
    let mut remaining = supp.len();
    let mut idx = 0;
    for w in (parity..top).step_by(2) {
        while idx < supp.len() && (supp[idx] as usize) <= w {
            idx += 1;
            remaining -= 1;
        }
        coeffs[w] = BigInt::from(remaining);
    }
    SymmetricCharacter::from_coeffs(coeffs)
}

/// Finite multiset of tilting summands `T(n)` with positive multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TiltingDecomposition {
    parts: BTreeMap<u64, BigUint>,
}

impl TiltingDecomposition {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `mult` copies of `T(n)`; zero multiplicities are ignored.
    pub fn insert(&mut self, n: u64, mult: BigUint) {
        if !mult.is_zero() {
            *self.parts.entry(n).or_default() += mult;
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Self {
        let mut d = Self::new();
        for (n, m) in pairs {
            d.insert(n, BigUint::from(m));
        }
        d
    }

    pub fn multiplicity(&self, n: u64) -> BigUint {
        self.parts.get(&n).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &BigUint)> {
        self.parts.iter().map(|(&n, m)| (n, m))
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of indecomposable summands counted with multiplicity.
    pub fn total(&self) -> BigUint {
        self.parts.values().sum()
    }

    pub fn character(&self) -> SymmetricCharacter {
        self.parts
            .iter()
            .fold(SymmetricCharacter::zero(), |acc, (&n, m)| {
                &acc + &chi(n).scale(&BigInt::from_biguint(Sign::Plus, m.clone()))
            })
    }
}

/// Greedy top-weight decomposition into tilting characters.
///
/// `chi(n)` has leading coefficient 1 at `t^n`, so subtracting the top
/// coefficient times `chi(top)` is forced and the result is unique.
pub fn decompose(c: &SymmetricCharacter) -> Result<TiltingDecomposition> {
    let mut rest = c.coeffs.clone();
    let mut out = TiltingDecomposition::new();
    while let Some(top) = rest.iter().rposition(|x| !x.is_zero()) {
        let mult = rest[top].clone();
        if mult.is_negative() {
            return Err(Error::NonTilting { weight: top });
        }
        let basis = chi(top as u64);
        for (m, b) in basis.coeffs.iter().enumerate() {
            if !b.is_zero() {
                rest[m] -= &mult * b;
            }
        }
        debug_assert!(rest[top].is_zero());
        rest.truncate(top);
        out.insert(top as u64, mult.to_biguint().expect("checked non-negative"));
    }
    Ok(out)
}

/// Number of indecomposable summands of `w^{tensor k}`, with multiplicity.
pub fn b_oracle(w: &SymmetricCharacter, k: u32) -> Result<BigUint> {
    Ok(decompose(&w.pow(k))?.total())
}

/// `b_oracle` for every `k` in `0..=k_max`, sharing the running power.
pub fn b_oracle_sequence(w: &SymmetricCharacter, k_max: u32) -> Result<Vec<BigUint>> {
    let mut power = SymmetricCharacter::unit();
    let mut out = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        if k > 0 {
            power = &power * w;
        }
        out.push(decompose(&power)?.total());
    }
    Ok(out)
}

/// Lossy conversion for reports.
pub fn to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ch(c: &[i64]) -> SymmetricCharacter {
        SymmetricCharacter::from_i64(c)
    }

    #[test]
    fn support_examples() {
        assert_eq!(support(0), vec![1]);
        assert_eq!(support(2), vec![1, 3]);
        assert_eq!(support(6), vec![1, 3, 5, 7]);
        assert_eq!(support(7), vec![8]);
        assert_eq!(support(4), vec![3, 5]);
    }

    #[test]
    fn support_size_is_two_to_lower_bits() {
        for n in 0..2000u64 {
            let lower_bits = (n + 1).count_ones() - 1;
            let s = support(n);
            assert_eq!(s.len(), 1 << lower_bits, "n = {n}");
            assert!(s.iter().all(|&m| m > 0));
        }
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi(0), SymmetricCharacter::unit());
        assert_eq!(chi(1), ch(&[0, 1]));
        assert_eq!(chi(2), ch(&[2, 0, 1]));
        assert_eq!(chi(3), ch(&[0, 1, 0, 1]));
    }

    #[test]
    fn dim_is_support_sum() {
        for n in 0..300u64 {
            let expected: u64 = support(n).iter().sum();
            assert_eq!(chi(n).dim(), BigInt::from(expected));
        }
    }

    #[test]
    fn both_character_formulas_agree() {
        for n in 0..=4096u64 {
            assert_eq!(chi(n), chi_from_support(n), "n = {n}");
        }
    }

    #[test]
    fn v_times_odd_weight_is_next_tilting() {
        let v = chi(1);
        for n in (1..=2047u64).step_by(2) {
            assert_eq!(&v * &chi(n), chi(n + 1), "n = {n}");
        }
    }

    #[test]
    fn multiply_examples() {
        let v = chi(1);
        assert_eq!(&v * &v, ch(&[2, 0, 1]));
        assert_eq!(&chi(5) * &SymmetricCharacter::unit(), chi(5));
        assert_eq!(&v * &chi(2), ch(&[0, 3, 0, 1]));
        assert_eq!(&v * &chi(2), &chi(3) + &chi(1).scale(&BigInt::from(2)));
    }

    #[test]
    fn decompose_examples() {
        let v = chi(1);
        assert_eq!(
            decompose(&v.pow(2)).unwrap(),
            TiltingDecomposition::from_pairs([(2, 1)])
        );
        assert_eq!(
            decompose(&v.pow(3)).unwrap(),
            TiltingDecomposition::from_pairs([(3, 1), (1, 2)])
        );
        assert_eq!(
            decompose(&v.pow(4)).unwrap(),
            TiltingDecomposition::from_pairs([(4, 1), (2, 2)])
        );
    }

    #[test]
    fn decompose_rejects_non_tilting() {
        // t^2 + t^-2 alone: subtracting chi(2) leaves -2 at weight 0
        let err = decompose(&ch(&[0, 0, 1])).unwrap_err();
        assert_eq!(err, Error::NonTilting { weight: 0 });
        assert!(decompose(&ch(&[-1])).is_err());
    }

    #[test]
    fn virtual_flag() {
        assert!(!chi(6).is_virtual());
        assert!((&chi(1) - &chi(3)).is_virtual());
    }

    #[test]
    fn b_oracle_examples() {
        let v = chi(1);
        assert_eq!(b_oracle(&v, 2).unwrap(), BigUint::from(1u32));
        assert_eq!(b_oracle(&v, 4).unwrap(), BigUint::from(3u32));
        assert_eq!(b_oracle(&v, 6).unwrap(), BigUint::from(9u32));
        let seq: Vec<u32> = b_oracle_sequence(&v, 6)
            .unwrap()
            .iter()
            .map(|b| b.to_u32().unwrap())
            .collect();
        assert_eq!(seq, vec![1, 1, 1, 3, 3, 9, 9]);
    }

    #[test]
    fn weight_index_examples() {
        assert_eq!(chi(1).weight_square_index(), BigInt::from(1));
        assert_eq!(chi(3).weight_square_index(), BigInt::from(10));
        assert_eq!(chi(3).eval_minus_one(), BigInt::from(-4));
    }

    fn small_multiset() -> impl Strategy<Value = Vec<(u64, u64)>> {
        proptest::collection::vec((0u64..40, 1u64..1000), 1..8)
    }

    proptest! {
        #[test]
        fn decompose_round_trips(parts in small_multiset()) {
            let d = TiltingDecomposition::from_pairs(parts);
            prop_assert_eq!(decompose(&d.character()).unwrap(), d);
        }

        #[test]
        fn dimension_is_multiplicative(a in 0u64..200, b in 0u64..200) {
            let (x, y) = (chi(a), chi(b));
            prop_assert_eq!((&x * &y).dim(), x.dim() * y.dim());
        }
    }
}
