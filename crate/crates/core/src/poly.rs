//! Dense integer polynomials in one variable, lowest degree first.
//!
//! Only what the generating-function and tilting-polynomial code needs:
//! ring operations, exact evaluation at rationals and at floats, and a
//! Kronecker-substitution product for the large squarings that appear when
//! iterating `x -> x^2 - 2`.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};

/// Below this many coefficient products the schoolbook product wins.
const KRONECKER_THRESHOLD: usize = 4096;

pub fn trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn trimmed(mut p: Vec<BigInt>) -> Vec<BigInt> {
    trim(&mut p);
    p
}

pub fn monomial(degree: usize, coeff: BigInt) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(); degree + 1];
    p[degree] = coeff;
    trimmed(p)
}

pub fn from_i64(coeffs: &[i64]) -> Vec<BigInt> {
    trimmed(coeffs.iter().map(|&c| BigInt::from(c)).collect())
}

pub fn sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x - y,
            (Some(x), None) => x.clone(),
            (None, Some(y)) => -y,
            (None, None) => unreachable!(),
        })
        .collect();
    trimmed(out)
}

pub fn scale(a: &[BigInt], c: &BigInt) -> Vec<BigInt> {
    trimmed(a.iter().map(|x| x * c).collect())
}

pub fn mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len().saturating_mul(b.len()) >= KRONECKER_THRESHOLD {
        kronecker_mul(a, b)
    } else {
        schoolbook_mul(a, b)
    }
}

pub fn schoolbook_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trimmed(out)
}

/// Pack both operands into single integers at base `2^slot`, multiply once,
/// and unpack with balanced digits so signed coefficients survive.
fn kronecker_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let max_bits = |p: &[BigInt]| p.iter().map(|c| c.bits()).max().unwrap_or(0);
    let terms = a.len().min(b.len()) as u64;
    let bound_bits = max_bits(a) + max_bits(b) + 64 - terms.leading_zeros() as u64;
    // headroom so balanced digits never reach +-2^(slot-1)
    let slot = bound_bits + 2;

    let product = pack(a, slot) * pack(b, slot);
    let n = a.len() + b.len() - 1;
    let negative = product.sign() == Sign::Minus;
    let limbs = product.magnitude().to_u64_digits();

    let half = BigUint::one() << (slot - 1);
    let full = BigUint::one() << slot;
    let mut out = Vec::with_capacity(n);
    let mut carry = false;
    for i in 0..n {
        let mut digit = extract_bits(&limbs, i as u64 * slot, slot);
        if carry {
            digit += 1u32;
        }
        let value = if digit >= half {
            carry = true;
            -BigInt::from_biguint(Sign::Plus, &full - &digit)
        } else {
            carry = false;
            BigInt::from_biguint(Sign::Plus, digit)
        };
        out.push(if negative { -value } else { value });
    }
    debug_assert!(!carry);
    trimmed(out)
}

/// `sum c_i 2^(slot*i)` built by placing magnitudes directly into limbs.
fn pack(p: &[BigInt], slot: u64) -> BigInt {
    let words = ((p.len() as u64 * slot) / 64 + 2) as usize;
    let mut pos = vec![0u64; words];
    let mut neg = vec![0u64; words];
    for (i, c) in p.iter().enumerate() {
        let target = match c.sign() {
            Sign::Plus => &mut pos,
            Sign::Minus => &mut neg,
            Sign::NoSign => continue,
        };
        place_bits(target, i as u64 * slot, &c.magnitude().to_u64_digits());
    }
    BigInt::from_biguint(Sign::Plus, BigUint::from_slice(&to_u32(&pos)))
        - BigInt::from_biguint(Sign::Plus, BigUint::from_slice(&to_u32(&neg)))
}

fn to_u32(words: &[u64]) -> Vec<u32> {
    words
        .iter()
        .flat_map(|&w| [w as u32, (w >> 32) as u32])
        .collect()
}

fn place_bits(buf: &mut [u64], offset: u64, value: &[u64]) {
    let (word, shift) = ((offset / 64) as usize, offset % 64);
    for (j, &v) in value.iter().enumerate() {
        buf[word + j] |= v << shift;
        if shift > 0 {
            buf[word + j + 1] |= v >> (64 - shift);
        }
    }
}

fn extract_bits(limbs: &[u64], offset: u64, len: u64) -> BigUint {
    let first = (offset / 64) as usize;
    if first >= limbs.len() {
        return BigUint::zero();
    }
    let last = (((offset + len) / 64 + 1) as usize).min(limbs.len());
    let window = BigUint::from_slice(&to_u32(&limbs[first..last]));
    let shifted = window >> (offset % 64);
    let mask = (BigUint::one() << len) - 1u32;
    shifted & mask
}

pub fn derivative(a: &[BigInt]) -> Vec<BigInt> {
    trimmed(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect(),
    )
}

pub fn eval_int(a: &[BigInt], x: &BigInt) -> BigInt {
    a.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// `q^d a(p/q) = sum a_i p^i q^(d-i)`, an integer when `d >= deg a`.
pub fn eval_homogeneous(a: &[BigInt], p: &BigInt, q: &BigInt, d: usize) -> BigInt {
    assert!(a.len() <= d + 1, "degree exceeds homogenising degree");
    let mut acc = BigInt::zero();
    let mut p_pow = BigInt::one();
    for i in 0..=d {
        acc *= q;
        if let Some(c) = a.get(i) {
            if !c.is_zero() {
                acc += c * &p_pow;
            }
        }
        if i < d {
            p_pow *= p;
        }
    }
    acc
}

pub fn eval_f64(a: &[BigInt], x: f64) -> f64 {
    a.iter()
        .rev()
        .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
}

pub fn is_even_function(a: &[BigInt]) -> bool {
    a.iter().skip(1).step_by(2).all(Zero::is_zero)
}

pub fn is_odd_function(a: &[BigInt]) -> bool {
    a.iter().step_by(2).all(Zero::is_zero)
}
