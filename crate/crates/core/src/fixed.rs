//! Binary fixed-point reals: a `BigInt` mantissa scaled by `2^-bits`.
//!
//! Just enough to evaluate the spectral sums exactly: the root angles are
//! produced by half-angle recursion and complex rotation, so no transcendental
//! series are needed.

use num_bigint::{BigInt, Sign};
use num_traits::{One, ToPrimitive, Zero};

#[derive(Debug, Clone, Copy)]
pub struct Fixed {
    pub bits: u64,
}

impl Fixed {
    pub fn new(bits: u64) -> Self {
        Self { bits }
    }

    pub fn one(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    pub fn from_int(&self, v: i64) -> BigInt {
        BigInt::from(v) << self.bits
    }

    pub fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.bits
    }

    pub fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << self.bits) / b
    }

    pub fn sqrt(&self, a: &BigInt) -> BigInt {
        assert!(a.sign() != Sign::Minus, "sqrt of negative fixed-point value");
        (a << self.bits).sqrt()
    }

    pub fn pow(&self, base: &BigInt, mut e: u64) -> BigInt {
        let mut acc = self.one();
        let mut b = base.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }

    /// Nearest integer to `a * 2^-(bits + extra_shift)`.
    pub fn round(&self, a: &BigInt, extra_shift: u64) -> BigInt {
        let shift = self.bits + extra_shift;
        (a + (BigInt::one() << (shift - 1))) >> shift
    }

    /// `(cos, sin)` of `pi / 2^m` for `m >= 1`.
    pub fn cos_sin_pi_over_pow2(&self, m: u32) -> (BigInt, BigInt) {
        // start at pi/2 and halve: cos(x/2) = sqrt((1 + cos x)/2),
        // sin(x/2) = sin x / (2 cos(x/2)); neither step cancels.
        let (mut c, mut s) = (BigInt::zero(), self.one());
        for _ in 1..m {
            let c_half = self.sqrt(&((self.one() + &c) >> 1u32));
            s = self.div(&s, &(&c_half << 1u32));
            c = c_half;
        }
        (c, s)
    }

    /// `(cos, sin)` of `(2j-1) pi / 2^{level+1}` for `j = 1..=count`, by
    /// rotating with `e^{2 i alpha}`.
    pub fn odd_angle_table(&self, level: u32, count: usize) -> Vec<(BigInt, BigInt)> {
        let (c1, s1) = self.cos_sin_pi_over_pow2(level + 1);
        // e^{2i alpha} = cos 2a + i sin 2a
        let c2 = self.mul(&c1, &c1) - self.mul(&s1, &s1);
        let s2 = self.mul(&c1, &s1) << 1u32;
        let mut out = Vec::with_capacity(count);
        let (mut c, mut s) = (c1, s1);
        for _ in 0..count {
            out.push((c.clone(), s.clone()));
            let next_c = self.mul(&c, &c2) - self.mul(&s, &s2);
            let next_s = self.mul(&c, &s2) + self.mul(&s, &c2);
            c = next_c;
            s = next_s;
        }
        out
    }
}

/// `a * 2^-shift` as the nearest double, without overflowing on the way.
pub fn scaled_to_f64(a: &BigInt, shift: u64) -> f64 {
    let bits = a.bits();
    if bits <= 63 {
        return ldexp(a.to_f64().unwrap_or(0.0), -(shift as i64));
    }
    let drop = bits - 63;
    let top = (a >> drop).to_f64().unwrap_or(0.0);
    ldexp(top, drop as i64 - shift as i64)
}

/// `ln(a * 2^-shift)` for positive `a`, without overflow or underflow.
pub fn ln_scaled(a: &BigInt, shift: u64) -> f64 {
    let bits = a.bits();
    let drop = bits.saturating_sub(64);
    let top = (a >> drop).to_f64().unwrap_or(0.0);
    top.ln() + (drop as f64 - shift as f64) * std::f64::consts::LN_2
}

/// `m * 2^e` with the scaling split so intermediates stay finite.
pub fn ldexp(mut m: f64, mut e: i64) -> f64 {
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
        if m == 0.0 {
            return 0.0;
        }
    }
    m * 2f64.powi(e as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angles_match_double_precision() {
        let fx = Fixed::new(200);
        for level in [0u32, 1, 3, 6] {
            let table = fx.odd_angle_table(level, 1 << level);
            for (j, (c, s)) in table.iter().enumerate() {
                let theta = (2 * j + 1) as f64 * PI / f64::from(1u32 << (level + 1));
                assert!((scaled_to_f64(c, fx.bits) - theta.cos()).abs() < 1e-15);
                assert!((scaled_to_f64(s, fx.bits) - theta.sin()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn ldexp_extremes() {
        assert_eq!(ldexp(1.0, -1074), f64::from_bits(1));
        assert_eq!(ldexp(0.75, 3), 6.0);
        assert_eq!(ldexp(1.0, -5000), 0.0);
        let big = BigInt::one() << 3000u32;
        assert_eq!(scaled_to_f64(&big, 3001), 0.5);
    }
}
