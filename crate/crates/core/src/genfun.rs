//! Rational generating functions `X_n(t) = sum_k x_{n,k} t^k`.
//!
//! `X_{2^s} = t^{2^s} / D_s` where `D_0 = 1 - 2t` and
//! `D_{s+1} = D_s^2 - 2 t^{2^{s+1}}`; this is `1/F^s(1/t - 2)` with
//! `F(y) = y^2 - 2`, cleared of negative powers. General `X_n` is the product
//! over the binary digits of `n`.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fusion;
use crate::poly;

/// `numerator / denominator` as a power series in `t`; the denominator has
/// constant term 1 so coefficients are integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalGF {
    numerator: Vec<BigInt>,
    denominator: Vec<BigInt>,
}

impl RationalGF {
    pub fn new(numerator: Vec<BigInt>, denominator: Vec<BigInt>) -> Result<Self> {
        let denominator = poly::trimmed(denominator);
        if denominator.first() != Some(&BigInt::one()) {
            return Err(Error::InvalidInput(
                "denominator must have constant term 1".into(),
            ));
        }
        Ok(Self { numerator: poly::trimmed(numerator), denominator })
    }

    pub fn one() -> Self {
        Self { numerator: vec![BigInt::one()], denominator: vec![BigInt::one()] }
    }

    pub fn numerator(&self) -> &[BigInt] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[BigInt] {
        &self.denominator
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            numerator: poly::mul(&self.numerator, &other.numerator),
            denominator: poly::mul(&self.denominator, &other.denominator),
        }
    }

    /// Equality as rational functions, by cross-multiplication.
    pub fn same_function(&self, other: &Self) -> bool {
        poly::mul(&self.numerator, &other.denominator)
            == poly::mul(&other.numerator, &self.denominator)
    }

    /// Exact value at `x`; fails if `x` is a pole.
    pub fn eval_at_rational(&self, x: &BigRational) -> Result<BigRational> {
        let d = self.numerator.len().max(self.denominator.len()).max(1) - 1;
        let (p, q) = (x.numer(), x.denom());
        let num = poly::eval_homogeneous(&self.numerator, p, q, d);
        let den = poly::eval_homogeneous(&self.denominator, p, q, d);
        if den.is_zero() {
            return Err(Error::InvalidInput(format!("{x} is a pole")));
        }
        Ok(BigRational::new(num, den))
    }
}

/// `D_0, ..., D_{s_max}`.
pub fn denominators(s_max: u32) -> Vec<Vec<BigInt>> {
    let mut out = Vec::with_capacity(s_max as usize + 1);
    let mut d = poly::from_i64(&[1, -2]);
    for s in 0..=s_max {
        if s > 0 {
            let square = poly::mul(&d, &d);
            d = poly::sub(&square, &poly::monomial(1 << s, BigInt::from(2)));
        }
        out.push(d.clone());
    }
    out
}

pub fn x_power_of_two(s: u32) -> RationalGF {
    let d = denominators(s).pop().expect("non-empty");
    RationalGF { numerator: poly::monomial(1 << s, BigInt::one()), denominator: d }
}

/// `X_n` for `n >= 1` as the product of `X_{2^s}` over the set bits of `n`.
pub fn x_general(n: u64) -> Result<RationalGF> {
    if n == 0 {
        return Err(Error::InvalidInput("x_general needs n >= 1".into()));
    }
    let top = 63 - n.leading_zeros();
    let ds = denominators(top);
    let mut out = RationalGF::one();
    for s in (0..=top).filter(|s| n >> s & 1 == 1) {
        let factor = RationalGF {
            numerator: poly::monomial(1 << s, BigInt::one()),
            denominator: ds[s as usize].clone(),
        };
        out = out.mul(&factor);
    }
    Ok(out)
}

/// First `k_max + 1` series coefficients, by the recurrence
/// `c_k = num_k - sum_{i >= 1} den_i c_{k-i}`.
pub fn coefficients(f: &RationalGF, k_max: usize) -> Vec<BigInt> {
    let mut c: Vec<BigInt> = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut v = f.numerator.get(k).cloned().unwrap_or_default();
        for (i, d) in f.denominator.iter().enumerate().skip(1).take(k) {
            if !d.is_zero() {
                v -= d * &c[k - i];
            }
        }
        c.push(v);
    }
    c
}

/// `X_{2^{s+1}} = X_{2^s}^2 / (1 - 2 X_{2^s}^2)`, evaluated with generic
/// rational-function arithmetic and compared by cross-multiplication.
pub fn recurrence_check(s: u32) -> bool {
    let ds = denominators(s + 1);
    let m = 1usize << s;
    let (a, b) = (poly::monomial(m, BigInt::one()), &ds[s as usize]);
    // X^2 = a^2 / b^2; 1 - 2X^2 = (b^2 - 2a^2) / b^2
    let (a2, b2) = (poly::mul(&a, &a), poly::mul(b, b));
    let rhs_num = poly::mul(&a2, &b2);
    let rhs_den = poly::mul(&b2, &poly::sub(&b2, &poly::scale(&a2, &BigInt::from(2))));
    let lhs_num = poly::monomial(2 * m, BigInt::one());
    let lhs_den = &ds[s as usize + 1];
    poly::mul(&lhs_num, &rhs_den) == poly::mul(&rhs_num, lhs_den)
}

/// `F^s(1/t - 2) * X_{2^s}(t) = 1` as a truncated series through `t^order`,
/// with `X_{2^s}` taken from the fusion-graph path counts rather than from
/// the closed form.
pub fn prop_f_series_check(s: u32, order: usize) -> bool {
    let m = 1usize << s;
    // g[j] is the coefficient of t^{-j} in F^s(1/t - 2)
    let mut g = poly::from_i64(&[-2, 1]);
    for _ in 0..s {
        g = poly::sub(&poly::mul(&g, &g), &poly::from_i64(&[2]));
    }
    debug_assert_eq!(g.len(), m + 1);
    let column = fusion::columns(m as u64, (order + m) as u64).swap_remove(m);
    (0..=order).all(|e| {
        let v: BigInt = g
            .iter()
            .enumerate()
            .map(|(j, gj)| gj * BigInt::from_biguint(Sign::Plus, column[e + j].clone()))
            .sum();
        v == if e == 0 { BigInt::one() } else { BigInt::zero() }
    })
}

/// Series of `X_n` for `n = 0..=n_max` through `t^order`, from the product rule.
pub fn product_rule_series(n_max: u64, order: usize) -> Result<Vec<Vec<BigInt>>> {
    let mut out = vec![{
        let mut one = vec![BigInt::zero(); order + 1];
        one[0] = BigInt::one();
        one
    }];
    for n in 1..=n_max {
        out.push(coefficients(&x_general(n)?, order));
    }
    Ok(out)
}

/// `X_n = t (X_{n-1} + 2 sum_{i=0}^{r} X_{2^i + n - 1})` with `2^r || n`, as
/// series through `t^order` for `1 <= n <= n_max`.
pub fn x_equations_check(n_max: u64, order: usize) -> Result<bool> {
    let needed = (1..=n_max)
        .map(|n| (1u64 << n.trailing_zeros()) + n - 1)
        .max()
        .unwrap_or(0);
    let x = product_rule_series(needed, order)?;
    let two = BigInt::from(2);
    Ok((1..=n_max).all(|n| {
        let r = n.trailing_zeros();
        (0..=order).all(|k| {
            let rhs = if k == 0 {
                BigInt::zero()
            } else {
                let mut acc = x[(n - 1) as usize][k - 1].clone();
                for i in 0..=r {
                    acc += &two * &x[((1u64 << i) + n - 1) as usize][k - 1];
                }
                acc
            };
            x[n as usize][k] == rhs
        })
    }))
}

/// Product-rule coefficients agree with the fusion DP for `n < n_bound`, `k <= k_max`.
pub fn product_rule_check(n_bound: u64, k_max: usize) -> Result<bool> {
    let series = product_rule_series(n_bound - 1, k_max)?;
    let dp = fusion::columns(n_bound - 1, k_max as u64);
    Ok(series.iter().zip(&dp).all(|(a, b)| {
        a.iter()
            .zip(b)
            .all(|(x, y)| x == &BigInt::from_biguint(Sign::Plus, y.clone()))
    }))
}

/// `X_{2^s}(1/4)` for `s = 0..=s_max`, exactly.
pub fn values_at_quarter(s_max: u32) -> Vec<BigRational> {
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    denominators(s_max)
        .into_iter()
        .enumerate()
        .map(|(s, d)| {
            let f = RationalGF { numerator: poly::monomial(1 << s, BigInt::one()), denominator: d };
            f.eval_at_rational(&quarter).expect("1/4 is not a pole")
        })
        .collect()
}

pub fn to_biguint(c: &[BigInt]) -> Option<Vec<BigUint>> {
    c.iter().map(|x| x.to_biguint()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_closed_forms() {
        let x1 = x_power_of_two(0);
        assert_eq!(x1.numerator(), ints(&[0, 1]).as_slice());
        assert_eq!(x1.denominator(), ints(&[1, -2]).as_slice());
        let x2 = x_power_of_two(1);
        assert_eq!(x2.numerator(), ints(&[0, 0, 1]).as_slice());
        assert_eq!(x2.denominator(), ints(&[1, -4, 2]).as_slice());
        for s in 0..6 {
            let c = coefficients(&x_power_of_two(s), 1 << s);
            assert_eq!(c[1 << s], BigInt::one());
        }
    }

    #[test]
    fn coefficient_examples() {
        let geo = RationalGF::new(ints(&[1]), ints(&[1, -2])).unwrap();
        assert_eq!(coefficients(&geo, 3), ints(&[1, 2, 4, 8]));
        assert_eq!(coefficients(&x_general(1).unwrap(), 4), ints(&[0, 1, 2, 4, 8]));
        assert_eq!(coefficients(&x_general(2).unwrap(), 4), ints(&[0, 0, 1, 4, 14]));
        let five = x_general(5).unwrap();
        let manual = x_power_of_two(2).mul(&x_power_of_two(0));
        assert_eq!(coefficients(&five, 40), coefficients(&manual, 40));
        assert!(x_general(3).unwrap().same_function(&x_power_of_two(1).mul(&x_power_of_two(0))));
    }

    #[test]
    fn bad_denominator_rejected() {
        assert!(RationalGF::new(ints(&[1]), ints(&[2, 1])).is_err());
        assert!(x_general(0).is_err());
    }

    #[test]
    fn eight_matches_dp_column() {
        let c = coefficients(&x_power_of_two(3), 60);
        let col = fusion::columns(8, 60).swap_remove(8);
        assert_eq!(to_biguint(&c).unwrap(), col);
    }

    #[test]
    fn recurrence_small() {
        assert!(recurrence_check(0));
        assert!(recurrence_check(4));
    }

    #[test]
    fn quarter_value_small() {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        assert!(values_at_quarter(5).iter().all(|v| *v == half));
    }

    #[test]
    fn graph_equations_small() {
        assert!(x_equations_check(12, 30).unwrap());
        assert!(prop_f_series_check(2, 40));
    }
}
