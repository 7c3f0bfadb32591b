//! Roots `beta_{s,j} = 2 + 2cos((2j-1)pi/2^{s+1})` of `P_s(x) = F^s(x - 2)` and
//! the partial-fraction formulas they give for `x_{n,k}`.
//!
//! `X_{2^s}(t) = 1/P_s(1/t)`, so
//! `x_{2^s,k} = 2^-s sum_j (-1)^{j+1} sin(theta_j) beta_j^{k-1}`.

use std::f64::consts::PI;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::fixed::{self, Fixed};

/// Guard bits on top of the `2k + s` needed to hold every term exactly.
const GUARD_BITS: u64 = 64;

/// Largest level with double-precision root tables.
pub const MAX_LEVEL: u32 = 30;

/// `(2j-1) pi / 2^{s+1}`.
pub fn theta(s: u32, j: u64) -> f64 {
    (2 * j - 1) as f64 * PI / 2f64.powi(s as i32 + 1)
}

/// `beta_{s,j}` for `s >= 0`; the angle may exceed `pi` when `j > 2^s`.
pub fn beta(s: u32, j: u64) -> f64 {
    2.0 + 2.0 * theta(s, j).cos()
}

/// `beta_{level,j}` for any integer level, with `beta = 4` below `-2`.
/// Levels `-1` and `-2` give 0 and 4 as the formula does.
pub fn beta_any_level(level: i64, j: u64) -> f64 {
    if level >= 0 {
        beta(level as u32, j)
    } else if level == -1 {
        0.0
    } else {
        4.0
    }
}

/// The `2^s` roots of `P_s`, strictly decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub s: u32,
    pub roots: Vec<f64>,
}

impl RootSet {
    pub fn new(s: u32) -> Result<Self> {
        if s > MAX_LEVEL {
            return Err(Error::InvalidInput(format!("level {s} exceeds {MAX_LEVEL}")));
        }
        Ok(Self { s, roots: (1..=1u64 << s).map(|j| beta(s, j)).collect() })
    }
}

/// `P_s(x)` by `s` squarings of `x - 2`.
pub fn p_s_eval(s: u32, x: f64) -> f64 {
    let mut y = x - 2.0;
    for _ in 0..s {
        y = y * y - 2.0;
    }
    y
}

/// `P_s'(beta_{s,j}) = (-1)^{j+1} 2^s / sin(theta_j)`.
pub fn p_s_prime(s: u32, j: u64) -> f64 {
    let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
    sign * 2f64.powi(s as i32) / theta(s, j).sin()
}

/// `P_{s'}(beta_{s,j})` for any `s'`: equal to `2cos(2^{s'} theta_{s,j})`, which is
/// `beta_{s-s',j} - 2`. The angle is reduced exactly before taking the cosine.
pub fn p_eval_at_root(s_prime: u32, s: u32, j: u64) -> f64 {
    if s_prime > s {
        // 2^{s'} theta is an odd (s' = s+1) or even multiple of pi
        return if s_prime == s + 1 { -2.0 } else { 2.0 };
    }
    let level = s - s_prime;
    // angle (2j-1) pi / 2^{level+1}, reduced mod 2 pi
    let period = 1u64 << (level + 2);
    let odd = (2 * j - 1) % period;
    2.0 * (odd as f64 * PI / 2f64.powi(level as i32 + 1)).cos()
}

fn check_gate(s: u32, k: u64) -> Result<()> {
    if s > MAX_LEVEL {
        return Err(Error::InvalidInput(format!("level {s} exceeds {MAX_LEVEL}")));
    }
    if k < 1 << s {
        return Err(Error::InvalidInput(format!(
            "closed form needs k >= 2^s (k = {k}, s = {s})"
        )));
    }
    Ok(())
}

/// `x_{2^s,k}` in double precision.
///
/// Fails with `PrecisionLoss` when the rounding error of the alternating sum
/// could reach 1/4, i.e. when rounding would not be guaranteed to give the
/// exact integer; use [`coeff_scaled`] or [`coeff_exact`] then.
pub fn coeff_spectral(s: u32, k: u64) -> Result<f64> {
    check_gate(s, k)?;
    let n = 1u64 << s;
    let mut sum = 0.0;
    let mut magnitude = 0.0;
    for j in 1..=n {
        let th = theta(s, j);
        let term = th.sin() * (2.0 + 2.0 * th.cos()).powi((k - 1) as i32);
        magnitude += term;
        sum += if j % 2 == 1 { term } else { -term };
    }
    let scale = 2f64.powi(-(s as i32));
    let err = magnitude * scale * f64::EPSILON * (n as f64 + 2.0 * k as f64);
    if !(err < 0.25) {
        return Err(Error::PrecisionLoss(format!(
            "x_(2^{s},{k}): error bound {err:e} too large for exact rounding"
        )));
    }
    Ok(sum * scale)
}

/// Exact `x_{2^s,k}` from the spectral sum in binary fixed point.
pub fn coeff_exact(s: u32, k: u64) -> Result<BigInt> {
    check_gate(s, k)?;
    let fx = Fixed::new(2 * k + u64::from(s) + GUARD_BITS);
    let table = fx.odd_angle_table(s, 1 << s);
    let mut sum = BigInt::from(0);
    for (idx, (c, sn)) in table.iter().enumerate() {
        let b = fx.from_int(2) + (c << 1u32);
        let term = fx.mul(sn, &fx.pow(&b, k - 1));
        if idx % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(fx.round(&sum, u64::from(s)))
}

/// Exact `x_{2^s,k}` for `k = 0..=k_max`, sharing one angle table and
/// advancing powers incrementally. Entries below `2^s` are 0.
pub fn coeff_exact_range(s: u32, k_max: u64) -> Result<Vec<BigInt>> {
    if s > MAX_LEVEL {
        return Err(Error::InvalidInput(format!("level {s} exceeds {MAX_LEVEL}")));
    }
    let n = 1u64 << s;
    let mut out = vec![BigInt::from(0); k_max as usize + 1];
    if k_max < n {
        return Ok(out);
    }
    let fx = Fixed::new(2 * k_max + u64::from(s) + GUARD_BITS);
    let table = fx.odd_angle_table(s, n as usize);
    let betas: Vec<BigInt> = table.iter().map(|(c, _)| fx.from_int(2) + (c << 1u32)).collect();
    // terms[j] = sin_j * beta_j^{k-1}
    let mut terms: Vec<BigInt> = table
        .iter()
        .zip(&betas)
        .map(|((_, sn), b)| fx.mul(sn, &fx.pow(b, n - 1)))
        .collect();
    for k in n..=k_max {
        if k > n {
            for (t, b) in terms.iter_mut().zip(&betas) {
                *t = fx.mul(t, b);
            }
        }
        let mut sum = BigInt::from(0);
        for (idx, t) in terms.iter().enumerate() {
            if idx % 2 == 0 {
                sum += t;
            } else {
                sum -= t;
            }
        }
        out[k as usize] = fx.round(&sum, u64::from(s));
    }
    Ok(out)
}

/// Relative error the double-precision scaled sum may carry before the exact
/// path takes over.
const SCALED_REL_TOL: f64 = 1e-12;

/// Per-root constants for the double-precision scaled sum
/// `4^-k x_{2^s,k} = 2^-s/4 sum_j (-1)^{j+1} sin(theta_j) cos^2(theta_j/2)^{k-1}`.
#[derive(Debug, Clone)]
pub struct ScaledSum {
    s: u32,
    sin_theta: Vec<f64>,
    /// `ln cos^2(theta_j/2) = ln1p(-sin^2(theta_j/2))`, accurate near 0.
    log_q: Vec<f64>,
}

impl ScaledSum {
    pub fn new(s: u32) -> Result<Self> {
        if s > MAX_LEVEL {
            return Err(Error::InvalidInput(format!("level {s} exceeds {MAX_LEVEL}")));
        }
        let (sin_theta, log_q) = (1..=1u64 << s)
            .map(|j| {
                let th = theta(s, j);
                let sh = (th / 2.0).sin();
                (th.sin(), (-sh * sh).ln_1p())
            })
            .unzip();
        Ok(Self { s, sin_theta, log_q })
    }

    /// `(ln value, bound on the relative error)`, or `None` below `k = 2^s`.
    ///
    /// Terms are summed relative to the leading one, so the result does not
    /// underflow even where the value itself is below the double range.
    pub fn eval_ln(&self, k: u64) -> Option<(f64, f64)> {
        if k < 1 << self.s {
            return None;
        }
        let km1 = (k - 1) as f64;
        let lead = km1 * self.log_q[0];
        let mut sum = 0.0;
        let mut err = 0.0;
        for (idx, (sn, lq)) in self.sin_theta.iter().zip(&self.log_q).enumerate() {
            let rel = (km1 * (lq - self.log_q[0])).exp();
            if rel < 1e-300 {
                // log_q decreases in j, so every later term is smaller still
                break;
            }
            let term = sn * rel;
            sum += if idx % 2 == 0 { term } else { -term };
            err += term * f64::EPSILON * (4.0 + km1 * lq.abs());
        }
        let n = self.sin_theta.len() as f64;
        let err = err + sum.abs() * f64::EPSILON * n;
        let scale = (0.25 * 2f64.powi(-(self.s as i32))).ln();
        Some((lead + scale + sum.ln(), err / sum.abs()))
    }

    /// Value and a-priori absolute error bound; `(0, 0)` below `k = 2^s`.
    pub fn eval(&self, k: u64) -> (f64, f64) {
        match self.eval_ln(k) {
            Some((ln, rel)) if !ln.is_nan() => {
                let v = ln.exp();
                (v, rel * v)
            }
            Some(_) => (0.0, f64::INFINITY),
            None => (0.0, 0.0),
        }
    }
}

fn scaled_double(s: u32, k: u64) -> (f64, f64) {
    ScaledSum::new(s).expect("level checked by caller").eval(k)
}

/// `4^-k x_{2^s,k}`, computed with base `cos^2(theta/2)` in the power.
///
/// Near `k = 2^s` the alternating sum cancels almost completely; when the
/// error bound exceeds a relative `1e-12` the exact path is used instead.
pub fn coeff_scaled(s: u32, k: u64) -> Result<f64> {
    if s > MAX_LEVEL {
        return Err(Error::InvalidInput(format!("level {s} exceeds {MAX_LEVEL}")));
    }
    if k < 1 << s {
        return Ok(0.0);
    }
    let (v, err) = scaled_double(s, k);
    if err <= SCALED_REL_TOL * v.abs() {
        return Ok(v);
    }
    let exact = coeff_exact(s, k)?;
    Ok(fixed::scaled_to_f64(&exact, 2 * k))
}

/// `ln(4^-k x_{2^s,k})` for `k = 0..=k_max` (`-inf` below `k = 2^s`), using
/// one shared exact pass for the ill-conditioned prefix. Unlike
/// [`coeff_scaled_range`] this stays accurate where the value underflows.
pub fn coeff_scaled_ln_range(s: u32, k_max: u64) -> Result<Vec<f64>> {
    if s > MAX_LEVEL {
        return Err(Error::InvalidInput(format!("level {s} exceeds {MAX_LEVEL}")));
    }
    let n = 1u64 << s;
    let mut out = vec![f64::NEG_INFINITY; k_max as usize + 1];
    if k_max < n {
        return Ok(out);
    }
    let sum = ScaledSum::new(s)?;
    let doubles: Vec<(f64, f64)> =
        (n..=k_max).map(|k| sum.eval_ln(k).expect("k >= 2^s")).collect();
    let last_bad = doubles
        .iter()
        .rposition(|(ln, rel)| ln.is_nan() || !(*rel <= SCALED_REL_TOL))
        .map(|i| n + i as u64);
    if let Some(kb) = last_bad {
        let exact = coeff_exact_range(s, kb)?;
        for k in n..=kb {
            out[k as usize] = fixed::ln_scaled(&exact[k as usize], 2 * k);
        }
    }
    let start = last_bad.map_or(n, |kb| kb + 1);
    for k in start..=k_max {
        out[k as usize] = doubles[(k - n) as usize].0;
    }
    Ok(out)
}

/// `coeff_scaled(s, k)` for `k = 0..=k_max`; values below the double range
/// come out as 0.
pub fn coeff_scaled_range(s: u32, k_max: u64) -> Result<Vec<f64>> {
    Ok(coeff_scaled_ln_range(s, k_max)?.into_iter().map(f64::exp).collect())
}

/// One pole of `X_n(1/x) = 1/P^n(x)`: `x_{n,k} = sum residue * beta^{k-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residue {
    /// Level `s` with `P_s(beta) = 0`.
    pub level: u32,
    pub j: u64,
    pub beta: f64,
    /// `(P^n)'(beta)`.
    pub derivative: f64,
    /// `1 / (P^n)'(beta)`.
    pub residue: f64,
}

/// `(P^n)'(beta_{s,j})` for a root at level `s` of `P^n = prod_{bits} P_{s_i}`,
/// by the product rule: only the factor vanishing at the root is differentiated.
pub fn pn_prime(n: u64, s: u32, j: u64) -> f64 {
    let mut d = p_s_prime(s, j);
    for s_prime in (0..64u32).filter(|&b| n >> b & 1 == 1 && b != s) {
        d *= p_eval_at_root(s_prime, s, j);
    }
    d
}

/// `P^n(x)` by evaluating each factor through squarings.
pub fn pn_eval(n: u64, x: f64) -> f64 {
    (0..64u32).filter(|&b| n >> b & 1 == 1).map(|b| p_s_eval(b, x)).product()
}

/// Poles and residues of `X_n` in the variable `x = 1/t`, in decreasing `beta`.
pub fn residues(n: u64) -> Result<Vec<Residue>> {
    if n == 0 {
        return Err(Error::InvalidInput("residues need n >= 1".into()));
    }
    let mut out = Vec::new();
    for s in (0..64u32).filter(|&b| n >> b & 1 == 1) {
        if s > MAX_LEVEL {
            return Err(Error::InvalidInput(format!("level {s} exceeds {MAX_LEVEL}")));
        }
        for j in 1..=1u64 << s {
            let derivative = pn_prime(n, s, j);
            out.push(Residue {
                level: s,
                j,
                beta: beta(s, j),
                derivative,
                residue: 1.0 / derivative,
            });
        }
    }
    out.sort_by(|a, b| b.beta.total_cmp(&a.beta));
    for w in out.windows(2) {
        let gap = w[0].beta - w[1].beta;
        if gap <= 64.0 * f64::EPSILON * w[0].beta.max(1.0) {
            return Err(Error::DegenerateRoot { root: w[0].beta });
        }
    }
    Ok(out)
}

/// `sum residue * beta^{k-1}`, i.e. `x_{n,k}` for `k >= 1`.
pub fn coeff_from_residues(res: &[Residue], k: u64) -> f64 {
    res.iter()
        .map(|r| r.residue * r.beta.powi((k - 1) as i32))
        .sum()
}

/// Exact `x_{n,k}` from the partial-fraction sum of `X_n`, in fixed point.
pub fn coeff_general_exact(n: u64, k: u64) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::InvalidInput("coeff_general_exact needs n >= 1".into()));
    }
    if k == 0 {
        return Ok(BigInt::from(0));
    }
    let levels: Vec<u32> = (0..64u32).filter(|&b| n >> b & 1 == 1).collect();
    let top = *levels.last().expect("n >= 1");
    if top > MAX_LEVEL {
        return Err(Error::InvalidInput(format!("level {top} exceeds {MAX_LEVEL}")));
    }
    // residues grow like 2^top per factor; leave room for that and the sum
    let fx = Fixed::new(2 * k + 4 * u64::from(top + 1) * levels.len() as u64 + GUARD_BITS);
    let two = fx.from_int(2);
    let mut sum = BigInt::from(0);
    for &s in &levels {
        for (idx, (c, sn)) in fx.odd_angle_table(s, 1 << s).into_iter().enumerate() {
            let mut other = fx.one();
            for &sp in levels.iter().filter(|&&sp| sp != s) {
                let factor = if sp > s {
                    fx.from_int(if sp == s + 1 { -2 } else { 2 })
                } else {
                    let mut y = &c << 1u32;
                    for _ in 0..sp {
                        y = fx.mul(&y, &y) - &two;
                    }
                    y
                };
                other = fx.mul(&other, &factor);
            }
            let b = &two + (&c << 1u32);
            // 1/P_s'(beta) = (-1)^{j+1} sin(theta) / 2^s
            let residue = fx.div(&sn, &other) >> s;
            let term = fx.mul(&residue, &fx.pow(&b, k - 1));
            if idx % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
    }
    Ok(fx.round(&sum, 0))
}

/// `x_{n,k}` from the partial-fraction sum in double precision, falling back
/// to [`coeff_general_exact`] when cancellation would cost more than a
/// relative `1e-12`.
pub fn coeff_general(n: u64, k: u64) -> Result<f64> {
    let res = residues(n)?;
    if k == 0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut magnitude = 0.0;
    for r in &res {
        let term = r.residue * r.beta.powi((k - 1) as i32);
        // Neumaier summation
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
        magnitude += term.abs();
    }
    let value = sum + comp;
    let err = magnitude * f64::EPSILON * (2.0 * k as f64 + 8.0 * res.len() as f64);
    if err <= SCALED_REL_TOL * value.abs() {
        return Ok(value);
    }
    Ok(fixed::scaled_to_f64(&coeff_general_exact(n, k)?, 0))
}
