//! The theta-type density
//! `phi(x) = (pi/8) sum_n chi(n) n exp(-pi^2 n^2 x / 16)` for `x > 0`, zero
//! otherwise, where `chi` is the primitive character mod 4.
//!
//! For `x >= 4/pi` the series is summed directly. Below that the functional
//! equation `phi(x) = 8 (pi x)^{-3/2} phi(16 / (pi^2 x))` maps the argument
//! back above `4/pi`, where successive odd terms shrink by at least
//! `3 exp(-2 pi)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Fixed point of `x -> 16 / (pi^2 x)`.
pub const SWITCH: f64 = 4.0 / PI;

/// `16 / pi^2`.
const C: f64 = 16.0 / (PI * PI);

/// Highest supported derivative order.
pub const MAX_ORDER: u32 = 6;

/// Upper bound on summed series terms; never reached above `SWITCH`.
const MAX_TERMS: u64 = 100_000;

pub fn chi_mod4(n: u64) -> i32 {
    match n % 4 {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaEvaluator {
    /// Relative truncation tolerance for the series.
    pub eps: f64,
    pub switch: f64,
}

impl Default for ThetaEvaluator {
    fn default() -> Self {
        Self { eps: 1e-16, switch: SWITCH }
    }
}

impl ThetaEvaluator {
    /// `phi^{(p)}(x)` by the termwise-differentiated series, any `x > 0`.
    /// Accurate only where the series converges quickly (`x` near or above
    /// `SWITCH`).
    pub fn series_derivative(&self, x: f64, p: u32) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let a = PI * PI / 16.0;
        let mut sum = 0.0;
        let mut prev = f64::INFINITY;
        let mut n = 1u64;
        while n < MAX_TERMS {
            let nf = n as f64;
            let mag = nf * (a * nf * nf).powi(p as i32) * (-a * nf * nf * x).exp();
            let sign = f64::from(chi_mod4(n)) * if p % 2 == 1 { -1.0 } else { 1.0 };
            sum += sign * mag;
            // polynomial factors can make early terms grow; stop only on the
            // decreasing side
            if mag < prev && mag <= self.eps * sum.abs() {
                break;
            }
            prev = mag;
            n += 2;
        }
        PI / 8.0 * sum
    }

    /// Direct series for `phi(x)`.
    pub fn phi_series(&self, x: f64) -> f64 {
        self.series_derivative(x, 0)
    }

    pub fn phi(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= self.switch {
            self.phi_series(x)
        } else {
            8.0 * (PI * x).powf(-1.5) * self.phi_series(C / x)
        }
    }

    /// `phi^{(p)}(x)` for `p <= 6`.
    ///
    /// Below the switch point the functional equation is differentiated
    /// symbolically: `phi(x)` is a sum of terms `coef x^{-a} phi^{(m)}(c/x)`
    /// and `d/dx` of one term is
    /// `-a coef x^{-a-1} phi^{(m)}(c/x) - c coef x^{-a-2} phi^{(m+1)}(c/x)`.
    pub fn phi_derivative(&self, x: f64, p: u32) -> Result<f64> {
        if p > MAX_ORDER {
            return Err(Error::UnsupportedOrder(p));
        }
        if x <= 0.0 {
            return Ok(0.0);
        }
        if p == 0 {
            return Ok(self.phi(x));
        }
        if x >= self.switch {
            return Ok(self.series_derivative(x, p));
        }
        let mut terms = vec![(8.0 * PI.powf(-1.5), 1.5f64, 0u32)];
        for _ in 0..p {
            let mut next = Vec::with_capacity(terms.len() * 2);
            for &(coef, a, m) in &terms {
                next.push((-a * coef, a + 1.0, m));
                next.push((-C * coef, a + 2.0, m + 1));
            }
            terms = merge(next);
        }
        let y = C / x;
        Ok(terms
            .iter()
            .map(|&(coef, a, m)| coef * x.powf(-a) * self.series_derivative(y, m))
            .sum())
    }

    /// Product form `(pi/8) e^{-pi^2 x/16} prod_{n>=1} (1 - e^{-pi^2 n x/2})^3`,
    /// evaluated as a compensated sum of logarithms. All factors are positive,
    /// so nothing cancels even at small `x`; it is independent of both the
    /// series and the functional equation.
    pub fn phi_product(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let q = (-PI * PI * x / 2.0).exp();
        let mut sum = 0.0;
        let mut comp = 0.0;
        let mut qn = q;
        while qn > 1e-18 * f64::EPSILON {
            let term = 3.0 * (-qn).ln_1p();
            let t = sum + term;
            comp += if f64::abs(sum) >= term.abs() { (sum - t) + term } else { (term - t) + sum };
            sum = t;
            qn *= q;
        }
        PI / 8.0 * (sum + comp - PI * PI * x / 16.0).exp()
    }

    /// `int_0^inf phi`: Gauss-Legendre panels on `[0, X0]` plus the
    /// termwise tail `(pi/8) sum chi(n) n (16/(pi^2 n^2)) e^{-pi^2 n^2 X0/16}`.
    pub fn phi_integral(&self) -> f64 {
        let x0 = 2.0 * SWITCH;
        let panels = 32;
        let (nodes, weights) = gauss_legendre(24);
        let h = x0 / f64::from(panels);
        let mut body = 0.0;
        for i in 0..panels {
            let (a, b) = (f64::from(i) * h, f64::from(i + 1) * h);
            let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
            for (t, w) in nodes.iter().zip(&weights) {
                body += half * w * self.phi(mid + half * t);
            }
        }
        body + self.tail_integral(x0)
    }

    /// `int_{x0}^inf phi` termwise; terms decay like `e^{-pi^2 n^2 x0/16}`.
    pub fn tail_integral(&self, x0: f64) -> f64 {
        let a = PI * PI / 16.0;
        let mut sum = 0.0;
        let mut n = 1u64;
        loop {
            let nf = n as f64;
            let term = nf / (a * nf * nf) * (-a * nf * nf * x0).exp();
            sum += f64::from(chi_mod4(n)) * term;
            if term <= self.eps * sum.abs() || n > MAX_TERMS {
                break;
            }
            n += 2;
        }
        PI / 8.0 * sum
    }

    /// Termwise integral of the `n`-th series term over `(0, inf)`:
    /// `(pi/8) chi(n) n 16 / (pi^2 n^2)`.
    pub fn term_integral(n: u64) -> f64 {
        let nf = n as f64;
        PI / 8.0 * f64::from(chi_mod4(n)) * nf * 16.0 / (PI * PI * nf * nf)
    }
}

/// Combine terms with equal `(a, m)`.
fn merge(mut terms: Vec<(f64, f64, u32)>) -> Vec<(f64, f64, u32)> {
    terms.sort_by(|x, y| x.2.cmp(&y.2).then(x.1.total_cmp(&y.1)));
    let mut out: Vec<(f64, f64, u32)> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if last.1 == t.1 && last.2 == t.2 => last.0 += t.0,
            _ => out.push(t),
        }
    }
    out
}

/// Nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Default-tolerance `phi`.
pub fn phi(x: f64) -> f64 {
    ThetaEvaluator::default().phi(x)
}

pub fn phi_derivative(x: f64, p: u32) -> Result<f64> {
    ThetaEvaluator::default().phi_derivative(x, p)
}

pub fn phi_integral() -> f64 {
    ThetaEvaluator::default().phi_integral()
}

/// Largest ratio of consecutive nonzero terms `(4m+3)` over `(4m+1)` at `x`,
/// i.e. `3 e^{-pi^2 x / 2}` (attained at `m = 0`).
pub fn paired_term_ratio(x: f64) -> f64 {
    3.0 * (-PI * PI * x / 2.0).exp()
}

/// Functional-equation residual at `x`, relative to `phi(x)`. Whichever of
/// `x`, `16/(pi^2 x)` lies above the switch point is summed as a series and
/// the other is taken from the product form.
pub fn fe_residual(x: f64) -> f64 {
    let ev = ThetaEvaluator::default();
    let y = C / x;
    let pref = 8.0 * (PI * x).powf(-1.5);
    let (lhs, rhs) = if x >= SWITCH {
        (ev.phi_series(x), pref * ev.phi_product(y))
    } else {
        (ev.phi_product(x), pref * ev.phi_series(y))
    };
    ((lhs - rhs) / lhs).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Three-term oracle at `x = 1`.
    fn phi_one_oracle() -> f64 {
        let a = PI * PI / 16.0;
        PI / 8.0 * ((-a).exp() - 3.0 * (-9.0 * a).exp() + 5.0 * (-25.0 * a).exp())
    }

    #[test]
    fn values() {
        assert_eq!(phi(-1.0), 0.0);
        assert_eq!(phi(0.0), 0.0);
        assert!((phi(1.0) - phi_one_oracle()).abs() < 1e-6);
        assert!((phi(1.0) - 0.207_344_869_2).abs() < 1e-9);
        let ev = ThetaEvaluator::default();
        let s = ev.phi_series(SWITCH);
        let f = 8.0 * (PI * SWITCH).powf(-1.5) * ev.phi_series(C / SWITCH);
        assert!((s - f).abs() <= 1e-15 * s);
    }

    #[test]
    fn branches_agree_on_1_to_4() {
        let ev = ThetaEvaluator::default();
        for i in 0..=60 {
            let x = 1.0 + 3.0 * f64::from(i) / 60.0;
            let series = ev.phi_series(x);
            let fe = 8.0 * (PI * x).powf(-1.5) * ev.phi_series(C / x);
            assert!((series - fe).abs() <= 1e-12 * series, "x = {x}");
            assert!((ev.phi_product(x) - series).abs() <= 1e-13 * series);
        }
    }

    #[test]
    fn derivatives() {
        assert_eq!(phi_derivative(0.7, 0).unwrap(), phi(0.7));
        assert!(phi_derivative(3.0, 1).unwrap() < 0.0);
        assert!(matches!(phi_derivative(1.0, 7), Err(Error::UnsupportedOrder(7))));
        for &x in &[0.3, 0.8, 1.2, 2.0, 4.0] {
            for p in 0..4u32 {
                let h = 1e-4 * x;
                let fd = (phi_derivative(x + h, p).unwrap() - phi_derivative(x - h, p).unwrap())
                    / (2.0 * h);
                let d = phi_derivative(x, p + 1).unwrap();
                let scale = d.abs().max(phi_derivative(x, p).unwrap().abs() / x);
                assert!((fd - d).abs() <= 1e-6 * scale, "x = {x}, p = {p}: {fd} vs {d}");
            }
        }
        let h = 1e-5;
        let fd = (phi(2.0 + h) - phi(2.0 - h)) / (2.0 * h);
        assert!((fd - phi_derivative(2.0, 1).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn integral_is_half() {
        assert!((phi_integral() - 0.5).abs() < 1e-8);
        let partial: f64 = (1..200).map(ThetaEvaluator::term_integral).sum();
        assert!((partial - 0.5).abs() < 1e-2);
        assert!((ThetaEvaluator::term_integral(3) + 3.0 * 2.0 / (PI * 9.0)).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        let (x, w) = gauss_legendre(10);
        let int = |f: &dyn Fn(f64) -> f64| x.iter().zip(&w).map(|(a, b)| b * f(*a)).sum::<f64>();
        assert!((int(&|_| 1.0) - 2.0).abs() < 1e-14);
        assert!((int(&|t| t.powi(18)) - 2.0 / 19.0).abs() < 1e-14);
    }
}
