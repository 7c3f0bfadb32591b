//! Tilting modules as polynomials in `V`: `W = Q(V)` has character
//! `Q(t + 1/t)`. The multiplicity of `T(2n)` in `W^{tensor k}` is the linear
//! functional `mu_n` applied to `Q^k`, which the poles of `X_n` evaluate as
//!
//! `mu_n(R) = 1/2 sum_beta (R(sqrt beta) + R(-sqrt beta)) / (beta (P^n)'(beta)) + R(0) / P^n(0)`.
//!
//! The last term corrects the constant monomial: the partial-fraction sum
//! gives `-1/P^n(0)` on `x^0`, while `T(2n)` with `n >= 1` never occurs in
//! the trivial module.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::charring::{self, SymmetricCharacter, TiltingDecomposition};
use crate::error::{Error, Result};
use crate::limitfn::DELTA;
use crate::poly;
use crate::spectral;

/// Parities of the highest weights of the summands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Mixed => "mixed",
        }
    }
}

/// `Q(x)` together with its character `Q(t + 1/t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltingPoly {
    coeffs: Vec<BigInt>,
    character: SymmetricCharacter,
    parity: Parity,
}

impl TiltingPoly {
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let coeffs = poly::trimmed(coeffs);
        let x = charring::chi(1);
        let character = coeffs.iter().rev().fold(SymmetricCharacter::zero(), |acc, c| {
            &(&acc * &x) + &SymmetricCharacter::from_coeffs(vec![c.clone()])
        });
        let parity = if poly::is_even_function(&coeffs) {
            Parity::Even
        } else if poly::is_odd_function(&coeffs) {
            Parity::Odd
        } else {
            Parity::Mixed
        };
        Self { coeffs, character, parity }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(poly::from_i64(coeffs))
    }

    /// `Q` with `Q(V) = T(n)`.
    pub fn of_tilting(n: u64) -> Self {
        poly_of_tilting(&TiltingDecomposition::from_pairs([(n, 1)]))
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn character(&self) -> &SymmetricCharacter {
        &self.character
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `Q(2)`.
    pub fn dim(&self) -> BigInt {
        poly::eval_int(&self.coeffs, &BigInt::from(2))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        poly::eval_f64(&self.coeffs, x)
    }

    /// `sum |a_i| x^i`, for error bounds.
    fn eval_abs_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.abs().to_f64().unwrap_or(f64::INFINITY))
    }

    pub fn decomposition(&self) -> Result<TiltingDecomposition> {
        charring::decompose(&self.character)
    }

    pub fn is_effective(&self) -> bool {
        self.decomposition().is_ok()
    }

    /// True for `Q` constant: `W` is a multiple of the trivial module.
    pub fn is_trivial(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Parity of `Q^k` as a function.
    fn power_is_even(&self, k: u32) -> bool {
        match self.parity {
            Parity::Even => true,
            Parity::Odd => k % 2 == 0,
            Parity::Mixed => false,
        }
    }
}

/// Polynomial in `x = t + 1/t` with the given symmetric character, by
/// subtracting `a (t + 1/t)^m` for the top weight `m` until nothing is left.
pub fn poly_of_character(c: &SymmetricCharacter) -> Vec<BigInt> {
    let mut rest = c.coeffs().to_vec();
    let mut q = vec![BigInt::zero(); rest.len()];
    while let Some(top) = rest.iter().rposition(|x| !x.is_zero()) {
        let a = rest[top].clone();
        // (t + 1/t)^m has C(m, i) at weight m - 2i
        let mut binom = BigInt::one();
        for i in 0..=top / 2 {
            rest[top - 2 * i] -= &a * &binom;
            binom = binom * BigInt::from(top - i) / BigInt::from(i + 1);
        }
        debug_assert!(rest[top].is_zero());
        q[top] = a;
        rest.truncate(top);
    }
    poly::trimmed(q)
}

pub fn poly_of_tilting(d: &TiltingDecomposition) -> TiltingPoly {
    TiltingPoly::from_coeffs(poly_of_character(&d.character()))
}

/// `Q(2)`, `Q'(2)` and the weight index `sum_m a_m m^2 / 2` of the character.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynkinData {
    pub dim: BigInt,
    pub q_prime_at_2: BigInt,
    pub weight_sum_index: BigInt,
    pub agree: bool,
}

pub fn dynkin_data(q: &TiltingPoly) -> DynkinData {
    let two = BigInt::from(2);
    let q_prime_at_2 = poly::eval_int(&poly::derivative(&q.coeffs), &two);
    let weight_sum_index = q.character.weight_square_index();
    DynkinData {
        dim: q.dim(),
        agree: q_prime_at_2 == weight_sum_index,
        q_prime_at_2,
        weight_sum_index,
    }
}

/// One root of `P^n`, written on the finest level `s1` of `n` as
/// `beta = 2 + 2cos(j pi / 2^{s1+1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPoint {
    pub j: u64,
    /// Level `s` of the factor `P_s` vanishing here.
    pub level: u32,
    pub beta: f64,
    /// `(P^n)'(beta)`.
    pub derivative: f64,
}

/// Roots of `P^n` in decreasing order (increasing `j`).
#[derive(Debug, Clone, PartialEq)]
pub struct BetaGrid {
    pub n: u64,
    pub level: u32,
    pub points: Vec<BetaPoint>,
}

impl BetaGrid {
    pub fn new(n: u64) -> Result<Self> {
        let res = spectral::residues(n)?;
        let level = 63 - n.leading_zeros();
        let points = res
            .iter()
            .map(|r| BetaPoint {
                j: (2 * r.j - 1) << (level - r.level),
                level: r.level,
                beta: r.beta,
                derivative: r.derivative,
            })
            .collect();
        Ok(Self { n, level, points })
    }

    pub fn point(&self, j: u64) -> Option<&BetaPoint> {
        self.points.iter().find(|p| p.j == j)
    }
}

/// `P^n(0) = prod P_s(0)`, with `P_0(0) = -2` and `P_s(0) = 2` otherwise.
fn pn_at_zero(n: u64) -> f64 {
    spectral::pn_eval(n, 0.0)
}

/// `mu_n(Q^k)`: multiplicity of `T(2n)` in `W^{tensor k}`, from the roots of
/// `P^n`. Even `Q^k` uses only the positive square roots.
///
/// Fails with `PrecisionLoss` when the rounding error bound reaches 1/4 and
/// exceeds a relative `1e-9`.
pub fn mu_n(q: &TiltingPoly, n: u64, k: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("mu_n needs n >= 1".into()));
    }
    let grid = BetaGrid::new(n)?;
    let even = q.power_is_even(k);
    let deg = q.degree().unwrap_or(0) as f64;
    let kf = f64::from(k);
    let terms: Vec<(f64, f64)> = grid
        .points
        .par_iter()
        .map(|p| {
            let y = p.beta.sqrt();
            let weight = 1.0 / (p.beta * p.derivative);
            let (qp, ap) = (q.eval_f64(y), q.eval_abs_f64(y));
            let plus = qp.powi(k as i32);
            let mut err = kf * (deg + 1.0) * ap * qp.abs().powi(k as i32 - 1);
            let value = if even {
                plus
            } else {
                let qm = q.eval_f64(-y);
                err += kf * (deg + 1.0) * ap * qm.abs().powi(k as i32 - 1);
                0.5 * (plus + qm.powi(k as i32))
            };
            (value * weight, (err + 8.0 * value.abs()) * weight.abs())
        })
        .collect();
    let (mut sum, mut comp, mut magnitude, mut err) = (0.0, 0.0, 0.0, 0.0);
    for &(term, e) in &terms {
        let t = sum + term;
        comp += if f64::abs(sum) >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
        magnitude += term.abs();
        err += e;
    }
    let constant = q.coeffs.first().cloned().unwrap_or_default().pow(k);
    let correction = constant.to_f64().unwrap_or(f64::INFINITY) / pn_at_zero(n);
    let value = sum + comp + correction;
    let err = f64::EPSILON * (err + terms.len() as f64 * magnitude + correction.abs());
    if err >= 0.25 && err > 1e-9 * value.abs() {
        return Err(Error::PrecisionLoss(format!(
            "mu_{n}(Q^{k}): error bound {err:e} for value {value:e}"
        )));
    }
    Ok(value)
}

/// Exact multiplicity of `T(2n)` in `W^{tensor k}` from the character ring.
pub fn oracle_multiplicity(q: &TiltingPoly, n: u64, k: u32) -> Result<BigUint> {
    Ok(charring::decompose(&q.character.pow(k))?.multiplicity(2 * n))
}

/// `2^{-(log2 j)^2} / (4 j^2)`.
pub fn pnprime_bound(j: u64) -> f64 {
    let l = (j as f64).log2();
    2f64.powf(-l * l) / (4.0 * (j * j) as f64)
}

/// `|(P^n)'(beta_{s1,j})| / |(P^n)'(beta_{s1,1})|`.
pub fn pnprime_ratio(n: u64, j: u64) -> Result<f64> {
    let grid = BetaGrid::new(n)?;
    let at = |j: u64| {
        grid.point(j)
            .map(|p| p.derivative.abs())
            .ok_or_else(|| Error::InvalidInput(format!("beta_(s1,{j}) is not a root of P^{n}")))
    };
    Ok(at(j)? / at(1)?)
}

/// Whether the derivative ratio at the root `beta_{s1,j}` clears [`pnprime_bound`].
pub fn pnprime_ratio_check(n: u64, j: u64) -> Result<bool> {
    Ok(pnprime_ratio(n, j)? >= pnprime_bound(j))
}

/// Every root of `P^n` against [`pnprime_bound`]; returns the smallest
/// `ratio / bound` and where it occurs.
pub fn pnprime_all_roots(n: u64) -> Result<(f64, u64)> {
    let grid = BetaGrid::new(n)?;
    let top = grid.point(1).expect("beta_(s1,1) is a root").derivative.abs();
    Ok(grid
        .points
        .iter()
        .map(|p| (p.derivative.abs() / top / pnprime_bound(p.j), p.j))
        .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessRow {
    pub k: u32,
    pub b: BigUint,
    pub c_hat: f64,
}

/// Empirical lower-bound constant `c_W = min b_k k^delta dim^-k` over a range.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub dim: BigInt,
    pub parity: Parity,
    pub rows: Vec<WitnessRow>,
    pub c_w: f64,
    pub argmin_k: u32,
    /// Minimum of `c_hat` over the first and the second half of the range.
    pub head_min: f64,
    pub tail_min: f64,
    /// Least-squares slope of `log c_hat` against `log k` over the tail.
    pub tail_slope: f64,
    /// `tail_min >= head_min / 2`: no sign of `c_hat` drifting to 0.
    pub tail_non_vanishing: bool,
    /// For odd `W`: `b_{k+1} >= b_k` at every odd `k` in range.
    pub odd_steps_monotone: Option<bool>,
}

/// Largest `k` with `dim^k <= 4^40`.
pub fn default_k_max(dim: &BigInt) -> u32 {
    let d = dim.to_f64().unwrap_or(f64::INFINITY);
    if d <= 1.0 {
        return 0;
    }
    (80.0 / d.log2()).floor() as u32
}

pub fn lower_bound_witness(q: &TiltingPoly, k_min: u32, k_max: u32) -> Result<WitnessReport> {
    if q.is_trivial() {
        return Err(Error::InvalidInput("W must be non-trivial".into()));
    }
    if k_min == 0 || k_min > k_max {
        return Err(Error::InvalidInput(format!("bad k range {k_min}..={k_max}")));
    }
    q.decomposition()?;
    let dim = q.dim();
    let log_dim = dim.to_f64().unwrap_or(f64::INFINITY).ln();
    let b = charring::b_oracle_sequence(&q.character, k_max + 1)?;
    let rows: Vec<WitnessRow> = (k_min..=k_max)
        .map(|k| {
            let bk = &b[k as usize];
            let log_c = log_biguint(bk) + DELTA * f64::from(k).ln() - f64::from(k) * log_dim;
            WitnessRow { k, b: bk.clone(), c_hat: log_c.exp() }
        })
        .collect();
    let (c_w, argmin_k) = rows
        .iter()
        .map(|r| (r.c_hat, r.k))
        .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a });
    let half = rows.len() / 2;
    let min_of = |rs: &[WitnessRow]| rs.iter().map(|r| r.c_hat).fold(f64::INFINITY, f64::min);
    let head_min = min_of(&rows[..half.max(1)]);
    let tail = &rows[half..];
    let tail_min = min_of(tail);
    let odd_steps_monotone = (q.parity == Parity::Odd).then(|| {
        (k_min..=k_max).filter(|k| k % 2 == 1).all(|k| b[k as usize + 1] >= b[k as usize])
    });
    Ok(WitnessReport {
        dim,
        parity: q.parity,
        c_w,
        argmin_k,
        head_min,
        tail_min,
        tail_slope: log_slope(tail),
        tail_non_vanishing: c_w > 0.0 && tail_min >= 0.5 * head_min,
        odd_steps_monotone,
        rows,
    })
}

fn log_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(0.0).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap_or(0.0).ln() + shift as f64 * std::f64::consts::LN_2
}

fn log_slope(rows: &[WitnessRow]) -> f64 {
    if rows.len() < 2 {
        return 0.0;
    }
    let pts: Vec<(f64, f64)> =
        rows.iter().map(|r| (f64::from(r.k).ln(), r.c_hat.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Parts (1)-(4) of the basic inequalities for an effective non-trivial `W`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaQReport {
    /// `Q(2)` equals the dimension read off the character.
    pub dim_matches: bool,
    pub q_prime_positive: bool,
    /// `Q'(2)` equals the weight index.
    pub index_agrees: bool,
    /// `|Q(x)| < Q(2)` at every interior grid point of `(-2, 2)`.
    pub interior_bounded: bool,
    /// `|Q(-2)| = Q(2)` exactly when the parity is pure.
    pub endpoint_matches_parity: bool,
}

impl LemmaQReport {
    pub fn all(&self) -> bool {
        self.dim_matches
            && self.q_prime_positive
            && self.index_agrees
            && self.interior_bounded
            && self.endpoint_matches_parity
    }
}

/// Checks the inequalities exactly at the rational points `-2 + 4i/grid`.
pub fn lemma_q_check(q: &TiltingPoly, grid: u32) -> Result<LemmaQReport> {
    if q.is_trivial() {
        return Err(Error::InvalidInput("W must be non-trivial".into()));
    }
    q.decomposition()?;
    let dim = q.dim();
    let dynkin = dynkin_data(q);
    let d = q.coeffs.len() - 1;
    let den = BigInt::from(grid);
    let bound = &dim * den.pow(d as u32);
    let interior_bounded = (1..grid).all(|i| {
        let num = BigInt::from(4 * i64::from(i) - 2 * i64::from(grid));
        poly::eval_homogeneous(&q.coeffs, &num, &den, d).abs() < bound
    });
    let at_minus_two = poly::eval_int(&q.coeffs, &BigInt::from(-2)).abs();
    Ok(LemmaQReport {
        dim_matches: dim == q.character.dim(),
        q_prime_positive: dynkin.q_prime_at_2.sign() == Sign::Plus,
        index_agrees: dynkin.agree,
        interior_bounded,
        endpoint_matches_parity: (at_minus_two == dim) == (q.parity != Parity::Mixed),
    })
}

/// Random non-trivial effective `W` with summands of highest weight at most
/// `max_weight`; a third each are purely even, purely odd and unrestricted.
pub fn random_effective_corpus(count: usize, max_weight: u64, seed: u64) -> Vec<TiltingPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| loop {
            let allowed = |w: u64| match i % 3 {
                0 => w % 2 == 0,
                1 => w % 2 == 1,
                _ => true,
            };
            let mut d = TiltingDecomposition::new();
            for w in (0..=max_weight).filter(|&w| allowed(w)) {
                if rng.gen_bool(0.4) {
                    d.insert(w, BigUint::from(rng.gen_range(1u32..=3)));
                }
            }
            let q = poly_of_tilting(&d);
            if !q.is_trivial() {
                break q;
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        poly::from_i64(v)
    }

    #[test]
    fn small_tilting_polys() {
        assert_eq!(TiltingPoly::of_tilting(1).coeffs(), ints(&[0, 1]).as_slice());
        assert_eq!(TiltingPoly::of_tilting(2).coeffs(), ints(&[0, 0, 1]).as_slice());
        let t3 = TiltingPoly::of_tilting(3);
        assert_eq!(t3.coeffs(), ints(&[0, -2, 0, 1]).as_slice());
        assert_eq!(t3.dim(), BigInt::from(4));
        assert_eq!(t3.parity(), Parity::Odd);
        assert_eq!(TiltingPoly::of_tilting(0).coeffs(), ints(&[1]).as_slice());
        let mixed = TiltingPoly::from_i64(&[1, 1]);
        assert_eq!(mixed.parity(), Parity::Mixed);
        assert_eq!(*mixed.character(), &charring::chi(0) + &charring::chi(1));
    }

    #[test]
    fn dynkin_examples() {
        let d1 = dynkin_data(&TiltingPoly::of_tilting(1));
        assert_eq!((d1.dim, d1.q_prime_at_2, d1.weight_sum_index), (2.into(), 1.into(), 1.into()));
        let d3 = dynkin_data(&TiltingPoly::of_tilting(3));
        assert_eq!((d3.dim, d3.q_prime_at_2, d3.weight_sum_index), (4.into(), 10.into(), 10.into()));
        assert!(d3.agree);
    }

    #[test]
    fn beta_grid_for_six() {
        let g = BetaGrid::new(6).unwrap();
        assert_eq!(g.level, 2);
        let js: Vec<u64> = g.points.iter().map(|p| p.j).collect();
        assert_eq!(js, vec![1, 2, 3, 5, 6, 7]);
        assert!(g.points.windows(2).all(|w| w[0].beta > w[1].beta));
        assert!(g.points[0].beta > 2.0 && g.points[0].beta < 4.0);
    }

    #[test]
    fn mu_matches_x_coefficients() {
        let x2 = TiltingPoly::from_i64(&[0, 0, 1]);
        for n in 1..=6u64 {
            let col = crate::fusion::columns(n, 10).swap_remove(n as usize);
            for k in 0..=10u32 {
                let mu = mu_n(&x2, n, k).unwrap();
                assert_eq!(mu.round(), crate::charring::to_f64(&col[k as usize]), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn mu_with_constant_term() {
        let q = TiltingPoly::from_i64(&[1, 1]);
        for n in 1..=5 {
            for k in 0..=8 {
                let exact = oracle_multiplicity(&q, n, k).unwrap();
                assert_eq!(mu_n(&q, n, k).unwrap().round(), charring::to_f64(&exact));
            }
        }
    }

    #[test]
    fn pnprime_examples() {
        assert!(pnprime_ratio_check(8, 1).unwrap());
        assert_eq!(pnprime_ratio(8, 1).unwrap(), 1.0);
        for j in [1, 3, 5, 7] {
            assert!(pnprime_ratio_check(6, j).unwrap());
        }
        assert!(pnprime_all_roots(12).unwrap().0 >= 1.0);
        assert!(pnprime_ratio(6, 4).is_err());
    }

    #[test]
    fn witness_for_v() {
        let r = lower_bound_witness(&TiltingPoly::of_tilting(1), 1, 30).unwrap();
        assert!(r.c_w > 0.0 && r.tail_non_vanishing);
        assert_eq!(r.rows[5].b, BigUint::from(9u32));
    }
}
