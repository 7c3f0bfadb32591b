//! Fusion graph of `V^{⊗2}` and the path-count dynamic program.
//!
//! Vertex `n` stands for `T(2n)`. From `n` there is an arrow to `n+1` labelled
//! 1 and arrows labelled 2 to `n+1-2^i` for `0 <= i <= v2(n+1)`; arrows into 0
//! are dropped. `x_{n,k}` is the label-weighted number of length-`k` paths from
//! 0 to `n`, i.e. the multiplicity of `T(2n)` in `V^{⊗2k}`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::charring::{self, SymmetricCharacter};
use crate::error::Result;

/// Rounds below this width are pulled sequentially.
const PAR_MIN_WIDTH: usize = 512;

/// Out-edges `(target, label)` of vertex `n`, ascending by target.
pub fn successors(n: u64) -> Vec<(u64, u8)> {
    let r = (n + 1).trailing_zeros();
    let mut out: Vec<(u64, u8)> = (0..=r)
        .rev()
        .map(|i| n + 1 - (1u64 << i))
        .filter(|&t| t != 0)
        .map(|t| (t, 2))
        .collect();
    out.push((n + 1, 1));
    out
}

/// Predecessors of `m` with labels. Pulling instead of pushing keeps each
/// round embarrassingly parallel and order independent.
///
/// `n -> m` with label 2 means `m = n+1-2^i` and `2^i | n+1`, which is the
/// same as `2^i | m` and `n = m-1+2^i`.
fn predecessors(m: u64) -> impl Iterator<Item = (u64, u8)> {
    let label_one = m.checked_sub(1).map(|n| (n, 1u8));
    let label_two = if m == 0 { 0..0 } else { 0..m.trailing_zeros() + 1 };
    label_one
        .into_iter()
        .chain(label_two.map(move |i| (m - 1 + (1u64 << i), 2u8)))
}

/// `x_{n,k}` for all `n` at a fixed `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCountTable {
    pub k: u64,
    /// `counts[n] = x_{n,k}` for `n` in `0..=k`.
    pub counts: Vec<BigUint>,
}

impl PathCountTable {
    pub fn get(&self, n: u64) -> BigUint {
        self.counts.get(n as usize).cloned().unwrap_or_default()
    }

    /// `b_{2k}`.
    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }
}

/// Exact DP state, advanced one step at a time.
#[derive(Debug, Clone)]
pub struct FusionDp {
    k: u64,
    counts: Vec<BigUint>,
}

impl Default for FusionDp {
    fn default() -> Self {
        Self::new()
    }
}

impl FusionDp {
    pub fn new() -> Self {
        Self { k: 0, counts: vec![BigUint::one()] }
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn step(&mut self) {
        let old = &self.counts;
        let width = old.len() + 1;
        let pull = |m: usize| {
            let mut acc = BigUint::zero();
            for (n, label) in predecessors(m as u64) {
                if let Some(c) = old.get(n as usize) {
                    if label == 1 {
                        acc += c;
                    } else {
                        acc += c << 1u32;
                    }
                }
            }
            acc
        };
        self.counts = if width >= PAR_MIN_WIDTH {
            (0..width).into_par_iter().map(pull).collect()
        } else {
            (0..width).map(pull).collect()
        };
        self.k += 1;
    }

    pub fn table(&self) -> PathCountTable {
        PathCountTable { k: self.k, counts: self.counts.clone() }
    }
}

pub fn path_counts(k: u64) -> PathCountTable {
    let mut dp = FusionDp::new();
    for _ in 0..k {
        dp.step();
    }
    dp.table()
}

/// `[b_0, b_2, ..., b_{2 k_max}]`, exact.
pub fn b_sequence(k_max: u64) -> Vec<BigUint> {
    let mut dp = FusionDp::new();
    let mut out = Vec::with_capacity(k_max as usize + 1);
    out.push(BigUint::one());
    for _ in 0..k_max {
        dp.step();
        out.push(dp.counts.iter().sum());
    }
    out
}

/// `columns(n_max, k_max)[n][k] = x_{n,k}` for `n <= n_max`, `k <= k_max`.
pub fn columns(n_max: u64, k_max: u64) -> Vec<Vec<BigUint>> {
    let mut out = vec![Vec::with_capacity(k_max as usize + 1); n_max as usize + 1];
    let mut dp = FusionDp::new();
    for k in 0..=k_max {
        if k > 0 {
            dp.step();
        }
        for (n, col) in out.iter_mut().enumerate() {
            col.push(dp.counts.get(n).cloned().unwrap_or_default());
        }
    }
    out
}

/// Same recursion on `4^{-k} x_{n,k}` in doubles. Each round divides by 4,
/// so nothing overflows and the values stay O(1).
#[derive(Debug, Clone)]
pub struct ScaledDp {
    k: u64,
    values: Vec<f64>,
}

impl Default for ScaledDp {
    fn default() -> Self {
        Self::new()
    }
}

impl ScaledDp {
    pub fn new() -> Self {
        Self { k: 0, values: vec![1.0] }
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// `values()[n] = 4^{-k} x_{n,k}`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn step(&mut self) {
        let old = &self.values;
        let width = old.len() + 1;
        let pull = |m: usize| {
            let mut acc = 0.0;
            for (n, label) in predecessors(m as u64) {
                if let Some(c) = old.get(n as usize) {
                    acc += f64::from(label) * c;
                }
            }
            acc * 0.25
        };
        self.values = if width >= 4 * PAR_MIN_WIDTH {
            (0..width).into_par_iter().map(pull).collect()
        } else {
            (0..width).map(pull).collect()
        };
        self.k += 1;
    }
}

/// `B(k) = 4^{-k} b_{2k}` for `k` in `0..=k_max`.
pub fn b_scaled_sequence(k_max: u64) -> Vec<f64> {
    let mut dp = ScaledDp::new();
    let mut out = Vec::with_capacity(k_max as usize + 1);
    out.push(1.0);
    for _ in 0..k_max {
        dp.step();
        out.push(dp.total());
    }
    out
}

/// Which pairing of consecutive tensor powers gives equal summand counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityReport {
    pub k_max: u32,
    /// `b_k` for `k` in `0..=2 k_max + 2`, from the character oracle.
    pub b: Vec<BigUint>,
    /// `b_{2k} = b_{2k+1}` for every `k <= k_max`.
    pub even_odd_holds: bool,
    /// First `k` with `b_{2k} != b_{2k+1}`.
    pub even_odd_first_failure: Option<u32>,
    /// `b_{2k+1} = b_{2k+2}` for every `k <= k_max`.
    pub odd_even_holds: bool,
    pub odd_even_first_failure: Option<u32>,
}

pub fn parity_report(k_max: u32) -> Result<ParityReport> {
    let b = charring::b_oracle_sequence(&charring::chi(1), 2 * k_max + 2)?;
    let first = |offset: usize| {
        (0..=k_max).find(|&k| {
            let i = 2 * k as usize + offset;
            b[i] != b[i + 1]
        })
    };
    let even_odd_first_failure = first(0);
    let odd_even_first_failure = first(1);
    Ok(ParityReport {
        k_max,
        b,
        even_odd_holds: even_odd_first_failure.is_none(),
        even_odd_first_failure,
        odd_even_holds: odd_even_first_failure.is_none(),
        odd_even_first_failure,
    })
}

/// Multiplicities of `T(2n)` in `V^{⊗2k}` read off the oracle, as a dense
/// vector indexed by `n`. Odd highest weights never occur in even powers.
pub fn oracle_column(k: u32) -> Result<Vec<BigUint>> {
    let power = charring::chi(1).pow(2 * k);
    let dec = charring::decompose(&power)?;
    let mut out = vec![BigUint::zero(); k as usize + 1];
    for (w, m) in dec.iter() {
        debug_assert!(w % 2 == 0);
        out[(w / 2) as usize] = m.clone();
    }
    Ok(out)
}

/// Character of `V^{⊗2k}` rebuilt from a path-count table.
pub fn table_character(t: &PathCountTable) -> SymmetricCharacter {
    let mut dec = charring::TiltingDecomposition::new();
    for (n, c) in t.counts.iter().enumerate() {
        dec.insert(2 * n as u64, c.clone());
    }
    dec.character()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn successor_examples() {
        assert_eq!(successors(0), vec![(1, 1)]);
        assert_eq!(successors(1), vec![(1, 2), (2, 1)]);
        assert_eq!(successors(7), vec![(4, 2), (6, 2), (7, 2), (8, 1)]);
        assert_eq!(successors(2), vec![(2, 2), (3, 1)]);
    }

    #[test]
    fn self_loop_iff_positive() {
        for n in 0..200u64 {
            let has = successors(n).contains(&(n, 2));
            assert_eq!(has, n >= 1, "n = {n}");
        }
    }

    #[test]
    fn predecessors_invert_successors() {
        for m in 0..300u64 {
            let mut pulled: Vec<_> = predecessors(m).collect();
            pulled.sort();
            let mut pushed: Vec<_> = (0..700u64)
                .flat_map(|n| successors(n).into_iter().map(move |(t, l)| (n, t, l)))
                .filter(|&(_, t, _)| t == m)
                .map(|(n, _, l)| (n, l))
                .collect();
            pushed.sort();
            assert_eq!(pulled, pushed, "m = {m}");
        }
    }

    #[test]
    fn small_tables() {
        assert_eq!(path_counts(0).counts, big(&[1]));
        assert_eq!(path_counts(2).counts, big(&[0, 2, 1]));
        assert_eq!(path_counts(3).counts, big(&[0, 4, 4, 1]));
    }

    #[test]
    fn b_sequence_examples() {
        assert_eq!(b_sequence(0), big(&[1]));
        assert_eq!(b_sequence(3), big(&[1, 1, 3, 9]));
        assert!((b_scaled_sequence(3)[3] - 0.140625).abs() < 1e-15);
    }

    #[test]
    fn scaled_track_matches_exact() {
        let exact = b_sequence(120);
        let scaled = b_scaled_sequence(120);
        for (k, (e, s)) in exact.iter().zip(&scaled).enumerate() {
            let want = charring::to_f64(e) / 4f64.powi(k as i32);
            assert!((s / want - 1.0).abs() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn parity_pairing() {
        let r = parity_report(10).unwrap();
        assert!(r.odd_even_holds);
        assert_eq!(r.even_odd_first_failure, Some(1));
    }
}
