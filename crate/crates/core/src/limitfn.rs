//! Rescaled densities `phi_s(x) = 4^-s phi(4^-s x)`, the subset-convolution
//! sums `psi_[-r1,r2]`, the limit `psi` and the amplitude
//! `omega(x) = psi(x) x^delta`, plus the diagnostics comparing the discrete
//! coefficients `A_s(k) = 4^-k x_{2^s,k}` with `phi_s`.
//!
//! All densities live on a uniform grid starting at 0. Convolutions are
//! causal, so values on `[0, L]` only ever need inputs on `[0, L]`; the grid
//! therefore only has to cover the evaluation window, not the support of the
//! widest `phi_s`.

use std::f64::consts::LN_2;
use std::sync::Arc;

use rayon::prelude::*;
use realfft::{RealFftPlanner, RealToComplex, ComplexToReal};

use crate::error::{Error, Result};
use crate::spectral::ScaledSum;
use crate::theta::ThetaEvaluator;

/// `3/2 - log 3 / (2 log 2)`.
pub const DELTA: f64 = 1.5 - 1.098_612_288_668_109_8 / (2.0 * LN_2);

/// Finest grid, as a fraction of the smallest scale `4^s`, for which the
/// sampled mass of `phi_s` is within `1e-6` of `1/2`.
pub const RESOLUTION: f64 = 16.0;

/// Negative convolution values no larger than this fraction of the sup are
/// treated as transform noise and set to 0.
pub const CLIP_REL: f64 = 1e-14;

/// Below this many products the direct sum is used.
const DIRECT_LIMIT: usize = 1 << 16;

/// Samples `values[i]` of a function at `origin + i h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDensity {
    pub origin: f64,
    pub h: f64,
    pub values: Vec<f64>,
}

impl SampledDensity {
    pub fn new(origin: f64, h: f64, values: Vec<f64>) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidInput(format!("grid spacing {h} must be positive")));
        }
        Ok(Self { origin, h, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.h
    }

    /// Right end of the sampled range.
    pub fn end(&self) -> f64 {
        self.x(self.len().saturating_sub(1))
    }

    pub fn mass(&self) -> f64 {
        self.h * self.values.iter().sum::<f64>()
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            origin: self.origin,
            h: self.h,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Cubic Lagrange interpolation on the four surrounding samples; `None`
    /// outside the range where four samples exist.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        let t = (x - self.origin) / self.h;
        if !t.is_finite() || t < 0.0 || self.len() < 4 {
            return None;
        }
        let i = (t.floor() as usize).clamp(1, self.len() - 3);
        if t > (self.len() - 1) as f64 {
            return None;
        }
        let u = t - i as f64;
        let [a, b, c, d] = [
            self.values[i - 1],
            self.values[i],
            self.values[i + 1],
            self.values[i + 2],
        ];
        // nodes at -1, 0, 1, 2
        Some(
            -a * u * (u - 1.0) * (u - 2.0) / 6.0 + b * (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0
                - c * (u + 1.0) * u * (u - 2.0) / 2.0
                + d * (u + 1.0) * u * (u - 1.0) / 6.0,
        )
    }
}

/// Samples of `phi_s` at `i h`, `i < len`.
///
/// Fails with `UnderResolved` when `h > 4^s / RESOLUTION`: coarser grids miss
/// the mass of `phi_s` by more than `1e-6`.
pub fn sample_phi_s(s: i32, h: f64, len: usize) -> Result<SampledDensity> {
    let scale = 4f64.powi(s);
    let limit = scale / RESOLUTION;
    if h > limit * (1.0 + 1e-12) {
        return Err(Error::UnderResolved { h, level: s, limit });
    }
    let ev = ThetaEvaluator::default();
    let inv = 1.0 / scale;
    let values = (0..len)
        .into_par_iter()
        .with_min_len(4096)
        .map(|i| inv * ev.phi(i as f64 * h * inv))
        .collect();
    SampledDensity::new(0.0, h, values)
}

fn same_grid(a: &SampledDensity, b: &SampledDensity) -> Result<()> {
    if (a.h - b.h).abs() > 1e-12 * a.h.max(b.h) {
        return Err(Error::GridMismatch { left: a.h, right: b.h });
    }
    Ok(())
}

/// `h`-weighted discrete convolution, full length.
pub fn convolve(a: &SampledDensity, b: &SampledDensity) -> Result<SampledDensity> {
    let len = (a.len() + b.len()).saturating_sub(1);
    convolve_truncated(a, b, len)
}

/// First `len` samples of the convolution, on the grid starting at
/// `a.origin + b.origin`.
pub fn convolve_truncated(
    a: &SampledDensity,
    b: &SampledDensity,
    len: usize,
) -> Result<SampledDensity> {
    same_grid(a, b)?;
    let origin = a.origin + b.origin;
    let av = &a.values[..a.len().min(len)];
    let bv = &b.values[..b.len().min(len)];
    if av.is_empty() || bv.is_empty() {
        return SampledDensity::new(origin, a.h, vec![0.0; len]);
    }
    let mut out = if av.len() * bv.len() <= DIRECT_LIMIT {
        direct(av, bv, len)
    } else {
        FftConvolver::new(av.len() + bv.len() - 1).convolve(av, bv, len)
    };
    for v in &mut out {
        *v *= a.h;
    }
    clip_noise(&mut out);
    SampledDensity::new(origin, a.h, out)
}

fn direct(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(len.saturating_sub(i)) {
            out[i + j] += x * y;
        }
    }
    out
}

fn clip_noise(v: &mut [f64]) {
    let sup = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let floor = -CLIP_REL * sup;
    for x in v.iter_mut() {
        if *x < 0.0 && *x >= floor {
            *x = 0.0;
        }
    }
}

/// Zero-padded real transform of a fixed power-of-two size.
struct FftConvolver {
    size: usize,
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
}

impl FftConvolver {
    /// Transform size covering a linear convolution of `span` samples.
    fn new(span: usize) -> Self {
        let size = span.next_power_of_two().max(2);
        let mut planner = RealFftPlanner::<f64>::new();
        Self {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    fn spectrum(&self, x: &[f64]) -> Vec<realfft::num_complex::Complex<f64>> {
        let mut buf = self.forward.make_input_vec();
        buf[..x.len()].copy_from_slice(x);
        let mut out = self.forward.make_output_vec();
        self.forward.process(&mut buf, &mut out).expect("sizes match plan");
        out
    }

    fn convolve(&self, a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
        debug_assert!(a.len() + b.len() - 1 <= self.size);
        let mut fa = self.spectrum(a);
        let fb = self.spectrum(b);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x *= y;
        }
        let mut out = self.inverse.make_output_vec();
        self.inverse.process(&mut fa, &mut out).expect("sizes match plan");
        let norm = 1.0 / self.size as f64;
        out.truncate(len.min(self.size));
        for v in &mut out {
            *v *= norm;
        }
        out.resize(len, 0.0);
        out
    }
}

/// `sum over non-empty S of phi_S` for `S` a subset of `levels`, on `len`
/// samples of spacing `h`: `D <- D + phi_s + D * phi_s` level by level, so
/// the unit mass at 0 in `prod (delta_0 + phi_s)` is never sampled.
pub fn subset_sum(levels: &[i32], h: f64, len: usize) -> Result<SampledDensity> {
    let mut d = SampledDensity::new(0.0, h, vec![0.0; len])?;
    let mut fft: Option<FftConvolver> = None;
    for (idx, &s) in levels.iter().enumerate() {
        let f = sample_phi_s(s, h, len)?;
        let conv = if idx == 0 {
            vec![0.0; len]
        } else if len * len <= DIRECT_LIMIT {
            direct(&d.values, &f.values, len)
        } else {
            let c = fft.get_or_insert_with(|| FftConvolver::new(2 * len - 1));
            c.convolve(&d.values, &f.values, len)
        };
        for ((dv, fv), cv) in d.values.iter_mut().zip(&f.values).zip(&conv) {
            *dv += fv + h * cv;
        }
        clip_noise(&mut d.values);
    }
    Ok(d)
}

/// `(3/2)^{-r1} psi_[-r1,r2]` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiApprox {
    pub r1: u32,
    pub r2: u32,
    pub density: SampledDensity,
    /// The factor `(3/2)^{-r1}` already applied to `density`.
    pub normalization: f64,
}

impl PsiApprox {
    pub fn value(&self, x: f64) -> Option<f64> {
        self.density.value_at(x)
    }

    /// `sup_{x in [1,4]} |psi(4x) - (3/8) psi(x)| / psi(x)` on the raw
    /// (unreduced) approximation, sampled at `points` equally spaced `x`.
    pub fn scaling_residual(&self, points: usize) -> Result<f64> {
        let needed = 16.0 + 2.0 * self.density.h;
        if self.density.end() < needed {
            return Err(Error::DomainTooSmall { domain: self.density.end(), needed });
        }
        let mut worst = 0.0f64;
        for i in 0..points {
            let x = 1.0 + 3.0 * i as f64 / (points - 1).max(1) as f64;
            let (a, b) = (self.value(x).expect("in range"), self.value(4.0 * x).expect("in range"));
            worst = worst.max((b - 0.375 * a).abs() / a);
        }
        Ok(worst)
    }
}

/// Default spacing for a window reaching down to level `-r1`.
pub fn default_h(r1: u32) -> f64 {
    4f64.powi(-(r1 as i32)) / RESOLUTION
}

/// `psi_[-r1,r2]` normalized by `(3/2)^{-r1}` on `[0, domain]`.
pub fn build_psi(r1: u32, r2: u32, h: f64, domain: f64) -> Result<PsiApprox> {
    let needed = 4.0 + 2.0 * h;
    if domain < needed {
        return Err(Error::DomainTooSmall { domain, needed });
    }
    let levels: Vec<i32> = (-(r1 as i32)..=r2 as i32).collect();
    let len = (domain / h).floor() as usize + 1;
    let normalization = 1.5f64.powi(-(r1 as i32));
    let d = subset_sum(&levels, h, len)?;
    Ok(PsiApprox { r1, r2, density: d.scaled(normalization), normalization })
}

/// `sup_{[1,4]} |psi_{r+1} - psi_r|` for `r` in `r_min..r_max`, where
/// `psi_r = (3/2)^{-r} psi_[-r,r]` is built on spacing `4^-r / RESOLUTION`.
/// Coarse grid points coincide with every fourth fine one, so no
/// interpolation enters the comparison.
pub fn cauchy_differences(r_min: u32, r_max: u32, domain: f64) -> Result<Vec<(u32, f64)>> {
    let builds: Vec<PsiApprox> = (r_min..=r_max)
        .map(|r| build_psi(r, r, default_h(r), domain))
        .collect::<Result<_>>()?;
    Ok(builds
        .windows(2)
        .map(|w| {
            let (coarse, fine) = (&w[0].density, &w[1].density);
            let lo = (1.0 / coarse.h).ceil() as usize;
            let hi = (4.0 / coarse.h).floor() as usize;
            let diff = (lo..=hi)
                .map(|i| (coarse.values[i] - fine.values[4 * i]).abs())
                .fold(0.0, f64::max);
            (w[0].r1, diff)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiConfig {
    pub r1: u32,
    pub r2: u32,
    pub h: f64,
    pub domain: f64,
    /// Largest acceptable `sup_{[1,4]} |psi_(r1,r2) - psi_(r1-1,r2-1)|`.
    pub cauchy_tol: f64,
}

impl Default for PsiConfig {
    fn default() -> Self {
        Self { r1: 6, r2: 6, h: default_h(6), domain: 17.0, cauchy_tol: 1e-3 }
    }
}

impl PsiConfig {
    pub fn with_window(r1: u32, r2: u32) -> Self {
        Self { r1, r2, h: default_h(r1), ..Self::default() }
    }
}

/// A converged-or-not approximation of `psi`, evaluable anywhere on `(0, inf)`.
#[derive(Debug, Clone)]
pub struct PsiModel {
    pub config: PsiConfig,
    pub approx: PsiApprox,
    /// Cauchy difference against the window shrunk by one level at each end.
    pub cauchy: f64,
}

impl PsiModel {
    pub fn build(config: PsiConfig) -> Result<Self> {
        if config.r1 == 0 || config.r2 == 0 {
            return Err(Error::InvalidInput("window needs r1, r2 >= 1".into()));
        }
        let approx = build_psi(config.r1, config.r2, config.h, config.domain)?;
        let prev = build_psi(config.r1 - 1, config.r2 - 1, config.h, 4.0 + 4.0 * config.h)?;
        let d = &approx.density;
        let lo = (1.0 / d.h).ceil() as usize;
        let hi = (4.0 / d.h).floor() as usize;
        let cauchy = (lo..=hi)
            .map(|i| (d.values[i] - prev.density.values[i]).abs())
            .fold(0.0, f64::max);
        Ok(Self { config, approx, cauchy })
    }

    pub fn converged(&self) -> bool {
        self.cauchy <= self.config.cauchy_tol
    }

    /// `psi(x)`: reduce to `[1,4)` with `psi(4x) = (3/8) psi(x)` and
    /// interpolate.
    pub fn psi(&self, x: f64) -> Result<f64> {
        if !self.converged() {
            return Err(Error::NotConverged { diff: self.cauchy, tol: self.config.cauchy_tol });
        }
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::InvalidInput(format!("psi needs x > 0, got {x}")));
        }
        let (y, e) = reduce(x);
        let v = self.approx.value(y).expect("domain covers [1,4]");
        Ok(v * 0.375f64.powi(e))
    }

    pub fn omega(&self, x: f64) -> Result<f64> {
        Ok(self.psi(x)? * x.powf(DELTA))
    }
}

/// `x = 4^e y` with `y` in `[1, 4)`.
pub fn reduce(x: f64) -> (f64, i32) {
    let mut e = (x.ln() / (4f64).ln()).floor() as i32;
    let mut y = x * 4f64.powi(-e);
    // guard the floor against rounding at exact powers of 4
    if y >= 4.0 {
        y /= 4.0;
        e += 1;
    } else if y < 1.0 {
        y *= 4.0;
        e -= 1;
    }
    (y, e)
}

/// `phi_s(y) = 4^-s phi(4^-s y)`.
pub fn phi_s(s: i32, y: f64) -> f64 {
    let scale = 4f64.powi(-s);
    scale * ThetaEvaluator::default().phi(y * scale)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvsPhiRow {
    pub s: u32,
    /// `max_k |A_s(k) - phi_s(k-1)|`.
    pub e: f64,
    pub argmax_k: u64,
    pub e_times_8s: f64,
    /// `E(s) / E(s-1)`.
    pub ratio: Option<f64>,
}

/// `E(s)` for each `s`. The scan runs from `k = 2^s` and stops once both
/// sequences have passed their peak and fallen below `1e-3 E`.
pub fn a_vs_phi_diagnostic(s_min: u32, s_max: u32) -> Result<Vec<AvsPhiRow>> {
    let mut rows: Vec<AvsPhiRow> = Vec::new();
    for s in s_min..=s_max {
        let (e, argmax_k) = max_discrepancy(s)?;
        let ratio = rows.last().map(|r| e / r.e);
        rows.push(AvsPhiRow { s, e, argmax_k, e_times_8s: e * 8f64.powi(s as i32), ratio });
    }
    Ok(rows)
}

fn max_discrepancy(s: u32) -> Result<(f64, u64)> {
    let sum = ScaledSum::new(s)?;
    let scale = 1u64 << (2 * s);
    let chunk = (scale / 4).max(256);
    let mut best = (0.0f64, 0u64);
    let mut start = 1u64 << s;
    loop {
        let end = start + chunk;
        let (local, tail_small) = (start..end)
            .into_par_iter()
            .map(|k| {
                let a = sum.eval(k).0;
                let p = phi_s(s as i32, (k - 1) as f64);
                ((a - p).abs(), k, a.max(p))
            })
            .fold(
                || ((0.0f64, 0u64), 0.0f64),
                |(b, m), (d, k, v)| (if d > b.0 { (d, k) } else { b }, m.max(v)),
            )
            .reduce(
                || ((0.0, 0), 0.0),
                |(b1, m1), (b2, m2)| {
                    let b = if b2.0 > b1.0 || (b2.0 == b1.0 && b2.1 < b1.1) { b2 } else { b1 };
                    (b, m1.max(m2))
                },
            );
        if local.0 > best.0 {
            best = local;
        }
        if start > 2 * scale && tail_small < 1e-3 * best.0 {
            return Ok(best);
        }
        start = end;
    }
}

/// `max_k A_s(k) (k/4^s)^r 4^s`, the empirical constant in the polynomial
/// decay bound `A_s(k) < C_r 4^-s (4^s/k)^r`.
pub fn assumption_ii_constant(s: u32, r: i32) -> Result<f64> {
    let sum = ScaledSum::new(s)?;
    let scale = 4f64.powi(s as i32);
    let mut best = 0.0f64;
    let mut k = 1u64 << s;
    loop {
        let v = sum.eval(k).0 * (k as f64 / scale).powi(r) * scale;
        best = best.max(v);
        if k as f64 > 4.0 * scale && v < 1e-6 * best {
            return Ok(best);
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_value() {
        let direct = 1.5 - 3f64.ln() / (2.0 * 2f64.ln());
        assert!((DELTA - direct).abs() < 1e-15);
        assert!((DELTA - 0.707_518_749_639_42).abs() < 1e-14);
    }

    #[test]
    fn sampled_mass_is_half() {
        let f = sample_phi_s(0, 1.0 / 16.0, 40 * 16).unwrap();
        assert!((f.mass() - 0.5).abs() < 1e-6);
        let g = sample_phi_s(-1, 1.0 / 64.0, 10 * 64).unwrap();
        assert!((g.mass() - 0.5).abs() < 1e-6);
        assert!(matches!(
            sample_phi_s(0, 1.0 / 8.0, 10),
            Err(Error::UnderResolved { level: 0, .. })
        ));
    }

    #[test]
    fn sample_is_rescaled_phi() {
        let f = sample_phi_s(2, 0.5, 200).unwrap();
        for i in [3usize, 17, 64, 150] {
            let x = f.x(i);
            assert!((f.values[i] - phi_s(2, x)).abs() < 1e-16);
            assert!((f.values[i] - ThetaEvaluator::default().phi(x / 16.0) / 16.0).abs() < 1e-16);
        }
    }

    #[test]
    fn convolution_basics() {
        let h = 1.0 / 32.0;
        let a = sample_phi_s(0, h, 40 * 32).unwrap();
        let b = sample_phi_s(1, h, 160 * 32).unwrap();
        let c = convolve(&a, &b).unwrap();
        assert!((c.mass() / (a.mass() * b.mass()) - 1.0).abs() < 1e-9);
        assert!(c.sup() <= (a.mass() * b.sup()).min(a.sup() * b.mass()) * (1.0 + 1e-12));
        let mut unit = vec![0.0; 5];
        unit[0] = 1.0 / h;
        let id = convolve(&a, &SampledDensity::new(0.0, h, unit).unwrap()).unwrap();
        for (x, y) in a.values.iter().zip(&id.values) {
            assert!((x - y).abs() < 1e-15);
        }
        let other = SampledDensity::new(0.0, h / 2.0, vec![1.0]).unwrap();
        assert!(matches!(convolve(&a, &other), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn fft_matches_direct() {
        let h = 1.0 / 64.0;
        let a = sample_phi_s(0, h, 600).unwrap();
        let b = sample_phi_s(-1, h, 700).unwrap();
        let fast = FftConvolver::new(1299).convolve(&a.values, &b.values, 1299);
        let slow = direct(&a.values, &b.values, 1299);
        for (x, y) in fast.iter().zip(&slow) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn subset_sums_small() {
        let h = 1.0 / 64.0;
        let len = 8 * 64;
        let one = subset_sum(&[0], h, len).unwrap();
        assert_eq!(one.values, sample_phi_s(0, h, len).unwrap().values);
        let two = subset_sum(&[0, 1], h, len).unwrap();
        let p0 = sample_phi_s(0, h, len).unwrap();
        let p1 = sample_phi_s(1, h, len).unwrap();
        let c = convolve_truncated(&p0, &p1, len).unwrap();
        for i in 0..len {
            let want = p0.values[i] + p1.values[i] + c.values[i];
            assert!((two.values[i] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn reduce_to_unit_interval() {
        for &x in &[1.0, 3.999, 4.0, 17.0, 0.3, 1e-5, 4096.0] {
            let (y, e) = reduce(x);
            assert!((1.0..4.0).contains(&y), "x = {x}");
            assert!((y * 4f64.powi(e) / x - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn peak_scales_with_level() {
        let argmax = |s: i32| {
            let f = sample_phi_s(s, 4f64.powi(s) / 256.0, 1024).unwrap();
            let i = (0..f.len()).max_by(|&a, &b| f.values[a].total_cmp(&f.values[b])).unwrap();
            f.x(i)
        };
        let p0 = argmax(0);
        assert!((argmax(1) / p0 - 4.0).abs() < 1e-12);
        assert!((argmax(2) / p0 - 16.0).abs() < 1e-12);
    }
}
