//! One table per subcommand.

use num_bigint::{BigInt, BigUint};
use tilt_core::charring::{self, TiltingDecomposition};
use tilt_core::error::Error;
use tilt_core::limitfn::{PsiConfig, PsiModel, DELTA};
use tilt_core::{fusion, genfun, spectral, theta, tiltbound};

use crate::output::Table;
use crate::{CheckFailed, Command, RunConfig, UsageError};

/// Odd `b_k` up to this `k` come from the character ring; beyond it from
/// `b_{2m+1} = b_{2m+2}`.
pub const ODD_ORACLE_CAP: u64 = 256;

/// Sends flag-dependent failures to exit code 2 and numerical ones to 1.
pub fn lift<T>(r: tilt_core::error::Result<T>) -> anyhow::Result<T> {
    r.map_err(|e| match e {
        Error::NotConverged { .. }
        | Error::PrecisionLoss(_)
        | Error::DegenerateRoot { .. }
        | Error::NonTilting { .. } => anyhow::Error::new(CheckFailed(e.to_string())),
        _ => anyhow::Error::new(UsageError(e.to_string())),
    })
}

pub fn run(config: &RunConfig) -> anyhow::Result<Table> {
    match config.command {
        Command::Bk => bk(config.k_max.unwrap_or(20)),
        Command::Xnk => xnk(config.k_max.unwrap_or(12)),
        Command::Genfun => genfun_table(config.s_max.unwrap_or(4), config.k_max.unwrap_or(40)),
        Command::Spectral => spectral_table(config.s_max.unwrap_or(6), config.k_max.unwrap_or(60)),
        Command::Theta => theta_table(config.k_max.unwrap_or(200)),
        Command::Psi => psi_table(&psi_config(config)),
        Command::Omega => omega_table(&psi_config(config), config.k_max.unwrap_or(4096)),
        Command::Bound => bound_table(&config.weights, config.k_max),
        Command::Verify => unreachable!("verify renders its own report"),
    }
}

pub fn psi_config(config: &RunConfig) -> PsiConfig {
    let mut c = PsiConfig::with_window(config.r1, config.r2);
    if let Some(h) = config.grid_h {
        c.h = h;
    }
    if let Some(d) = config.domain {
        c.domain = d;
    }
    c
}

/// `x * 2^-shift` as a double, for integers far beyond the double range.
pub fn scaled(x: &BigUint, shift: u64) -> f64 {
    let bits = x.bits();
    let (top, drop) = if bits > 64 { (x >> (bits - 64), bits - 64) } else { (x.clone(), 0) };
    let m = charring::to_f64(&top);
    let e = drop as i64 - shift as i64;
    // split so neither factor overflows on its own
    m * 2f64.powi((e / 2) as i32) * 2f64.powi((e - e / 2) as i32)
}

/// `ln(x * 2^-shift)` for positive `x`.
pub fn ln_scaled(x: &BigUint, shift: u64) -> f64 {
    let bits = x.bits();
    let drop = bits.saturating_sub(64);
    charring::to_f64(&(x >> drop)).ln() + (drop as f64 - shift as f64) * std::f64::consts::LN_2
}

pub fn bk(k_max: u64) -> anyhow::Result<Table> {
    let even = fusion::b_sequence(k_max.div_ceil(2) + 1);
    let cap = k_max.min(ODD_ORACLE_CAP);
    let oracle = lift(charring::b_oracle_sequence(&charring::chi(1), cap as u32))?;
    let mut t = Table::new(&["k", "b_k", "scaled", "source"]);
    for k in 0..=k_max {
        let (b, source) = if k % 2 == 0 {
            (even[(k / 2) as usize].clone(), "fusion")
        } else if k <= cap {
            (oracle[k as usize].clone(), "oracle")
        } else {
            (even[(k / 2 + 1) as usize].clone(), "pairing")
        };
        if k <= cap {
            let paired = &even[k.div_ceil(2) as usize];
            if &oracle[k as usize] != paired {
                return Err(CheckFailed(format!(
                    "b_{k}: oracle {} disagrees with fusion value {paired}",
                    oracle[k as usize]
                ))
                .into());
            }
        }
        t.push(vec![k.into(), b.clone().into(), scaled(&b, 2 * (k / 2)).into(), source.into()]);
    }
    Ok(t)
}

pub fn xnk(k_max: u64) -> anyhow::Result<Table> {
    let mut t = Table::new(&["n", "k", "x_nk"]);
    let mut dp = fusion::FusionDp::new();
    for k in 0..=k_max {
        if k > 0 {
            dp.step();
        }
        for (n, x) in dp.counts().iter().enumerate() {
            t.push(vec![(n as u64).into(), k.into(), x.clone().into()]);
        }
    }
    Ok(t)
}

pub fn genfun_table(s_max: u32, k_max: u64) -> anyhow::Result<Table> {
    if s_max > 16 {
        return Err(UsageError("--s must be at most 16 for genfun".into()).into());
    }
    let mut t = Table::new(&["s", "k", "coefficient"]);
    for s in 0..=s_max {
        let c = genfun::coefficients(&genfun::x_power_of_two(s), k_max as usize);
        for (k, x) in c.into_iter().enumerate() {
            t.push(vec![u64::from(s).into(), (k as u64).into(), x.into()]);
        }
    }
    Ok(t)
}

pub fn spectral_table(s_max: u32, k_max: u64) -> anyhow::Result<Table> {
    if s_max > 12 {
        return Err(UsageError("--s must be at most 12 for spectral".into()).into());
    }
    let top = 1u64 << s_max;
    let cols = fusion::columns(top, k_max);
    let mut t = Table::new(&["s", "k", "x_exact", "spectral", "scaled", "scaled_rel_err"]);
    for s in 0..=s_max {
        let n = 1u64 << s;
        if k_max < n {
            continue;
        }
        let ln_range = lift(spectral::coeff_scaled_ln_range(s, k_max))?;
        for k in n..=k_max {
            let exact = &cols[n as usize][k as usize];
            let ln_ref = ln_scaled(exact, 2 * k);
            let spectral = spectral::coeff_spectral(s, k).ok();
            let ln_approx = ln_range[k as usize];
            t.push(vec![
                u64::from(s).into(),
                k.into(),
                exact.clone().into(),
                spectral.into(),
                ln_approx.exp().into(),
                (ln_approx - ln_ref).abs().exp_m1().into(),
            ]);
        }
    }
    Ok(t)
}

/// `points` log-spaced samples of `[0.01, 100]`.
pub fn log_grid(points: u64) -> Vec<f64> {
    let last = (points.max(2) - 1) as f64;
    (0..points.max(2)).map(|i| 0.01 * 10f64.powf(4.0 * i as f64 / last)).collect()
}

pub fn theta_table(points: u64) -> anyhow::Result<Table> {
    let mut t = Table::new(&["x", "phi", "dphi", "fe_residual"]);
    for x in log_grid(points) {
        t.push(vec![
            x.into(),
            theta::phi(x).into(),
            lift(theta::phi_derivative(x, 1))?.into(),
            theta::fe_residual(x).into(),
        ]);
    }
    Ok(t)
}

pub fn psi_table(config: &PsiConfig) -> anyhow::Result<Table> {
    let model = lift(PsiModel::build(*config))?;
    eprintln!("psi window ({}, {}): Cauchy difference {:e}", config.r1, config.r2, model.cauchy);
    let mut t = Table::new(&["x", "psi", "omega"]);
    for i in 0..=300u32 {
        let x = 1.0 + 3.0 * f64::from(i) / 300.0;
        t.push(vec![x.into(), lift(model.psi(x))?.into(), lift(model.omega(x))?.into()]);
    }
    Ok(t)
}

/// Powers of two from 16 up to `k_max`.
pub fn omega_samples(k_max: u64) -> Vec<u64> {
    (4..63).map(|j| 1u64 << j).take_while(|&k| k <= k_max).collect()
}

pub fn omega_table(config: &PsiConfig, k_max: u64) -> anyhow::Result<Table> {
    let model = lift(PsiModel::build(*config))?;
    let b = fusion::b_scaled_sequence(k_max);
    let omega_hat = |k: u64| b[k as usize] * (k as f64).powf(DELTA);
    let mut t = Table::new(&["k", "B", "psi", "ratio", "omega_hat", "omega_hat_ratio_4k"]);
    for k in omega_samples(k_max) {
        let psi = lift(model.psi(k as f64))?;
        let ratio_4k = (4 * k <= k_max).then(|| omega_hat(4 * k) / omega_hat(k));
        t.push(vec![
            k.into(),
            b[k as usize].into(),
            psi.into(),
            (b[k as usize] / psi).into(),
            omega_hat(k).into(),
            ratio_4k.into(),
        ]);
    }
    Ok(t)
}

pub fn bound_table(weights: &[u64], k_max: Option<u64>) -> anyhow::Result<Table> {
    let d = TiltingDecomposition::from_pairs(weights.iter().map(|&w| (w, 1)));
    let q = tiltbound::poly_of_tilting(&d);
    if q.is_trivial() {
        return Err(UsageError("--weights must include a positive weight".into()).into());
    }
    let k_max = k_max.map_or_else(|| tiltbound::default_k_max(&q.dim()), |k| k as u32);
    let report = lift(tiltbound::lower_bound_witness(&q, 1, k_max))?;
    eprintln!(
        "W = Q(V), Q = {:?}, dim {}, {}: c_W = {:e} at k = {}, tail non-vanishing: {}",
        q.coeffs().iter().map(BigInt::to_string).collect::<Vec<_>>(),
        report.dim,
        report.parity.name(),
        report.c_w,
        report.argmin_k,
        report.tail_non_vanishing
    );
    let mut t = Table::new(&["k", "b_k", "c_hat"]);
    for r in report.rows {
        t.push(vec![u64::from(r.k).into(), r.b.into(), r.c_hat.into()]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::Cell;

    fn column(t: &Table, i: usize) -> Vec<Cell> {
        t.rows.iter().map(|r| r[i].clone()).collect()
    }

    #[test]
    fn bk_small() {
        let t = bk(6).unwrap();
        let b: Vec<Cell> = [1u64, 1, 1, 3, 3, 9, 9].iter().map(|&x| x.into()).collect();
        assert_eq!(column(&t, 1), b);
        assert_eq!(bk(0).unwrap().rows.len(), 1);
        assert_eq!(t.rows[4][2], Cell::Float(3.0 / 16.0));
    }

    #[test]
    fn bk_past_the_oracle_cap() {
        let t = bk(ODD_ORACLE_CAP + 3).unwrap();
        let last = &t.rows[(ODD_ORACLE_CAP + 3) as usize];
        assert_eq!(last[3], Cell::from("pairing"));
        let b = fusion::b_sequence(ODD_ORACLE_CAP / 2 + 2);
        assert_eq!(last[1], Cell::from(b[(ODD_ORACLE_CAP / 2 + 2) as usize].clone()));
    }

    #[test]
    fn scaled_handles_huge_values() {
        let x = BigUint::from(3u32) << 5000u32;
        assert_eq!(scaled(&x, 5000), 3.0);
        assert_eq!(scaled(&BigUint::from(5u32), 2), 1.25);
    }

    #[test]
    fn bound_rejects_trivial() {
        assert!(bound_table(&[0], Some(4)).is_err());
        assert_eq!(bound_table(&[1], Some(5)).unwrap().rows.len(), 5);
    }
}
