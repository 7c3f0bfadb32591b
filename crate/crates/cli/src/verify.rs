//! Invariant suites behind `tilt verify`. The report holds only computed
//! values, so repeated runs are byte-identical; timings go to stderr.

use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::Serialize;
use tilt_core::limitfn::{self, PsiModel, DELTA};
use tilt_core::tiltbound::{self, TiltingPoly};
use tilt_core::{charring, fusion, genfun, spectral, theta};

use crate::commands::{lift, ln_scaled, log_grid};
use crate::config::SUITES;
use crate::output::{format_float, Table};
use crate::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity, when it is numeric.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn flag(name: &str, passed: bool) -> Self {
        Self { name: name.into(), passed, measured: None, limit: None, detail: None }
    }

    /// Passes when `measured <= limit`.
    fn at_most(name: &str, measured: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            passed: measured <= limit,
            measured: Some(measured),
            limit: Some(limit),
            detail: None,
        }
    }

    fn with_detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ERow {
    pub s: u32,
    pub e: f64,
    pub argmax_k: u64,
    pub e_times_8s: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Suite {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub e_table: Vec<ERow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub passed: bool,
    pub suites: Vec<Suite>,
}

pub fn run(config: &RunConfig) -> anyhow::Result<Report> {
    let mut suites = Vec::new();
    for name in SUITES {
        if config.suite.as_deref().is_some_and(|s| s != name) {
            continue;
        }
        let start = Instant::now();
        let mut e_table = Vec::new();
        let checks = match name {
            "charring" => charring_suite()?,
            "genfun" => genfun_suite()?,
            "spectral" => spectral_suite()?,
            "theta" => theta_suite()?,
            "limitfn" => limitfn_suite(config, &mut e_table)?,
            "tiltbound" => tiltbound_suite()?,
            _ => unreachable!(),
        };
        eprintln!("suite {name}: {:.2?}", start.elapsed());
        let passed = checks.iter().all(|c| c.passed);
        suites.push(Suite { name: name.into(), passed, checks, e_table });
    }
    Ok(Report { passed: suites.iter().all(|s| s.passed), suites })
}

pub fn render(report: &Report, format: Format) -> anyhow::Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut t = Table::new(&["suite", "check", "passed", "measured", "limit", "detail"]);
            for s in &report.suites {
                for c in &s.checks {
                    t.push(vec![
                        s.name.as_str().into(),
                        c.name.as_str().into(),
                        if c.passed { "pass" } else { "fail" }.into(),
                        c.measured.into(),
                        c.limit.into(),
                        c.detail.as_deref().into(),
                    ]);
                }
            }
            t.render(Format::Csv)
        }
    }
}

fn charring_suite() -> anyhow::Result<Vec<Check>> {
    let mut mismatches = 0;
    for k in 0..=20u32 {
        let dp = fusion::path_counts(u64::from(k));
        if dp.counts != lift(fusion::oracle_column(k))? {
            mismatches += 1;
        }
    }
    let parity = lift(fusion::parity_report(40))?;
    let support_ok = (0..256).all(|n| charring::chi(n) == charring::chi_from_support(n));
    Ok(vec![
        Check::at_most("path_counts_vs_decompose_k_le_20", f64::from(mismatches), 0.0),
        Check::flag("b_odd_equals_next_even_k_le_80", parity.odd_even_holds),
        Check::flag("support_formula_n_lt_256", support_ok),
    ])
}

fn genfun_suite() -> anyhow::Result<Vec<Check>> {
    let x1 = genfun::coefficients(&lift(genfun::x_general(1))?, 200);
    let x1_ok = (1..=200).all(|k| x1[k] == BigInt::from(1) << (k - 1));
    let half = BigRational::new(1.into(), 2.into());
    Ok(vec![
        Check::flag("x1_closed_form_k_le_200", x1_ok),
        Check::flag("recurrence_s_le_6", (0..=6).all(genfun::recurrence_check)),
        Check::flag("prop_f_series_order_200_s_le_6", (0..=6).all(|s| genfun::prop_f_series_check(s, 200))),
        Check::flag("product_rule_vs_dp_n_lt_64_k_le_60", lift(genfun::product_rule_check(64, 60))?),
        Check::flag("graph_equations_n_le_64", lift(genfun::x_equations_check(64, 60))?),
        Check::flag("x_at_quarter_s_le_12", genfun::values_at_quarter(12).iter().all(|v| *v == half)),
    ])
}

/// Exact path counts of `n = 2^s` for `s <= s_max`, `k <= k_max`.
fn power_columns(s_max: u32, k_max: u64) -> Vec<Vec<BigUint>> {
    let cols = fusion::columns(1 << s_max, k_max);
    (0..=s_max).map(|s| cols[1usize << s].clone()).collect()
}

/// `(mismatches, exact fallbacks)` of the double-precision closed form.
pub fn spectral_rounding(s_max: u32, k_max: u64) -> anyhow::Result<(u32, u32)> {
    let cols = power_columns(s_max, k_max);
    let (mut bad, mut fallbacks) = (0, 0);
    for s in 0..=s_max {
        for k in 1u64 << s..=k_max {
            let exact = BigInt::from(cols[s as usize][k as usize].clone());
            let value = match spectral::coeff_spectral(s, k) {
                Ok(v) => BigInt::from(v.round() as i128),
                Err(_) => {
                    fallbacks += 1;
                    lift(spectral::coeff_exact(s, k))?
                }
            };
            if value != exact {
                bad += 1;
            }
        }
    }
    Ok((bad, fallbacks))
}

/// Worst relative error of the scaled closed form against `4^-k x_{2^s,k}`,
/// compared through logarithms so values below the double range count too.
pub fn spectral_scaled_error(s_max: u32, k_max: u64) -> anyhow::Result<f64> {
    let cols = power_columns(s_max, k_max);
    let mut worst = 0.0f64;
    for s in 0..=s_max {
        let approx = lift(spectral::coeff_scaled_ln_range(s, k_max))?;
        for k in 1u64 << s..=k_max {
            let reference = ln_scaled(&cols[s as usize][k as usize], 2 * k);
            let rel = (approx[k as usize] - reference).abs().exp_m1();
            // NaN must not hide behind max
            worst = if rel.is_nan() { f64::INFINITY } else { worst.max(rel) };
        }
    }
    Ok(worst)
}

fn spectral_suite() -> anyhow::Result<Vec<Check>> {
    let (bad, fallbacks) = spectral_rounding(6, 60)?;
    let scaled_err = spectral_scaled_error(8, 2000)?;
    let cols = fusion::columns(63, 60);
    let mut general = 0.0f64;
    for n in 1..64u64 {
        for k in n..=60 {
            let exact = charring::to_f64(&cols[n as usize][k as usize]);
            let v = lift(spectral::coeff_general(n, k))?;
            general = general.max(((v - exact) / exact).abs());
        }
    }
    Ok(vec![
        Check::at_most("closed_form_rounding_mismatches_s_le_6_k_le_60", f64::from(bad), 0.0)
            .with_detail(format!("{fallbacks} values beyond double precision used the exact path")),
        Check::at_most("scaled_rel_err_s_le_8_k_le_2000", scaled_err, 1e-9),
        Check::at_most("partial_fraction_rel_err_n_lt_64_k_le_60", general, 1e-12),
    ])
}

/// `(max FE residual, min phi)` on the 200-point grid of `[0.01, 100]`.
pub fn theta_grid() -> (f64, f64) {
    log_grid(200).into_iter().fold((0.0f64, f64::INFINITY), |(r, m), x| {
        (r.max(theta::fe_residual(x)), m.min(theta::phi(x)))
    })
}

fn theta_suite() -> anyhow::Result<Vec<Check>> {
    let (residual, min_phi) = theta_grid();
    let integral = theta::phi_integral();
    Ok(vec![
        Check::at_most("fe_residual_log_grid_200", residual, 1e-12),
        Check::at_most("integral_minus_half", (integral - 0.5).abs(), 1e-8),
        Check { name: "positive_on_grid".into(), passed: min_phi > 0.0, measured: Some(min_phi), limit: None, detail: None },
    ])
}

/// Sampled `k` for the comparison of `B(k)` with `psi(k)`.
pub const OMEGA_SAMPLES: [u64; 5] = [256, 512, 1024, 2048, 4096];

/// `(k, |B(k)/psi(k) - 1|)` and `(k, omega_hat(4k)/omega_hat(k))` for `k` in {256, 1024}.
pub fn main_theorem_trend(model: &PsiModel) -> anyhow::Result<(Vec<(u64, f64)>, Vec<(u64, f64)>)> {
    let b = fusion::b_scaled_sequence(4 * 1024);
    let mut dev = Vec::new();
    for k in OMEGA_SAMPLES {
        dev.push((k, (b[k as usize] / lift(model.psi(k as f64))? - 1.0).abs()));
    }
    let omega_hat = |k: u64| b[k as usize] * (k as f64).powf(DELTA);
    let ratios = [256u64, 1024].iter().map(|&k| (k, omega_hat(4 * k) / omega_hat(k))).collect();
    Ok((dev, ratios))
}

fn list(v: &[(u64, f64)]) -> String {
    v.iter().map(|(k, x)| format!("{k}:{}", format_float(*x))).collect::<Vec<_>>().join(" ")
}

fn limitfn_suite(config: &RunConfig, e_table: &mut Vec<ERow>) -> anyhow::Result<Vec<Check>> {
    let mut checks = Vec::new();

    let cauchy = lift(limitfn::cauchy_differences(2, 6, 5.0))?;
    let decreasing = cauchy.windows(2).all(|w| w[1].1 < w[0].1);
    let detail = list(&cauchy.iter().map(|&(r, d)| (u64::from(r), d)).collect::<Vec<_>>());
    checks.push(Check::flag("cauchy_strictly_decreasing_r_2_to_5", decreasing).with_detail(detail));

    let model = lift(PsiModel::build(crate::commands::psi_config(config)))?;
    checks.push(Check::at_most("psi_window_cauchy", model.cauchy, model.config.cauchy_tol));
    let residual = lift(model.approx.scaling_residual(3001))?;
    checks.push(Check::at_most("scaling_residual_on_1_4", residual, 1e-4));
    let min = model.approx.density.values.iter().copied().fold(f64::INFINITY, f64::min);
    checks.push(Check { name: "psi_non_negative".into(), passed: min >= 0.0, measured: Some(min), limit: None, detail: None });

    let rows = lift(limitfn::a_vs_phi_diagnostic(4, 10))?;
    let ratios: Vec<(u64, f64)> =
        rows.iter().filter(|r| (6..=10).contains(&r.s)).map(|r| (u64::from(r.s), r.ratio.unwrap())).collect();
    let in_band = ratios.iter().all(|&(_, q)| (1.0 / 16.0..=1.0 / 3.0).contains(&q));
    checks.push(Check::flag("e_ratio_in_1_16_to_1_3_s_5_to_9", in_band).with_detail(list(&ratios)));
    e_table.extend(rows.iter().map(|r| ERow {
        s: r.s,
        e: r.e,
        argmax_k: r.argmax_k,
        e_times_8s: r.e_times_8s,
        ratio: r.ratio,
    }));

    let (dev, ratios) = main_theorem_trend(&model)?;
    let worst = dev.iter().map(|d| d.1).fold(0.0, f64::max);
    checks.push(Check::at_most("b_over_psi_deviation_k_256_to_4096", worst, 0.05).with_detail(list(&dev)));
    checks.push(Check::flag("deviation_shrinks_256_to_4096", dev[4].1 <= dev[0].1));
    let band = ratios.iter().all(|&(_, q)| (0.98..=1.02).contains(&q));
    checks.push(Check::flag("omega_hat_4k_ratio_within_2_percent", band).with_detail(list(&ratios)));
    Ok(checks)
}

pub fn basic_modules() -> [TiltingPoly; 3] {
    [TiltingPoly::from_i64(&[0, 1]), TiltingPoly::from_i64(&[0, 0, 1]), TiltingPoly::from_i64(&[0, -2, 0, 1])]
}

/// `(rounding mismatches, worst relative error)` of `mu_n` for `n <= 15`, `k <= 12`.
pub fn mu_agreement() -> anyhow::Result<(u32, f64)> {
    let (mut bad, mut worst) = (0, 0.0f64);
    for q in basic_modules() {
        for n in 1..=15u64 {
            for k in 0..=12u32 {
                let exact = charring::to_f64(&lift(tiltbound::oracle_multiplicity(&q, n, k))?);
                let mu = lift(tiltbound::mu_n(&q, n, k))?;
                if mu.round() != exact {
                    bad += 1;
                }
                if exact != 0.0 {
                    worst = worst.max(((mu - exact) / exact).abs());
                }
            }
        }
    }
    Ok((bad, worst))
}

pub const CORPUS_SEED: u64 = 20;

fn tiltbound_suite() -> anyhow::Result<Vec<Check>> {
    let (bad, worst) = mu_agreement()?;
    let corpus = tiltbound::random_effective_corpus(20, 8, CORPUS_SEED);
    let mut lemma_failures = 0;
    let mut text_formula_disagrees = 0;
    for q in &corpus {
        if !lift(tiltbound::lemma_q_check(q, 400))?.all() {
            lemma_failures += 1;
        }
        let squares: BigInt = q.character().laurent().iter().map(|a| a * a).sum();
        if squares != tiltbound::dynkin_data(q).q_prime_at_2 {
            text_formula_disagrees += 1;
        }
    }
    let mut witness = Vec::new();
    let mut witness_ok = true;
    for n in 1..=3 {
        let r = lift(tiltbound::lower_bound_witness(&TiltingPoly::of_tilting(n), 1, 30))?;
        witness_ok &= r.c_w > 0.0 && r.tail_non_vanishing;
        witness.push((n, r.c_w));
    }
    let pn6 = [1u64, 3, 5, 7].iter().all(|&j| tiltbound::pnprime_ratio_check(6, j).unwrap_or(false));
    let (pn12, _) = lift(tiltbound::pnprime_all_roots(12))?;
    Ok(vec![
        Check::at_most("mu_rounding_mismatches_n_le_15_k_le_12", f64::from(bad), 0.0),
        Check::at_most("mu_rel_err", worst, 1e-8),
        Check::at_most("lemma_q_failures_random_corpus_20", f64::from(lemma_failures), 0.0)
            .with_detail(format!(
                "sum of squared weight multiplicities differs from Q'(2) for {text_formula_disagrees} of 20"
            )),
        Check::flag("witness_c_w_positive_k_le_30", witness_ok).with_detail(list(&witness)),
        Check::flag("pnprime_ratio_n_6", pn6),
        Check { name: "pnprime_ratio_n_12_all_roots".into(), passed: pn12 >= 1.0, measured: Some(pn12), limit: Some(1.0), detail: None },
    ])
}
