use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn default_for(command: Command) -> Self {
        if command == Command::Verify {
            Format::Json
        } else {
            Format::Csv
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Summand counts b_k of V^k
    Bk,
    /// Multiplicities x_{n,k} of T(2n) in V^{2k}
    Xnk,
    /// Series coefficients of X_{2^s} from the rational generating function
    Genfun,
    /// Closed-form coefficients x_{2^s,k} against the fusion graph
    Spectral,
    /// The theta density phi, its derivative and functional-equation residual
    Theta,
    /// psi and omega sampled on [1, 4]
    Psi,
    /// B(k) = 4^-k b_{2k} against psi(k)
    Omega,
    /// Lower-bound witness for b_k of an arbitrary tilting module
    Bound,
    /// Run the verification suites and emit a report
    Verify,
}

#[derive(Debug, Parser)]
#[command(name = "tilt", version, about = "Tensor powers of tilting modules for SL2 in characteristic 2")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Largest k (or sample bound) for the table
    #[arg(long = "max", global = true)]
    pub k_max: Option<u64>,

    /// Largest level s
    #[arg(long = "s", global = true)]
    pub s_max: Option<u32>,

    /// Lower window depth of the psi approximation
    #[arg(long, global = true)]
    pub r1: Option<u32>,

    /// Upper window depth of the psi approximation
    #[arg(long, global = true)]
    pub r2: Option<u32>,

    /// Grid spacing for the psi convolutions
    #[arg(long = "grid-h", global = true)]
    pub grid_h: Option<f64>,

    /// Right end of the psi grid
    #[arg(long, global = true)]
    pub domain: Option<f64>,

    /// Output format; tables default to csv, the verify report to json
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for parallel stages
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Run only this verification suite
    #[arg(long, global = true)]
    pub suite: Option<String>,

    /// Highest weights of the summands of W for `bound`, comma separated
    #[arg(long, global = true, default_value = "1")]
    pub weights: String,
}

pub const SUITES: [&str; 6] = ["charring", "genfun", "spectral", "theta", "limitfn", "tiltbound"];

/// Validated settings for one run. Every subcommand has usable defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub k_max: Option<u64>,
    pub s_max: Option<u32>,
    pub r1: u32,
    pub r2: u32,
    pub grid_h: Option<f64>,
    pub domain: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub suite: Option<String>,
    pub weights: Vec<u64>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            k_max: None,
            s_max: None,
            r1: 6,
            r2: 6,
            grid_h: None,
            domain: None,
            format: Format::default_for(command),
            out: None,
            threads: None,
            suite: None,
            weights: vec![1],
        }
    }

    pub fn from_cli(cli: Cli) -> Result<Self, UsageError> {
        let weights = cli
            .weights
            .split(',')
            .map(|w| w.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| UsageError(format!("--weights: {e}")))?;
        if let Some(s) = &cli.suite {
            if !SUITES.contains(&s.as_str()) {
                return Err(UsageError(format!(
                    "unknown suite {s:?}; expected one of {}",
                    SUITES.join(", ")
                )));
            }
        }
        if cli.threads == Some(0) {
            return Err(UsageError("--threads must be positive".into()));
        }
        for (name, v) in [("--grid-h", cli.grid_h), ("--domain", cli.domain)] {
            if matches!(v, Some(x) if !(x > 0.0 && x.is_finite())) {
                return Err(UsageError(format!("{name} must be a positive number")));
            }
        }
        for (name, v) in [("--r1", cli.r1), ("--r2", cli.r2)] {
            if matches!(v, Some(r) if r == 0 || r > 12) {
                return Err(UsageError(format!("{name} must be in 1..=12")));
            }
        }
        Ok(Self {
            command: cli.command,
            k_max: cli.k_max,
            s_max: cli.s_max,
            r1: cli.r1.unwrap_or(6),
            r2: cli.r2.unwrap_or(6),
            grid_h: cli.grid_h,
            domain: cli.domain,
            format: cli.format.unwrap_or(Format::default_for(cli.command)),
            out: cli.out,
            threads: cli.threads,
            suite: cli.suite,
            weights,
        })
    }
}
