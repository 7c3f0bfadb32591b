//! Command-line driver for the tilting-module computations.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

pub use config::{Cli, Command, Format, RunConfig};

/// Bad flag values, reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// A verification or convergence check failed; exit code 1.
#[derive(Debug)]
pub struct CheckFailed(pub String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

/// Runs one subcommand and returns the bytes it would write.
pub fn render(config: &RunConfig) -> anyhow::Result<(Vec<u8>, bool)> {
    match config.command {
        Command::Verify => {
            let report = verify::run(config)?;
            Ok((verify::render(&report, config.format)?, report.passed))
        }
        _ => {
            let table = commands::run(config)?;
            Ok((table.render(config.format)?, true))
        }
    }
}

/// Renders and writes to `--out` or stdout; `Ok(false)` means a suite failed.
pub fn execute(config: &RunConfig) -> anyhow::Result<bool> {
    use std::io::Write;
    let (bytes, passed) = render(config)?;
    match &config.out {
        Some(path) => std::fs::write(path, &bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(passed)
}
