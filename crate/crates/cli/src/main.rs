use std::process::ExitCode;

use clap::Parser;
use tilt_cli::{execute, Cli, RunConfig, UsageError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = config.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(&config) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            // CheckFailed and anything unexpected both count as failures
            ExitCode::from(if e.is::<UsageError>() { 2 } else { 1 })
        }
    }
}
