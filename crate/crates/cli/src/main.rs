//! `fracops` — fractional-calculus operators from the command line.
//!
//! Exit codes: 0 success, 1 computation error, 2 usage error, 3 validation
//! failure. The `FRACOP_THREADS` environment variable caps worker
//! parallelism; `--config` points at a `key = value` file whose entries
//! fill in any flag not given explicitly.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::FileConfig;

#[derive(Parser)]
#[command(name = "fracops", version, about = "Fractional-calculus operator toolkit")]
struct Cli {
    /// `key = value` file supplying defaults (explicit flags win)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Differintegrate a signal and emit a `t,value` CSV
    Deriv(commands::DerivArgs),
    /// Evaluate the two-parameter Mittag-Leffler function
    Ml(commands::MlArgs),
    /// Invert a Laplace-domain expression at one time point
    Invlap(commands::InvlapArgs),
    /// Fractional gradient descent on a seeded quadratic with l1 penalty
    Optimize(commands::OptimizeArgs),
    /// Run a named cross-validation suite (power-rule, semigroup,
    /// gl-vs-rl, laplace-roundtrip, ell1-paths, or all)
    Validate {
        suite: String,
    },
}

/// Marker for errors that should exit with the usage code.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    env_logger::init();
    if let Ok(raw) = std::env::var("FRACOP_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n > 0 => {
                // ignore the error if a pool already exists
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: FRACOP_THREADS must be a positive integer, got `{raw}`");
                return ExitCode::from(2);
            }
        }
    }

    let cli = Cli::parse();
    let file_config = match FileConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };

    let result = match cli.command {
        Command::Deriv(args) => commands::run_deriv(args, &file_config),
        Command::Ml(args) => commands::run_ml(args, &file_config),
        Command::Invlap(args) => commands::run_invlap(args, &file_config),
        Command::Optimize(args) => commands::run_optimize(args, &file_config),
        Command::Validate { suite } => commands::run_validate(&suite),
    };

    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
