//! `swkb`: regenerates the SWKB slope table, the residual sweeps, the
//! convergence study, the Numerov spectrum and the shape-invariance check
//! as deterministic CSV or JSON files.
//!
//! Exit status is 0 on success, 2 on bad arguments or a failed validation
//! check, and 3 when a computation or a file write fails.

mod commands;
mod config;
mod error;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::config::{Cli, RunConfig};
use crate::error::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            for f in &failures {
                eprintln!("validation failed: {f}");
            }
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("swkb: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<Vec<String>, CliError> {
    let cfg = RunConfig::resolve(cli.command, &cli.options)?;
    let report = commands::run(&cfg)?;
    match &cfg.out {
        Some(dir) => {
            for path in output::write_dir(dir, &cfg, &report)? {
                eprintln!("wrote {}", path.display());
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(output::render_stdout(&cfg, &report)?.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(report.failures)
}
