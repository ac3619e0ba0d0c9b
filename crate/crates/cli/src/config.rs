use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use swkb_core::analysis::{DEFAULT_DELTA_ALPHA, REFERENCE_SLOPE_CASES};
use swkb_core::QuadratureConfig;

use crate::error::CliError;

/// SWKB quantization lab for the extended radial oscillator.
#[derive(Debug, Parser)]
#[command(name = "swkb", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandArgs {
    /// Analytical and finite-difference slopes dI/dα at α = 0.
    Table1,
    /// Residual R as a function of α, one series per (n, ℓ).
    SweepAlpha,
    /// Residual R at fixed α as a function of n, one series per (ℓ, α).
    SweepN,
    /// log10 Γ against λ = −log10 Δα, with a least-squares slope.
    Convergence,
    /// Numerov eigenvalues of V₋, compared with E_n = 2nω.
    Spectrum,
    /// Shape-invariance residual on a log grid in x.
    SiCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Flags shared by every subcommand. Lists take `a,b,c` or `start:stop:step`.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Quantum numbers n (table1 and convergence pair them with --l; spectrum uses the largest as n_max).
    #[arg(long, global = true, value_name = "LIST")]
    pub n: Option<String>,
    /// Angular momenta ℓ.
    #[arg(long = "l", global = true, value_name = "LIST")]
    pub ell: Option<String>,
    /// Deformation strengths α in [0, 1].
    #[arg(long, global = true, value_name = "LIST")]
    pub alpha: Option<String>,
    /// Finite-difference increment for table1.
    #[arg(long, global = true)]
    pub delta_alpha: Option<f64>,
    /// λ = −log10 Δα values for the convergence study.
    #[arg(long, global = true, value_name = "LIST")]
    pub lambda: Option<String>,
    /// Oscillator frequency ω.
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Eigenvalue tolerance for the spectrum subcommand.
    #[arg(long, global = true)]
    pub e_tol: Option<f64>,
    /// Working decimal digits; 0 selects double precision. Rows that need more are escalated.
    #[arg(long, global = true, env = "SWKB_DIGITS")]
    pub digits: Option<u32>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Directory for series files and the metadata sidecar; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Fully resolved configuration of one run. Recorded in the sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandArgs,
    /// `(n, ℓ)` cases for table1 and convergence; empty for other commands.
    pub pairs: Vec<(u32, f64)>,
    pub n: Vec<u32>,
    pub ell: Vec<f64>,
    pub alpha: Vec<f64>,
    pub lambda: Vec<f64>,
    pub delta_alpha: f64,
    pub omega: f64,
    pub e_tol: f64,
    pub quadrature: QuadratureConfig,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(command: CommandArgs, o: &Options) -> Result<Self, CliError> {
        let n = match &o.n {
            Some(s) => parse_indices(s, "--n")?,
            None => default_n(command),
        };
        let ell = match &o.ell {
            Some(s) => parse_list(s, "--l")?,
            None => default_ell(command),
        };
        let alpha = match &o.alpha {
            Some(s) => parse_list(s, "--alpha")?,
            None => default_alpha(command),
        };
        let lambda = match &o.lambda {
            Some(s) => parse_list(s, "--lambda")?,
            None => vec![2.0, 3.0, 4.0, 5.0],
        };
        let mut quadrature = match o.digits {
            None | Some(0) => QuadratureConfig::double(),
            Some(d) => QuadratureConfig::extended(d),
        };
        if let Some(tol) = o.tol {
            quadrature.abs_tol = tol;
        }
        let pairs = resolve_pairs(command, &n, &ell, o.n.is_some() || o.ell.is_some());
        let cfg = Self {
            command,
            pairs,
            n,
            ell,
            alpha,
            lambda,
            delta_alpha: o.delta_alpha.unwrap_or(DEFAULT_DELTA_ALPHA),
            omega: o.omega.unwrap_or(1.0),
            e_tol: o.e_tol.unwrap_or(1e-9),
            quadrature,
            format: o.format.unwrap_or_default(),
            out: o.out.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.quadrature
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let needs_n = !matches!(self.command, CommandArgs::SiCheck);
        if needs_n && self.n.is_empty() {
            return Err(CliError::Usage("--n must not be empty".into()));
        }
        if self.ell.is_empty() || self.alpha.is_empty() || self.lambda.is_empty() {
            return Err(CliError::Usage(
                "--l, --alpha and --lambda must not be empty".into(),
            ));
        }
        if let Some(&a) = self.alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(CliError::Usage(format!("α must lie in [0, 1], got {a}")));
        }
        if let Some(&l) = self.ell.iter().find(|l| !(l.is_finite() && **l >= 1.0)) {
            return Err(CliError::Usage(format!("ℓ must be at least 1, got {l}")));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(CliError::Usage(format!("ω must be positive, got {}", self.omega)));
        }
        if !(self.e_tol.is_finite() && self.e_tol > 0.0) {
            return Err(CliError::Usage(format!(
                "--e-tol must be positive, got {}",
                self.e_tol
            )));
        }
        Ok(())
    }
}

/// Table1 runs the reference cases plus any `--n × --l` pairs; convergence
/// runs its own defaults unless the user names pairs.
fn resolve_pairs(command: CommandArgs, n: &[u32], ell: &[f64], explicit: bool) -> Vec<(u32, f64)> {
    let user = n.iter().flat_map(|&n| ell.iter().map(move |&l| (n, l)));
    match (command, explicit) {
        (CommandArgs::Table1, true) => reference_pairs().into_iter().chain(user).collect(),
        (CommandArgs::Table1, false) => reference_pairs(),
        (CommandArgs::Convergence, true) => user.collect(),
        (CommandArgs::Convergence, false) => vec![(1, 1.0), (1, 2.0), (2, 1.0), (1000, 1000.0)],
        _ => Vec::new(),
    }
}

fn reference_pairs() -> Vec<(u32, f64)> {
    REFERENCE_SLOPE_CASES
        .iter()
        .map(|&(n, l)| (n, f64::from(l)))
        .collect()
}

fn default_n(command: CommandArgs) -> Vec<u32> {
    match command {
        CommandArgs::SweepN => (1..=10).collect(),
        CommandArgs::Spectrum => vec![3],
        _ => vec![1],
    }
}

fn default_ell(command: CommandArgs) -> Vec<f64> {
    match command {
        CommandArgs::SweepAlpha => vec![1.0, 2.0, 3.0, 20.0],
        CommandArgs::SweepN => vec![1.0, 2.0, 3.0],
        _ => vec![1.0],
    }
}

fn default_alpha(command: CommandArgs) -> Vec<f64> {
    match command {
        CommandArgs::SweepAlpha => (0..=100).map(|i| f64::from(i) / 100.0).collect(),
        CommandArgs::SiCheck => vec![0.0, 1.0],
        CommandArgs::Spectrum => vec![0.0, 1.0],
        _ => vec![1.0],
    }
}

/// Parses `a,b,c` or an inclusive `start:stop:step` range.
pub fn parse_list(s: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    let bad = |what: &str| CliError::Usage(format!("{flag}: {what} in {s:?}"));
    let number = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if !(step > 0.0 && step.is_finite() && start.is_finite() && stop >= start) {
                return Err(bad("range needs start <= stop and a positive step"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as u64;
            if count > 1_000_000 {
                return Err(bad("range too long"));
            }
            (0..=count)
                .map(|i| snap(start + i as f64 * step))
                .collect::<Vec<_>>()
        }
        [_] => s.split(',').map(number).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(bad("expected a comma list or start:stop:step")),
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(bad("non-finite value"));
    }
    Ok(values)
}

/// Rounds to 12 decimals so `0:1:0.01` yields the literals 0.07, 0.29, ...
fn snap(v: f64) -> f64 {
    format!("{v:.12}").parse().unwrap_or(v)
}

pub fn parse_indices(s: &str, flag: &str) -> Result<Vec<u32>, CliError> {
    parse_list(s, flag)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX) {
                Ok(v as u32)
            } else {
                Err(CliError::Usage(format!(
                    "{flag}: {v} is not a non-negative integer"
                )))
            }
        })
        .collect()
}
