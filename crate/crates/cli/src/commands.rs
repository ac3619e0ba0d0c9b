use rayon::prelude::*;
use serde_json::{json, Value};
use swkb_core::analysis::{
    alpha_sweep, convergence_sweep, effective_config, lambda_of, n_sweep, slope_report, SweepSeries,
};
use swkb_core::shape_invariance::{si_profile, SampleGrid};
use swkb_core::spectrum::{numerov_solve, NumerovGrid};
use swkb_core::{Error, ModelParams};

use crate::config::{CommandArgs, RunConfig};
use crate::error::CliError;
use crate::output::{precision_meta, Report, Table};

/// Accepted deviation of the fitted convergence slope from −1.
pub const SLOPE_TOLERANCE: f64 = 0.05;
/// Largest accepted `|E_k − 2kω|` from the Numerov oracle.
pub const SPECTRUM_TOLERANCE: f64 = 1e-6;
/// Largest grid residual still counted as shape invariant.
pub const SI_TOLERANCE: f64 = 1e-12;

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    match cfg.command {
        CommandArgs::Table1 => table1(cfg),
        CommandArgs::SweepAlpha => sweep_alpha(cfg),
        CommandArgs::SweepN => sweep_n(cfg),
        CommandArgs::Convergence => convergence(cfg),
        CommandArgs::Spectrum => spectrum(cfg),
        CommandArgs::SiCheck => si_check(cfg),
    }
}

fn effective_digits(cfg: &RunConfig, ell: f64, lambda: Option<f64>) -> u32 {
    effective_config(&cfg.quadrature, ell, lambda).precision_digits
}

fn records_to_rows(series: &SweepSeries) -> Vec<Vec<f64>> {
    series
        .records()
        .iter()
        .map(|r| vec![r.control, r.value, r.residual])
        .collect()
}

fn table1(cfg: &RunConfig) -> Result<Report, CliError> {
    let lambda = lambda_of(cfg.delta_alpha);
    let outcomes: Vec<Result<Row, CliError>> = cfg
        .pairs
        .par_iter()
        .map(|&(n, ell)| table1_row(cfg, n, ell))
        .collect();

    let mut report = Report::default();
    let mut rows = Vec::with_capacity(outcomes.len());
    let mut details = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        let row = outcome?;
        if let Some(failure) = &row.failure {
            report.failures.push(failure.clone());
        }
        rows.push(vec![
            f64::from(row.n),
            row.ell,
            row.analytical,
            row.numerical,
            row.ratio,
        ]);
        details.push(json!({
            "n": row.n,
            "l": row.ell,
            "integral_form": row.integral_form,
            "precision": precision_meta(cfg.quadrature.precision_digits, effective_digits(cfg, row.ell, Some(lambda))),
            "failure": row.failure,
        }));
    }
    report.tables.push(Table {
        name: "table1".into(),
        columns: vec!["n", "l", "analytical", "numerical", "ratio"],
        key_columns: 2,
        rows,
        meta: json!({ "delta_alpha": cfg.delta_alpha, "lambda": lambda, "rows": details }),
    });
    Ok(report)
}

struct Row {
    n: u32,
    ell: f64,
    analytical: f64,
    numerical: f64,
    ratio: f64,
    integral_form: Option<f64>,
    failure: Option<String>,
}

fn table1_row(cfg: &RunConfig, n: u32, ell: f64) -> Result<Row, CliError> {
    let undefined = |analytical: f64, failure: Option<String>| Row {
        n,
        ell,
        analytical,
        numerical: f64::NAN,
        ratio: f64::NAN,
        integral_form: None,
        failure,
    };
    if n == 0 {
        // I(0, ℓ, α) vanishes identically, so the ratio is 0/0.
        return Ok(undefined(0.0, None));
    }
    match slope_report(n, ell, cfg.delta_alpha, &cfg.quadrature) {
        Ok(r) => Ok(Row {
            n,
            ell,
            analytical: r.closed_form,
            numerical: r.finite_difference,
            ratio: r.ratio,
            integral_form: Some(r.integral_form),
            failure: None,
        }),
        Err(e @ Error::PrecisionInsufficient { .. }) => {
            let analytical = swkb_core::analysis::slope_closed_form(n, ell)?;
            Ok(undefined(
                analytical,
                Some(format!("precision check failed for (n={n}, l={ell}): {e}")),
            ))
        }
        Err(e) => Err(e.into()),
    }
}

fn sweep_alpha(cfg: &RunConfig) -> Result<Report, CliError> {
    let cases: Vec<(u32, f64)> = cfg
        .n
        .iter()
        .flat_map(|&n| cfg.ell.iter().map(move |&l| (n, l)))
        .collect();
    let mut report = Report::default();
    let mut crossings = Vec::new();
    for (n, ell) in cases {
        let sweep = alpha_sweep(n, ell, &cfg.alpha, &cfg.quadrature)?;
        crossings.push(json!({ "n": n, "l": ell, "crossings": sweep.crossings }));
        report.tables.push(Table::series(
            format!("sweep-alpha_n{n}_l{ell}"),
            records_to_rows(&sweep.series),
            json!({
                "n": n,
                "l": ell,
                "control": sweep.series.control_name(),
                "value": "I(n,l,alpha)",
                "residual": "R = I/(n pi) - 1",
                "crossings": sweep.crossings,
                "precision": precision_meta(cfg.quadrature.precision_digits, effective_digits(cfg, ell, None)),
            }),
        ));
    }
    report.results.insert("crossings".into(), Value::Array(crossings));
    Ok(report)
}

fn sweep_n(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::default();
    for &ell in &cfg.ell {
        for &alpha in &cfg.alpha {
            let series = n_sweep(ell, &cfg.n, alpha, &cfg.quadrature)?;
            report.tables.push(Table::series(
                format!("sweep-n_l{ell}_a{alpha}"),
                records_to_rows(&series),
                json!({
                    "l": ell,
                    "alpha": alpha,
                    "control": series.control_name(),
                    "value": "I(n,l,alpha)",
                    "residual": "R = I/(n pi) - 1",
                    "precision": precision_meta(cfg.quadrature.precision_digits, effective_digits(cfg, ell, None)),
                }),
            ));
        }
    }
    Ok(report)
}

fn convergence(cfg: &RunConfig) -> Result<Report, CliError> {
    let max_lambda = cfg.lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut report = Report::default();
    let mut fits = Vec::new();
    for &(n, ell) in &cfg.pairs {
        let r = convergence_sweep(n, ell, &cfg.lambda, &cfg.quadrature)?;
        if (r.fitted_slope + 1.0).abs() > SLOPE_TOLERANCE {
            report.failures.push(format!(
                "convergence slope {} for (n={n}, l={ell}) is outside -1 ± {SLOPE_TOLERANCE}",
                r.fitted_slope
            ));
        }
        fits.push(json!({ "n": n, "l": ell, "fitted_slope": r.fitted_slope, "fitted_intercept": r.fitted_intercept }));
        report.tables.push(Table::series(
            format!("convergence_n{n}_l{ell}"),
            records_to_rows(&r.series),
            json!({
                "n": n,
                "l": ell,
                "control": r.series.control_name(),
                "value": "log10 Gamma",
                "residual": "value minus fitted line",
                "fitted_slope": r.fitted_slope,
                "fitted_intercept": r.fitted_intercept,
                "precision": precision_meta(cfg.quadrature.precision_digits, effective_digits(cfg, ell, Some(max_lambda))),
            }),
        ));
    }
    report.results.insert("fits".into(), Value::Array(fits));
    Ok(report)
}

fn spectrum(cfg: &RunConfig) -> Result<Report, CliError> {
    let n_max = cfg.n.iter().copied().max().unwrap_or(0) as usize;
    let mut report = Report::default();
    for &ell in &cfg.ell {
        for &alpha in &cfg.alpha {
            let p = ModelParams::new(ell, cfg.omega, alpha)?;
            let grid = NumerovGrid::for_levels(&p, n_max);
            let s = numerov_solve(&p, n_max, &grid, cfg.e_tol)?;
            let rows: Vec<Vec<f64>> = s
                .eigenvalues
                .iter()
                .enumerate()
                .map(|(k, &e)| {
                    let exact = 2.0 * k as f64 * cfg.omega;
                    vec![k as f64, e, e - exact]
                })
                .collect();
            let worst = rows.iter().map(|r| r[2].abs()).fold(0.0, f64::max);
            if worst > SPECTRUM_TOLERANCE {
                report.failures.push(format!(
                    "spectrum for (l={ell}, alpha={alpha}) deviates from 2k omega by {worst:E}"
                ));
            }
            report.tables.push(Table::series(
                format!("spectrum_l{ell}_a{alpha}"),
                rows,
                json!({
                    "l": ell,
                    "alpha": alpha,
                    "omega": cfg.omega,
                    "control": "k",
                    "value": "E_k",
                    "residual": "E_k - 2 k omega",
                    "node_counts": s.node_counts,
                    "grid": s.grid,
                    "x_start": s.x_start,
                    "achieved_tol": s.achieved_tol,
                    "precision": precision_meta(0, 0),
                }),
            ));
        }
    }
    Ok(report)
}

fn si_check(cfg: &RunConfig) -> Result<Report, CliError> {
    let grid = SampleGrid::default();
    let xs = grid.samples();
    let mut report = Report::default();
    let mut checks = Vec::new();
    for &ell in &cfg.ell {
        for &alpha in &cfg.alpha {
            let profile = si_profile(ell, alpha, cfg.omega, &xs)?;
            let mut best = 0;
            for (i, (_, r)) in profile.iter().enumerate() {
                if r.abs() > profile[best].1.abs() {
                    best = i;
                }
            }
            let max_abs = profile[best].1.abs();
            let invariant = max_abs < SI_TOLERANCE;
            if !invariant {
                report.failures.push(format!(
                    "not shape invariant at (l={ell}, alpha={alpha}): max residual {max_abs:E} at x={}",
                    xs[best]
                ));
            }
            checks.push(json!({ "l": ell, "alpha": alpha, "max_abs_residual": max_abs, "shape_invariant": invariant }));
            let rows = xs
                .iter()
                .zip(&profile)
                .map(|(&x, &(lhs, r))| vec![x, lhs, r])
                .collect();
            report.tables.push(Table::series(
                format!("si-check_l{ell}_a{alpha}"),
                rows,
                json!({
                    "l": ell,
                    "alpha": alpha,
                    "omega": cfg.omega,
                    "control": "x",
                    "value": "V+(x,l) + g(l)",
                    "residual": "V+(x,l) + g(l) - V-(x,l+1) - g(l+1)",
                    "grid": grid,
                    "max_abs_residual": max_abs,
                    "argmax_x": xs[best],
                    "shape_invariant": invariant,
                    "precision": precision_meta(0, swkb_core::shape_invariance::RESIDUAL_DIGITS),
                }),
            ));
        }
    }
    report.results.insert("checks".into(), Value::Array(checks));
    Ok(report)
}
