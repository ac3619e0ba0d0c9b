//! SWKB action integrals, the residual `R = 1 − I/(nπ)`, slopes of `I` at
//! α = 0, and the parameter sweeps built on them.
//!
//! All integrals use ω = 1 unless an explicit ω is given; `I` does not
//! depend on ω. Public entry points take and return `f64` and pick their
//! working precision from the configuration, raised where needed by
//! [`policy_digits`].

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{energy_level, potential_minus_even, w0, w_h, ModelParams};
use crate::quad::{
    integrate_adaptive_oracle, integrate_inv_sqrt_endpoints, integrate_sqrt_endpoints, EndpointBehavior,
    Integral, OracleEstimate, QuadratureConfig,
};
use crate::real::{Precision, Real};
use crate::turning::{
    conventional_turning_points, jwkb_turning_points, swkb_function, swkb_turning_points, JwkbLimits,
    TurningPoints,
};

/// The `(n, ℓ)` pairs of the reference slope table.
pub const REFERENCE_SLOPE_CASES: [(u32, u32); 14] = [
    (1, 1),
    (2, 1),
    (2, 2),
    (3, 1),
    (3, 2),
    (3, 3),
    (4, 1),
    (4, 2),
    (4, 3),
    (4, 4),
    (4, 10),
    (4, 100),
    (4, 1000),
    (1000, 1000),
];

/// Default finite-difference step for the slope table.
pub const DEFAULT_DELTA_ALPHA: f64 = 1e-5;

/// Width in α below which a zero crossing of R counts as located.
pub const CROSSING_TOL: f64 = 1e-6;

/// Run `$kernel::<R>(args)` with `R` chosen by the configuration's precision.
macro_rules! dispatch {
    ($cfg:expr, $kernel:ident($($arg:expr),* $(,)?)) => {
        match $cfg.precision() {
            Precision::Double => $kernel::<f64>($($arg),*),
            Precision::Digits(_) => $kernel::<Float>($($arg),*),
        }
    };
}

/// Working digits required for angular parameter `ell` and, for finite
/// differences, step `Δα = 10^(−λ)`: 100 digits above ℓ = 100, 50 digits
/// above ℓ = 10 or λ = 3, double precision otherwise.
pub fn policy_digits(ell: f64, lambda: Option<f64>) -> u32 {
    if ell > 100.0 {
        100
    } else if ell > 10.0 || lambda.is_some_and(|l| l > 3.0) {
        50
    } else {
        0
    }
}

/// `cfg` escalated to [`policy_digits`]; never lowers the requested precision.
pub fn effective_config(cfg: &QuadratureConfig, ell: f64, lambda: Option<f64>) -> QuadratureConfig {
    cfg.escalated(policy_digits(ell, lambda))
}

/// `λ = −log₁₀ Δα`.
pub fn lambda_of(delta_alpha: f64) -> f64 {
    -delta_alpha.log10()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SWKBResult {
    pub n: u32,
    pub ell: f64,
    pub alpha: f64,
    pub omega: f64,
    pub integral: f64,
    /// `1 − I/(nπ)`, formed at working precision before rounding.
    pub residual: f64,
    /// `None` for n = 0, where the turning points coincide.
    pub turning: Option<TurningPoints>,
    pub quad_error_estimate: f64,
    pub precision: Precision,
}

struct Action<R> {
    integral: Integral<R>,
    turning: TurningPoints<R>,
    residual: R,
}

fn action<R: Real>(n: u32, params: &ModelParams, cfg: &QuadratureConfig) -> Result<Action<R>> {
    let precision = cfg.precision();
    let p: ModelParams<R> = params.at_precision(precision);
    let turning = swkb_turning_points(n, &p, cfg.root_tolerance())?;
    let root_energy = energy_level(n, &p).sqrt();
    let integral = integrate_sqrt_endpoints(
        |x: &R| swkb_function(x, &root_energy, &p),
        &turning.x_left,
        &turning.x_right,
        cfg,
    )?;
    let n_pi = R::pi(precision) * f64::from(n);
    let residual = (n_pi.clone() - &integral.value) / n_pi;
    Ok(Action {
        integral,
        turning,
        residual,
    })
}

fn swkb_kernel<R: Real>(n: u32, params: &ModelParams, cfg: &QuadratureConfig) -> Result<SWKBResult> {
    let a = action::<R>(n, params, cfg)?;
    Ok(SWKBResult {
        n,
        ell: *params.ell(),
        alpha: *params.alpha(),
        omega: *params.omega(),
        integral: a.integral.value.to_f64(),
        residual: a.residual.to_f64(),
        turning: Some(a.turning.to_f64()),
        quad_error_estimate: a.integral.error_estimate,
        precision: cfg.precision(),
    })
}

/// `I(n, ℓ, α) = ∫√(E_n − W²) dx` at ω = 1. Defined as 0 for n = 0.
pub fn swkb_integral(n: u32, ell: f64, alpha: f64, cfg: &QuadratureConfig) -> Result<SWKBResult> {
    swkb_integral_with_omega(n, ell, alpha, 1.0, cfg)
}

/// [`swkb_integral`] at an arbitrary ω.
pub fn swkb_integral_with_omega(
    n: u32,
    ell: f64,
    alpha: f64,
    omega: f64,
    cfg: &QuadratureConfig,
) -> Result<SWKBResult> {
    cfg.validate()?;
    let params = ModelParams::new(ell, omega, alpha)?;
    let cfg = effective_config(cfg, ell, None);
    if n == 0 {
        return Ok(SWKBResult {
            n,
            ell,
            alpha,
            omega,
            integral: 0.0,
            residual: 0.0,
            turning: None,
            quad_error_estimate: 0.0,
            precision: cfg.precision(),
        });
    }
    dispatch!(cfg, swkb_kernel(n, &params, &cfg))
}

/// `R = 1 − I/(nπ)`; requires n ≥ 1.
pub fn swkb_residual(n: u32, ell: f64, alpha: f64, cfg: &QuadratureConfig) -> Result<f64> {
    require_excited(n)?;
    Ok(swkb_integral(n, ell, alpha, cfg)?.residual)
}

/// Independent double-precision value of `I(n, ℓ, α)` from the adaptive
/// oracle over the same turning points.
pub fn swkb_integral_oracle(n: u32, ell: f64, alpha: f64, cfg: &QuadratureConfig) -> Result<OracleEstimate> {
    require_excited(n)?;
    let p = ModelParams::unit(ell, alpha)?;
    let tp = swkb_turning_points(n, &p, 1e-15)?;
    let root_energy = energy_level(n, &p).sqrt();
    let double = double_config(cfg);
    integrate_adaptive_oracle(
        |x| swkb_function(&x, &root_energy, &p).map_or(f64::NAN, |f| f.max(0.0).sqrt()),
        tp.x_left,
        tp.x_right,
        &double,
        EndpointBehavior::SqrtZero,
    )
}

fn double_config(cfg: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig {
        abs_tol: cfg.abs_tol.max(QuadratureConfig::double().abs_tol),
        rel_tol: cfg.rel_tol,
        precision_digits: 0,
        ..*cfg
    }
}

fn require_excited(n: u32) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter("n must be >= 1".into()))
    } else {
        Ok(())
    }
}

fn require_ell(ell: f64) -> Result<()> {
    ModelParams::unit(ell, 0.0).map(|_| ())
}

/// `∂I/∂α` at α = 0 in closed form, at the precision of `ell`.
///
/// The textbook expression `π[(4ℓ−1)/√P − (4ℓ+1)/√Q]` with
/// `P = (4ℓ−1)² + 8n(2ℓ−1)` and `Q = (4ℓ+1)² + 8n(2ℓ+1)` is a difference of
/// nearly equal terms at large ℓ. Since `(4ℓ−1)²Q − (4ℓ+1)²P = 16n`, it
/// equals `16nπ / (√P·√Q·((4ℓ−1)√Q + (4ℓ+1)√P))`, which is evaluated here.
pub fn slope_closed_form_in<R: Real>(n: u32, ell: &R) -> R {
    let n = ell.constant(f64::from(n));
    let a = ell.clone() * 4.0 - 1.0;
    let b = ell.clone() * 4.0 + 1.0;
    let p = a.square() + n.clone() * 8.0 * (ell.clone() * 2.0 - 1.0);
    let q = b.square() + n.clone() * 8.0 * (ell.clone() * 2.0 + 1.0);
    let (root_p, root_q) = (p.sqrt(), q.sqrt());
    let denominator = root_p.clone() * &root_q * (a * &root_q + b * root_p);
    R::pi(ell.precision()) * n * 16.0 / denominator
}

/// `I′(0)` in closed form; 0 for n = 0.
pub fn slope_closed_form(n: u32, ell: f64) -> Result<f64> {
    require_ell(ell)?;
    Ok(slope_closed_form_in(n, &ell))
}

fn slope_integral_kernel<R: Real>(n: u32, ell: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let precision = cfg.precision();
    let p: ModelParams<R> = ModelParams::unit(ell, 0.0)?.at_precision(precision);
    let omega = R::from_f64(1.0, precision);
    let tp = conventional_turning_points(n, p.ell(), &omega)?;
    let (x_left, x_right) = (&tp.x_left, &tp.x_right);
    integrate_inv_sqrt_endpoints(
        |x: &R| {
            // E_n − W₀² = (x² − x_L²)(x_R² − x²)/(4x²), kept in factored form
            // so the singular factor vanishes exactly at the given limits.
            let gap =
                (x.clone() - x_left) * (x.clone() + x_left) * (x_right.clone() - x) * (x_right.clone() + x);
            if !(gap > 0.0) {
                return Ok(x.zero_like());
            }
            let root = gap.sqrt() / x / 2.0;
            Ok(-(w0(x, &p)? * w_h(x, &p)?) / root)
        },
        x_left,
        x_right,
        cfg,
    )
    .map(|integral| integral.value.to_f64())
}

/// `I′(0) = −∫ W₀W_h / √(E_n − W₀²) dx` over the conventional turning points.
pub fn slope_integral_form(n: u32, ell: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    require_ell(ell)?;
    if n == 0 {
        return Ok(0.0);
    }
    let cfg = effective_config(cfg, ell, None);
    dispatch!(cfg, slope_integral_kernel(n, ell, &cfg))
}

struct FiniteDifference {
    slope: f64,
    gamma: f64,
    closed_form: f64,
}

fn finite_difference_kernel<R: Real>(
    n: u32,
    ell: f64,
    delta_alpha: f64,
    cfg: &QuadratureConfig,
) -> Result<FiniteDifference> {
    let precision = cfg.precision();
    let a = action::<R>(n, &ModelParams::unit(ell, delta_alpha)?, cfg)?;
    let n_pi = R::pi(precision) * f64::from(n);
    let step = R::from_f64(delta_alpha, precision);
    let slope = (a.integral.value - n_pi) / step;
    let exact = slope_closed_form_in(n, &R::from_f64(ell, precision));
    let increment = exact.to_f64() * delta_alpha;
    if a.integral.error_estimate > 0.01 * increment.abs() {
        return Err(Error::PrecisionInsufficient {
            error_estimate: a.integral.error_estimate,
            increment,
        });
    }
    let gamma = (exact.clone() - &slope) / &exact;
    Ok(FiniteDifference {
        slope: slope.to_f64(),
        gamma: gamma.to_f64(),
        closed_form: exact.to_f64(),
    })
}

fn finite_difference(n: u32, ell: f64, delta_alpha: f64, cfg: &QuadratureConfig) -> Result<FiniteDifference> {
    cfg.validate()?;
    require_excited(n)?;
    require_ell(ell)?;
    if !(delta_alpha > 0.0 && delta_alpha <= 0.1) {
        return Err(Error::InvalidParameter(format!(
            "delta_alpha must lie in (0, 0.1], got {delta_alpha}"
        )));
    }
    let cfg = effective_config(cfg, ell, Some(lambda_of(delta_alpha)));
    dispatch!(cfg, finite_difference_kernel(n, ell, delta_alpha, &cfg))
}

/// `I′_num(0) = (I(Δα) − nπ)/Δα`, with the exact `I(0) = nπ` as base value.
pub fn slope_finite_difference(n: u32, ell: f64, delta_alpha: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(finite_difference(n, ell, delta_alpha, cfg)?.slope)
}

/// `Γ = (I′(0) − I′_num(0))/I′(0)`.
pub fn gamma(n: u32, ell: f64, delta_alpha: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(finite_difference(n, ell, delta_alpha, cfg)?.gamma)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub n: u32,
    pub ell: f64,
    pub closed_form: f64,
    pub integral_form: f64,
    pub finite_difference: f64,
    pub delta_alpha: f64,
    pub gamma: f64,
    /// `I′_num(0)/I′(0) = 1 − Γ`.
    pub ratio: f64,
    /// Digits used for the finite difference; 0 is double.
    pub precision_digits: u32,
}

/// All three slope estimators for one `(n, ℓ)`.
pub fn slope_report(n: u32, ell: f64, delta_alpha: f64, cfg: &QuadratureConfig) -> Result<SlopeReport> {
    let fd = finite_difference(n, ell, delta_alpha, cfg)?;
    let integral_form = slope_integral_form(n, ell, cfg)?;
    Ok(SlopeReport {
        n,
        ell,
        closed_form: fd.closed_form,
        integral_form,
        finite_difference: fd.slope,
        delta_alpha,
        gamma: fd.gamma,
        ratio: 1.0 - fd.gamma,
        precision_digits: effective_config(cfg, ell, Some(lambda_of(delta_alpha))).precision_digits,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub control: f64,
    pub value: f64,
    pub residual: f64,
}

/// Ordered `(control, value, residual)` records with strictly increasing controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSeries {
    control_name: String,
    records: Vec<SweepRecord>,
}

impl SweepSeries {
    pub fn new(control_name: impl Into<String>, records: Vec<SweepRecord>) -> Result<Self> {
        let controls: Vec<f64> = records.iter().map(|r| r.control).collect();
        ensure_increasing("controls", &controls)?;
        Ok(Self {
            control_name: control_name.into(),
            records,
        })
    }

    pub fn control_name(&self) -> &str {
        &self.control_name
    }

    pub fn records(&self) -> &[SweepRecord] {
        &self.records
    }
}

fn ensure_increasing(what: &str, values: &[f64]) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{what} must be finite")));
    }
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(format!(
            "{what} must be strictly increasing"
        )));
    }
    Ok(())
}

fn ensure_nonempty<T>(what: &str, values: &[T]) -> Result<()> {
    if values.is_empty() {
        Err(Error::InvalidParameter(format!("{what} must not be empty")))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub n: u32,
    pub ell: f64,
    /// `(λ, log₁₀Γ, log₁₀Γ − fitted line)`.
    pub series: SweepSeries,
    pub fitted_slope: f64,
    pub fitted_intercept: f64,
}

/// `log₁₀Γ` against λ with its least-squares line.
pub fn convergence_sweep(
    n: u32,
    ell: f64,
    lambdas: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ConvergenceReport> {
    ensure_nonempty("lambdas", lambdas)?;
    ensure_increasing("lambdas", lambdas)?;
    if lambdas.len() < 2 {
        return Err(Error::InvalidParameter(
            "a line fit needs at least two lambdas".into(),
        ));
    }
    if let Some(bad) = lambdas.iter().find(|l| !(1.0..=6.0).contains(*l)) {
        return Err(Error::InvalidParameter(format!(
            "lambda must lie in [1, 6], got {bad}"
        )));
    }
    let logs: Vec<f64> = lambdas
        .par_iter()
        .map(|&lambda| {
            let g = gamma(n, ell, 10f64.powf(-lambda), cfg)?;
            if g > 0.0 {
                Ok(g.log10())
            } else {
                Err(Error::NonPositiveGamma { lambda, gamma: g })
            }
        })
        .collect::<Result<_>>()?;
    let (slope, intercept) = least_squares(lambdas, &logs);
    let records = lambdas
        .iter()
        .zip(&logs)
        .map(|(&lambda, &y)| SweepRecord {
            control: lambda,
            value: y,
            residual: y - (intercept + slope * lambda),
        })
        .collect();
    Ok(ConvergenceReport {
        n,
        ell,
        series: SweepSeries::new("lambda", records)?,
        fitted_slope: slope,
        fitted_intercept: intercept,
    })
}

/// Slope and intercept of the least-squares line through `(x, y)`.
fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let count = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / count;
    let mean_y = y.iter().sum::<f64>() / count;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        sxy += (xi - mean_x) * (yi - mean_y);
        sxx += (xi - mean_x) * (xi - mean_x);
    }
    let slope = sxy / sxx;
    (slope, mean_y - slope * mean_x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSweep {
    pub n: u32,
    pub ell: f64,
    /// `(α, I, R)`.
    pub series: SweepSeries,
    /// Zero crossings of R at α > 0, each located to [`CROSSING_TOL`].
    pub crossings: Vec<f64>,
}

/// `R(α)` over `alphas`, with every sign change of R bisected.
pub fn alpha_sweep(n: u32, ell: f64, alphas: &[f64], cfg: &QuadratureConfig) -> Result<AlphaSweep> {
    require_excited(n)?;
    ensure_nonempty("alphas", alphas)?;
    ensure_increasing("alphas", alphas)?;
    let results: Vec<SWKBResult> = alphas
        .par_iter()
        .map(|&alpha| swkb_integral(n, ell, alpha, cfg))
        .collect::<Result<_>>()?;
    let records: Vec<SweepRecord> = results
        .iter()
        .map(|r| SweepRecord {
            control: r.alpha,
            value: r.integral,
            residual: r.residual,
        })
        .collect();

    // R(0) vanishes identically, so only α > 0 can carry a sign change.
    let positive: Vec<&SweepRecord> = records.iter().filter(|r| r.control > 0.0).collect();
    let mut crossings = Vec::new();
    for (i, r) in positive.iter().enumerate() {
        if r.residual == 0.0 {
            crossings.push(r.control);
        } else if let Some(next) = positive.get(i + 1) {
            if next.residual != 0.0 && (r.residual > 0.0) != (next.residual > 0.0) {
                crossings.push(refine_crossing(
                    n,
                    ell,
                    (r.control, r.residual),
                    next.control,
                    cfg,
                )?);
            }
        }
    }
    Ok(AlphaSweep {
        n,
        ell,
        series: SweepSeries::new("alpha", records)?,
        crossings,
    })
}

fn refine_crossing(n: u32, ell: f64, low: (f64, f64), high: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let (mut a, low_residual) = low;
    let mut b = high;
    while b - a > CROSSING_TOL {
        let mid = 0.5 * (a + b);
        let r = swkb_residual(n, ell, mid, cfg)?;
        if r == 0.0 {
            return Ok(mid);
        }
        if (r > 0.0) == (low_residual > 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// `R(n)` at fixed ℓ and α over `n_values`.
pub fn n_sweep(ell: f64, n_values: &[u32], alpha: f64, cfg: &QuadratureConfig) -> Result<SweepSeries> {
    ensure_nonempty("n values", n_values)?;
    if n_values.contains(&0) {
        return Err(Error::InvalidParameter("n values must be >= 1".into()));
    }
    let records: Vec<SweepRecord> = n_values
        .par_iter()
        .map(|&n| {
            let r = swkb_integral(n, ell, alpha, cfg)?;
            Ok(SweepRecord {
                control: f64::from(n),
                value: r.integral,
                residual: r.residual,
            })
        })
        .collect::<Result<_>>()?;
    SweepSeries::new("n", records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JwkbResult {
    pub n: u32,
    pub ell: f64,
    pub alpha: f64,
    pub integral: f64,
    /// `(n + ½)π`.
    pub target: f64,
    pub limits: JwkbLimits,
    pub quad_error_estimate: f64,
}

/// `∫√(E_n − V₋) dx` over the classically allowed region, in double precision.
///
/// When the region reaches the origin (ℓ = 1) the integral runs from 0; it
/// is taken as half the integral over `(−x_R, x_R)` of the even extension,
/// which keeps both limits simple square-root zeros.
pub fn jwkb_integral(n: u32, ell: f64, alpha: f64, cfg: &QuadratureConfig) -> Result<JwkbResult> {
    cfg.validate()?;
    let p = ModelParams::unit(ell, alpha)?;
    let cfg = double_config(cfg);
    let limits = jwkb_turning_points(n, &p, cfg.root_tolerance())?;
    let energy = energy_level(n, &p);
    let f = |x: &f64| -> Result<f64> { Ok(energy - potential_minus_even(x, &p)?) };
    let tp = &limits.turning;
    let integral = if limits.left_at_origin {
        let mut whole = integrate_sqrt_endpoints(f, &-tp.x_right, &tp.x_right, &cfg)?;
        whole.value /= 2.0;
        whole.error_estimate /= 2.0;
        whole
    } else {
        integrate_sqrt_endpoints(f, &tp.x_left, &tp.x_right, &cfg)?
    };
    Ok(JwkbResult {
        n,
        ell,
        alpha,
        integral: integral.value,
        target: (f64::from(n) + 0.5) * std::f64::consts::PI,
        limits,
        quad_error_estimate: integral.error_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::double()
    }

    /// Closed form exactly as written with the turning-point values
    /// `u_{L,R} = 2(2n+ℓ) ∓ 4√(n(n+ℓ))`, evaluated at 80 digits.
    fn naive_slope(n: u32, ell: f64) -> f64 {
        let prec = Precision::Digits(80);
        let l = Float::from_f64(ell, prec);
        let nn = Float::from_f64(f64::from(n), prec);
        let center: Float = (nn.clone() * 2.0 + &l) * 2.0;
        let spread: Float = (nn.clone() * (nn + &l)).sqrt() * 4.0;
        let (ul, ur) = (center.clone() - &spread, center + spread);
        let term = |shift: f64| -> Float {
            let c: Float = l.clone() * 2.0 + shift;
            let product: Float = (ul.clone() + &c) * (ur.clone() + &c);
            product.sqrt()
        };
        let first: Float = (l.clone() * 4.0 - 1.0) / term(-1.0);
        let second: Float = (l.clone() * 4.0 + 1.0) / term(1.0);
        let slope: Float = <Float as Real>::pi(prec) * (first - second);
        slope.to_f64()
    }

    #[test]
    fn closed_form_matches_naive_formula() {
        for (n, ell) in REFERENCE_SLOPE_CASES {
            let ell = f64::from(ell);
            let stable = slope_closed_form(n, ell).unwrap();
            let naive = naive_slope(n, ell);
            assert!((stable / naive - 1.0).abs() < 1e-14, "n={n} ell={ell}");
        }
        for n in 1..=10 {
            for ell in [1.0, 1.5, 7.0, 33.0, 5000.0] {
                let stable = slope_closed_form(n, ell).unwrap();
                assert!((stable / naive_slope(n, ell) - 1.0).abs() < 1e-14);
                assert!(stable > 0.0);
            }
        }
    }

    #[test]
    fn closed_form_special_values() {
        let exact = (3.0 / 17f64.sqrt() - 5.0 / 7.0) * PI;
        assert!((slope_closed_form(1, 1.0).unwrap() - exact).abs() < 1e-16);
        assert!((slope_closed_form(1, 1.0).unwrap() - 0.0418497).abs() < 5e-8);
        assert!((slope_closed_form(4, 100.0).unwrap() / 3.70267e-9 - 1.0).abs() < 2e-6);
        assert_eq!(slope_closed_form(0, 3.0).unwrap(), 0.0);
        assert!(slope_closed_form(1, 0.5).is_err());
    }

    #[test]
    fn closed_form_extended_precision() {
        let prec = Precision::Digits(60);
        let ell = Float::from_f64(1.0, prec);
        let v = slope_closed_form_in(1, &ell);
        let s17: Float = Float::from_f64(17.0, prec).sqrt();
        let exact: Float =
            (Float::from_f64(3.0, prec) / s17 - Float::from_f64(5.0, prec) / 7.0) * <Float as Real>::pi(prec);
        assert!((v - exact).abs().to_f64() < 1e-58);
    }

    #[test]
    fn conventional_member_is_exact() {
        for n in [1, 2, 5] {
            for ell in [1.0, 3.0] {
                let r = swkb_integral(n, ell, 0.0, &cfg()).unwrap();
                assert!(
                    (r.integral / (f64::from(n) * PI) - 1.0).abs() < 1e-12,
                    "n={n} ell={ell}"
                );
                assert!(r.residual.abs() < 1e-12);
                assert!(r.quad_error_estimate >= 0.0);
            }
        }
    }

    #[test]
    fn ground_state_is_defined_as_zero() {
        let r = swkb_integral(0, 2.0, 1.0, &cfg()).unwrap();
        assert_eq!((r.integral, r.residual, r.turning), (0.0, 0.0, None));
        assert!(swkb_residual(0, 2.0, 1.0, &cfg()).is_err());
    }

    #[test]
    fn extended_member_golden_values() {
        // 50-digit reference values from an independent implementation.
        let r = swkb_residual(1, 1.0, 1.0, &cfg()).unwrap();
        assert!((r - 0.021_205_408_72).abs() < 1e-10, "{r}");
        let r = swkb_residual(1, 2.0, 1.0, &cfg()).unwrap();
        assert!((r - 0.002_326_396_783).abs() < 1e-11, "{r}");
        let r = swkb_residual(1, 3.0, 1.0, &cfg()).unwrap();
        assert!((r - 0.000_593_216_417_5).abs() < 1e-12, "{r}");
    }

    #[test]
    fn oracle_agrees_with_substitution() {
        for (n, ell, alpha) in [(1, 1.0, 0.0), (1, 1.0, 1.0), (3, 2.0, 0.4)] {
            let a = swkb_integral(n, ell, alpha, &cfg()).unwrap().integral;
            let b = swkb_integral_oracle(n, ell, alpha, &cfg()).unwrap().value;
            assert!((a - b).abs() < 1e-9, "n={n} ell={ell} alpha={alpha}: {a} vs {b}");
        }
    }

    #[test]
    fn omega_drops_out() {
        let one = swkb_integral_with_omega(2, 1.5, 0.6, 1.0, &cfg())
            .unwrap()
            .integral;
        let four = swkb_integral_with_omega(2, 1.5, 0.6, 4.0, &cfg())
            .unwrap()
            .integral;
        assert!((one - four).abs() < 1e-11);
    }

    #[test]
    fn integral_form_matches_closed_form() {
        for (n, ell) in [(1, 1.0), (2, 2.0), (7, 3.0), (10, 10.0)] {
            let a = slope_integral_form(n, ell, &cfg()).unwrap();
            let b = slope_closed_form(n, ell).unwrap();
            assert!((a / b - 1.0).abs() < 1e-9, "n={n} ell={ell}: {a} vs {b}");
        }
    }

    #[test]
    fn finite_difference_reference_row() {
        let fd = slope_finite_difference(1, 1.0, 1e-5, &cfg()).unwrap();
        assert!((fd - 0.041_848_67).abs() < 2e-9, "{fd}");
        let g = gamma(1, 1.0, 1e-5, &cfg()).unwrap();
        assert!((g - 2.369e-5).abs() < 1e-8, "{g}");
        assert!(slope_finite_difference(1, 1.0, 0.0, &cfg()).is_err());
        assert!(slope_finite_difference(1, 1.0, 0.5, &cfg()).is_err());
    }

    #[test]
    fn precision_policy() {
        assert_eq!(policy_digits(1.0, None), 0);
        assert_eq!(policy_digits(10.0, Some(3.0)), 0);
        assert_eq!(policy_digits(10.0, Some(4.0)), 50);
        assert_eq!(policy_digits(20.0, None), 50);
        assert_eq!(policy_digits(1000.0, Some(2.0)), 100);
        let cfg = QuadratureConfig::extended(120);
        assert_eq!(effective_config(&cfg, 1000.0, None).precision_digits, 120);
    }

    #[test]
    fn least_squares_recovers_a_line() {
        let x = [2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 0.5 - 1.0 * v).collect();
        let (slope, intercept) = least_squares(&x, &y);
        assert!((slope + 1.0).abs() < 1e-15 && (intercept - 0.5).abs() < 1e-14);
    }

    #[test]
    fn sweep_series_rejects_unordered_controls() {
        let rec = |c| SweepRecord {
            control: c,
            value: 0.0,
            residual: 0.0,
        };
        assert!(SweepSeries::new("x", vec![rec(0.0), rec(1.0)]).is_ok());
        assert!(SweepSeries::new("x", vec![rec(1.0), rec(1.0)]).is_err());
        assert!(alpha_sweep(1, 1.0, &[0.5, 0.2], &cfg()).is_err());
        assert!(n_sweep(1.0, &[0, 1], 1.0, &cfg()).is_err());
    }

    #[test]
    fn jwkb_quarter_ellipse() {
        // ℓ = 1, α = 0: V₋ = x²/4 − 3/2, so the action is (n + 3/4)π.
        for n in 0..4 {
            let r = jwkb_integral(n, 1.0, 0.0, &cfg()).unwrap();
            assert!(r.limits.left_at_origin);
            assert!((r.integral - (f64::from(n) + 0.75) * PI).abs() < 1e-11, "n={n}");
            assert!((r.integral - r.target).abs() > 0.1);
        }
        let swkb = swkb_integral(1, 1.0, 0.0, &cfg()).unwrap().integral;
        let jwkb = jwkb_integral(1, 1.0, 0.0, &cfg()).unwrap().integral;
        assert!((swkb - jwkb).abs() > 0.1);
    }

    #[test]
    fn jwkb_with_centrifugal_barrier() {
        // ℓ = 2, α = 0: V₋ = x²/4 + 2/x² − 5/2. The radial oscillator action is
        // π(E + 5/2 − √2)/2 = π(n + 5/4 − √2/2).
        let r = jwkb_integral(1, 2.0, 0.0, &cfg()).unwrap();
        assert!(!r.limits.left_at_origin);
        let exact = PI * (1.0 + 1.25 - 0.5 * 2f64.sqrt());
        assert!((r.integral - exact).abs() < 1e-10, "{} vs {exact}", r.integral);
    }
}
