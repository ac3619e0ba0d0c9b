//! Quadrature for integrands with square-root behavior at both endpoints.
//!
//! The substitution `x(θ) = x_L + (x_R − x_L)·sin²θ`, `θ ∈ [0, π/2]`, turns
//! `√((x − x_L)(x_R − x))` into `(x_R − x_L)·sinθ·cosθ` and
//! `dx = (x_R − x_L)·2·sinθ·cosθ·dθ`. For `√f` with simple zeros at both
//! limits, and for integrands diverging like `1/√` there, the transformed
//! integrand is an even, π-periodic function of θ that is analytic on a strip
//! around the real axis. The midpoint rule on such functions converges
//! geometrically, and tripling the node count reuses every previous node,
//! which gives a nested rule with a free error estimate.
//!
//! [`integrate_adaptive_oracle`] is an independent double-precision
//! cross-check that never uses the substitution.

mod oracle;

pub use oracle::{integrate_adaptive_oracle, EndpointBehavior, OracleEstimate};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{CompensatedSum, Precision, Real};

/// Tolerances, refinement limits and working precision for every integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Number of node triplings after the base rule.
    pub max_refinements: u32,
    /// Node count of the coarsest rule.
    pub base_rule_order: u32,
    /// Working decimal digits; `0` selects native double precision.
    pub precision_digits: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self::double()
    }
}

impl QuadratureConfig {
    pub fn double() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 0.0,
            max_refinements: 9,
            base_rule_order: 16,
            precision_digits: 0,
        }
    }

    /// Extended precision with `abs_tol = 10^(6 − digits)`.
    pub fn extended(digits: u32) -> Self {
        Self {
            abs_tol: extended_tolerance(digits),
            rel_tol: 0.0,
            max_refinements: 9,
            base_rule_order: 16,
            precision_digits: digits,
        }
    }

    /// Raise the working precision to at least `digits`, tightening the
    /// tolerances to match. Never lowers precision.
    pub fn escalated(&self, digits: u32) -> Self {
        if digits <= self.precision_digits {
            return *self;
        }
        let tol = extended_tolerance(digits);
        Self {
            abs_tol: self.abs_tol.min(tol),
            rel_tol: if self.rel_tol > 0.0 {
                self.rel_tol.min(tol)
            } else {
                0.0
            },
            precision_digits: digits,
            ..*self
        }
    }

    pub fn precision(&self) -> Precision {
        Precision::from_digits(self.precision_digits)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !(positive(self.abs_tol) || positive(self.rel_tol)) || self.abs_tol < 0.0 || self.rel_tol < 0.0 {
            return Err(Error::InvalidConfig(
                "abs_tol or rel_tol must be positive and neither negative".into(),
            ));
        }
        if self.base_rule_order < 8 {
            return Err(Error::InvalidConfig(format!(
                "base_rule_order must be >= 8, got {}",
                self.base_rule_order
            )));
        }
        let d = self.precision_digits;
        if d != 0 && !(20..=200).contains(&d) {
            return Err(Error::InvalidConfig(format!(
                "precision_digits must be 0 or within [20, 200], got {d}"
            )));
        }
        Ok(())
    }

    /// Default relative root tolerance matching this precision.
    pub fn root_tolerance(&self) -> f64 {
        match self.precision() {
            Precision::Double => 1e-14,
            Precision::Digits(d) => 10f64.powi(4 - d as i32),
        }
    }

    fn target<R: Real>(&self, value: &R) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs().to_f64())
    }
}

fn extended_tolerance(digits: u32) -> f64 {
    10f64.powi(6 - digits as i32)
}

/// A converged integral and its error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Integral<R = f64> {
    pub value: R,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub refinements: u32,
}

impl<R: Real> Integral<R> {
    pub fn to_f64(&self) -> Integral<f64> {
        Integral {
            value: self.value.to_f64(),
            error_estimate: self.error_estimate,
            evaluations: self.evaluations,
            refinements: self.refinements,
        }
    }
}

/// `∫ √f(x) dx` over `[x_left, x_right]`, where `f` vanishes linearly at both
/// limits and is non-negative in between.
///
/// Values of `f` below `−√u·max(1, |f(mid)|)` (u the unit roundoff) are
/// reported as [`Error::NegativeIntegrand`]; smaller negative values are
/// rounding noise next to a turning point and are clamped to zero.
pub fn integrate_sqrt_endpoints<R, F>(
    f: F,
    x_left: &R,
    x_right: &R,
    cfg: &QuadratureConfig,
) -> Result<Integral<R>>
where
    R: Real,
    F: Fn(&R) -> Result<R>,
{
    check_interval(x_left, x_right)?;
    let width = x_right.clone() - x_left;
    let mid = x_left.clone() + width.clone() / 2.0;
    let scale = f(&mid)?.abs().to_f64().max(1.0);
    let negative_floor = -x_left.unit_roundoff().sqrt() * scale;
    nested_midpoint(
        |theta| {
            let (sin, cos) = theta.sin_cos();
            let x = x_left.clone() + width.clone() * sin.square();
            let fx = f(&x)?;
            if fx < 0.0 {
                if fx < negative_floor {
                    return Err(Error::NegativeIntegrand {
                        x: x.to_f64(),
                        value: fx.to_f64(),
                    });
                }
                return Ok(fx.zero_like());
            }
            Ok(fx.sqrt() * &width * sin * cos * 2.0)
        },
        x_left,
        cfg,
    )
}

/// `∫ g(x) dx` over `[x_left, x_right]` for `g` diverging like
/// `1/√((x − x_left)(x_right − x))` at the limits. `g` is the full integrand;
/// it is only ever evaluated strictly inside the interval.
pub fn integrate_inv_sqrt_endpoints<R, F>(
    g: F,
    x_left: &R,
    x_right: &R,
    cfg: &QuadratureConfig,
) -> Result<Integral<R>>
where
    R: Real,
    F: Fn(&R) -> Result<R>,
{
    check_interval(x_left, x_right)?;
    let width = x_right.clone() - x_left;
    nested_midpoint(
        |theta| {
            let (sin, cos) = theta.sin_cos();
            let x = x_left.clone() + width.clone() * sin.square();
            Ok(g(&x)? * &width * sin * cos * 2.0)
        },
        x_left,
        cfg,
    )
}

fn check_interval<R: Real>(x_left: &R, x_right: &R) -> Result<()> {
    if x_left.is_finite() && x_right.is_finite() && x_left < x_right {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "integration interval must satisfy x_left < x_right, got [{}, {}]",
            x_left.to_f64(),
            x_right.to_f64()
        )))
    }
}

/// Nested midpoint rule for `∫₀^{π/2} h(θ) dθ`, tripling the node count per
/// refinement. `like` only supplies the working precision.
fn nested_midpoint<R, H>(h: H, like: &R, cfg: &QuadratureConfig) -> Result<Integral<R>>
where
    R: Real,
    H: Fn(&R) -> Result<R>,
{
    cfg.validate()?;
    let quarter_period = R::pi(like.precision()) / 2.0;
    let zero = like.zero_like();

    let mut nodes = u64::from(cfg.base_rule_order);
    let mut sum = CompensatedSum::new(zero.clone());
    let mut magnitude = CompensatedSum::new(zero.clone());
    for j in 0..nodes {
        let theta = quarter_period.clone() * (j as f64 + 0.5) / nodes as f64;
        let term = h(&theta)?;
        magnitude.add(term.abs());
        sum.add(term);
    }
    let mut evaluations = nodes as usize;
    let mut estimate = sum.value() * &quarter_period / nodes as f64;

    for refinement in 1..=cfg.max_refinements {
        let finer = nodes * 3;
        // Old nodes sit at indices 3j + 1 of the finer rule.
        for j in (0..finer).filter(|j| j % 3 != 1) {
            let theta = quarter_period.clone() * (j as f64 + 0.5) / finer as f64;
            let term = h(&theta)?;
            magnitude.add(term.abs());
            sum.add(term);
        }
        evaluations += (finer - nodes) as usize;
        nodes = finer;
        let refined = sum.value() * &quarter_period / nodes as f64;
        let change = (refined.clone() - &estimate).abs().to_f64();
        estimate = refined;
        if change <= cfg.target(&estimate) {
            let rounding =
                4.0 * like.unit_roundoff() * (magnitude.value() * &quarter_period / nodes as f64).to_f64();
            return Ok(Integral {
                value: estimate,
                error_estimate: change.max(rounding),
                evaluations,
                refinements: refinement,
            });
        }
        if !change.is_finite() {
            break;
        }
        if refinement == cfg.max_refinements {
            return Err(Error::NoConvergence {
                refinements: refinement,
                last_change: change,
            });
        }
    }
    Err(Error::NoConvergence {
        refinements: cfg.max_refinements,
        last_change: f64::NAN,
    })
}
