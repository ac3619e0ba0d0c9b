//! Numeric check of additive shape invariance,
//! `V₊(x, ℓ) + g(ℓ) = V₋(x, ℓ + 1) + g(ℓ + 1)` with `g(a) = 2ωa`.

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{potential, ModelParams, Partner};
use crate::real::{Precision, Real};

/// Working precision of [`si_residual`]. Near the origin both sides grow
/// like `ℓ²/x²` and cancel, which costs up to five digits in double.
pub const RESIDUAL_DIGITS: u32 = 40;

/// `g(a) = 2ωa`.
pub fn g<R: Real>(a: &R, omega: &R) -> R {
    a.clone() * omega * 2.0
}

/// Both sides of the identity at one point: `(V₊(x, ℓ) + g(ℓ), V₋(x, ℓ+1) + g(ℓ+1))`.
pub fn si_sides<R: Real>(x: &R, p: &ModelParams<R>) -> Result<(R, R)> {
    let next = p.shifted();
    let lhs = potential(x, p, Partner::Plus)? + g(p.ell(), p.omega());
    let rhs = potential(x, &next, Partner::Minus)? + g(next.ell(), next.omega());
    Ok((lhs, rhs))
}

/// Residual `lhs − rhs` at the precision of `x`.
pub fn si_residual_in<R: Real>(x: &R, p: &ModelParams<R>) -> Result<R> {
    let (lhs, rhs) = si_sides(x, p)?;
    Ok(lhs - rhs)
}

/// `[W²(x,ℓ) + W′(x,ℓ) + g(ℓ)] − [W²(x,ℓ+1) − W′(x,ℓ+1) + g(ℓ+1)]`,
/// evaluated at [`RESIDUAL_DIGITS`] and rounded to double.
pub fn si_residual(x: f64, ell: f64, alpha: f64, omega: f64) -> Result<f64> {
    let precision = Precision::Digits(RESIDUAL_DIGITS);
    let p: ModelParams<Float> = ModelParams::new(ell, omega, alpha)?.at_precision(precision);
    Ok(si_residual_in(&Float::from_f64(x, precision), &p)?.to_f64())
}

/// Log-spaced sample points `x_min … x_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl Default for SampleGrid {
    fn default() -> Self {
        Self {
            x_min: 0.1,
            x_max: 20.0,
            points: 2000,
        }
    }
}

impl SampleGrid {
    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<Self> {
        if !(x_min > 0.0 && x_max >= x_min && x_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample grid needs 0 < x_min <= x_max, got [{x_min}, {x_max}]"
            )));
        }
        Ok(Self { x_min, x_max, points })
    }

    pub fn samples(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.x_min],
            n => {
                let ratio = (self.x_max / self.x_min).ln() / (n - 1) as f64;
                (0..n)
                    .map(|i| {
                        if i == n - 1 {
                            self.x_max
                        } else {
                            self.x_min * (ratio * i as f64).exp()
                        }
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SIResidualReport {
    pub max_abs_residual: f64,
    pub argmax_x: f64,
    pub grid: SampleGrid,
    pub alpha: f64,
    pub ell: f64,
}

/// Largest `|si_residual|` over `grid`. Ties go to the smallest x.
pub fn si_max_residual(ell: f64, alpha: f64, omega: f64, grid: &SampleGrid) -> Result<SIResidualReport> {
    let xs = grid.samples();
    if xs.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let residuals = si_residual_series(ell, alpha, omega, &xs)?;
    let mut best = 0;
    for (i, r) in residuals.iter().enumerate() {
        if r.abs() > residuals[best].abs() {
            best = i;
        }
    }
    Ok(SIResidualReport {
        max_abs_residual: residuals[best].abs(),
        argmax_x: xs[best],
        grid: *grid,
        alpha,
        ell,
    })
}

/// `si_residual` at every point of `xs`, in order.
pub fn si_residual_series(ell: f64, alpha: f64, omega: f64, xs: &[f64]) -> Result<Vec<f64>> {
    ModelParams::new(ell, omega, alpha)?;
    xs.par_iter()
        .map(|&x| si_residual(x, ell, alpha, omega))
        .collect()
}

/// `(V₊(x, ℓ) + g(ℓ), residual)` at every point of `xs`, in order.
pub fn si_profile(ell: f64, alpha: f64, omega: f64, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
    let precision = Precision::Digits(RESIDUAL_DIGITS);
    let p: ModelParams<Float> = ModelParams::new(ell, omega, alpha)?.at_precision(precision);
    xs.par_iter()
        .map(|&x| {
            let (lhs, rhs) = si_sides(&Float::from_f64(x, precision), &p)?;
            let residual = lhs.clone() - rhs;
            Ok((lhs.to_f64(), residual.to_f64()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain double evaluation with the two-term W_h, written out by hand.
    fn naive_residual(x: f64, ell: f64, alpha: f64) -> f64 {
        let w = |l: f64| {
            let wh = 2.0 * x / (x * x + 2.0 * l - 1.0) - 2.0 * x / (x * x + 2.0 * l + 1.0);
            0.5 * x - l / x + alpha * wh
        };
        let h = 1e-5 * x;
        let dw = |l: f64| {
            let f = |y: f64| {
                let wh = 2.0 * y / (y * y + 2.0 * l - 1.0) - 2.0 * y / (y * y + 2.0 * l + 1.0);
                0.5 * y - l / y + alpha * wh
            };
            (f(x + h) - f(x - h)) / (2.0 * h)
        };
        (w(ell).powi(2) + dw(ell) + 2.0 * ell) - (w(ell + 1.0).powi(2) - dw(ell + 1.0) + 2.0 * (ell + 1.0))
    }

    #[test]
    fn exact_members_vanish_pointwise() {
        for &x in &[0.1, 0.5, 1.0, 3.3, 20.0] {
            assert!(si_residual(x, 1.0, 0.0, 1.0).unwrap().abs() < 1e-30);
            assert!(si_residual(x, 1.0, 1.0, 1.0).unwrap().abs() < 1e-30);
            assert!(si_residual(x, 2.5, 1.0, 3.0).unwrap().abs() < 1e-30);
        }
    }

    #[test]
    fn intermediate_alpha_breaks_the_identity() {
        let r = si_residual(1.0, 1.0, 0.5, 1.0).unwrap();
        assert!(r.abs() > 1e-3);
        for &x in &[0.5, 1.0, 2.0, 5.0] {
            let naive = naive_residual(x, 1.0, 0.5);
            let exact = si_residual(x, 1.0, 0.5, 1.0).unwrap();
            assert!((naive - exact).abs() < 1e-7, "x={x}: {naive} vs {exact}");
        }
    }

    #[test]
    fn max_residual_golden_value() {
        let report = si_max_residual(1.0, 0.5, 1.0, &SampleGrid::default()).unwrap();
        // Independent dense scan with the naive double formula.
        let naive_max = SampleGrid::default()
            .samples()
            .into_iter()
            .map(|x| naive_residual(x, 1.0, 0.5).abs())
            .fold(0.0, f64::max);
        assert!((report.max_abs_residual - naive_max).abs() < 1e-6 * naive_max);
        assert!(
            (report.max_abs_residual - 0.0672).abs() < 5e-4,
            "{}",
            report.max_abs_residual
        );
        assert!(report.argmax_x >= 0.1 && report.argmax_x <= 20.0);
    }

    #[test]
    fn max_residual_at_exact_members() {
        for ell in [1.0, 2.0, 3.0, 10.0] {
            for alpha in [0.0, 1.0] {
                let report = si_max_residual(ell, alpha, 1.0, &SampleGrid::default()).unwrap();
                assert!(report.max_abs_residual < 1e-12, "ell={ell} alpha={alpha}");
            }
        }
    }

    #[test]
    fn profile_matches_residual() {
        let xs = [0.3, 1.0, 4.0];
        let profile = si_profile(2.0, 0.3, 1.0, &xs).unwrap();
        for (x, (lhs, residual)) in xs.iter().zip(profile) {
            assert_eq!(residual, si_residual(*x, 2.0, 0.3, 1.0).unwrap());
            let p = ModelParams::unit(2.0, 0.3).unwrap();
            let direct = potential(x, &p, Partner::Plus).unwrap() + 4.0;
            assert!((lhs - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_grid_is_rejected() {
        let grid = SampleGrid::new(0.1, 20.0, 0).unwrap();
        assert_eq!(si_max_residual(1.0, 0.5, 1.0, &grid), Err(Error::EmptyGrid));
        assert!(SampleGrid::new(-1.0, 2.0, 10).is_err());
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let xs = SampleGrid::default().samples();
        assert_eq!(xs.len(), 2000);
        assert_eq!(xs[0], 0.1);
        assert_eq!(xs[1999], 20.0);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }
}
