//! Classical turning points of the SWKB (`E_n − W² = 0`) and JWKB
//! (`E_n − V₋ = 0`) integrands.
//!
//! Roots are bracketed by a log-spaced sign scan and polished with a
//! Newton step safeguarded by bisection, working directly on the defining
//! function rather than on the sextic it becomes after clearing denominators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{energy_level, potential_minus_even, w, w_prime, ModelParams};
use crate::real::Real;

/// Points in the bracketing scan.
pub const SCAN_POINTS: usize = 4096;
const MAX_POLISH_ITERATIONS: usize = 400;

/// The pair `(x_left, x_right)` bounding a classically allowed region,
/// with the defining function evaluated at each root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurningPoints<R = f64> {
    pub x_left: R,
    pub x_right: R,
    pub residual_left: R,
    pub residual_right: R,
}

impl<R: Real> TurningPoints<R> {
    pub fn to_f64(&self) -> TurningPoints<f64> {
        TurningPoints {
            x_left: self.x_left.to_f64(),
            x_right: self.x_right.to_f64(),
            residual_left: self.residual_left.to_f64(),
            residual_right: self.residual_right.to_f64(),
        }
    }

    pub fn width(&self) -> R {
        self.x_right.clone() - &self.x_left
    }
}

/// SWKB integrand `E − W(x)²`, factored as `(√E − W)(√E + W)` so it keeps
/// relative accuracy next to either root.
pub fn swkb_function<R: Real>(x: &R, root_energy: &R, p: &ModelParams<R>) -> Result<R> {
    let wx = w(x, p)?;
    Ok((root_energy.clone() - &wx) * (root_energy.clone() + wx))
}

/// Two positive roots of `E_n − W²(x)` for `n ≥ 1`.
pub fn swkb_turning_points<R: Real>(n: u32, p: &ModelParams<R>, tol: f64) -> Result<TurningPoints<R>> {
    let energy = energy_level(n, p);
    if !(energy > 0.0) {
        return Err(Error::NoTurningPoints);
    }
    let root_energy = energy.sqrt();
    let anchor = p.w0_zero();
    let x_min = anchor.clone() * 1e-6;
    let x_max = root_energy.clone() * 4.0 / p.omega() + anchor.clone() * 4.0;
    let value = |x: &R| swkb_function(x, &root_energy, p);
    // d/dx (E − W²) = −2·W·W′
    let value_and_slope = |x: &R| -> Result<(R, R)> {
        let wx = w(x, p)?;
        let f = (root_energy.clone() - &wx) * (root_energy.clone() + &wx);
        let df = -(wx * w_prime(x, p)? * 2.0);
        Ok((f, df))
    };
    let brackets = scan_sign_changes(&value, &x_min, &x_max, Some(&anchor))?;
    let (left, right) = two_brackets(brackets)?;
    let x_left = polish_root(&value_and_slope, left, tol)?;
    let x_right = polish_root(&value_and_slope, right, tol)?;
    Ok(TurningPoints {
        residual_left: value(&x_left)?,
        residual_right: value(&x_right)?,
        x_left,
        x_right,
    })
}

/// Closed-form SWKB turning points of the conventional member (α = 0):
/// `u_{L,R} = 2(2n+ℓ) ∓ 4√(n(n+ℓ))` in `u = ωx²`. `u_L` is taken from the
/// product `u_L·u_R = 4ℓ²` to avoid cancellation when `n ≫ ℓ`.
pub fn conventional_turning_points<R: Real>(n: u32, ell: &R, omega: &R) -> Result<TurningPoints<R>> {
    if n == 0 {
        return Err(Error::NoTurningPoints);
    }
    let (u_left, u_right) = conventional_u(n, ell);
    let x_left = (u_left / omega).sqrt();
    let x_right = (u_right / omega).sqrt();
    Ok(TurningPoints {
        residual_left: x_left.zero_like(),
        residual_right: x_right.zero_like(),
        x_left,
        x_right,
    })
}

/// `(u_L, u_R)` for the conventional member at ω = 1.
pub fn conventional_u<R: Real>(n: u32, ell: &R) -> (R, R) {
    let n = ell.constant(f64::from(n));
    let center = (n.clone() * 2.0 + ell) * 2.0;
    let spread = (n.clone() * (n + ell)).sqrt() * 4.0;
    let u_right = center + spread;
    let u_left = ell.square() * 4.0 / &u_right;
    (u_left, u_right)
}

/// Limits of the JWKB integral `∫√(E_n − V₋)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JwkbLimits {
    pub turning: TurningPoints<f64>,
    /// True when `E_n − V₋` stays positive down to `x → 0⁺` (ℓ = 1, where
    /// V₋ is regular at the origin); `turning.x_left` is then `0`.
    pub left_at_origin: bool,
}

/// Turning points of `E_n − V₋(x)`.
pub fn jwkb_turning_points(n: u32, p: &ModelParams, tol: f64) -> Result<JwkbLimits> {
    let energy = energy_level(n, p);
    let value = |x: &f64| -> Result<f64> { Ok(energy - potential_minus_even(x, p)?) };
    let value_and_slope = |x: &f64| -> Result<(f64, f64)> {
        let h = 1e-6 * x;
        let slope = (value(&(x + h))? - value(&(x - h))?) / (2.0 * h);
        Ok((value(x)?, slope))
    };
    let anchor = p.w0_zero();
    let x_min = anchor * 1e-6;
    let x_max = 4.0 * (energy + p.omega() * (p.ell() + 1.0)).sqrt() / p.omega() + 4.0 * anchor;
    let brackets = scan_sign_changes(&value, &x_min, &x_max, Some(&anchor))?;
    let left_open = value(&x_min)? > 0.0;
    match (left_open, brackets.len()) {
        (true, 1) => {
            let x_right = polish_root(&value_and_slope, brackets[0], tol)?;
            Ok(JwkbLimits {
                turning: TurningPoints {
                    x_left: 0.0,
                    x_right,
                    residual_left: 0.0,
                    residual_right: value(&x_right)?,
                },
                left_at_origin: true,
            })
        }
        (false, _) => {
            let (left, right) = two_brackets(brackets)?;
            let x_left = polish_root(&value_and_slope, left, tol)?;
            let x_right = polish_root(&value_and_slope, right, tol)?;
            Ok(JwkbLimits {
                turning: TurningPoints {
                    residual_left: value(&x_left)?,
                    residual_right: value(&x_right)?,
                    x_left,
                    x_right,
                },
                left_at_origin: false,
            })
        }
        (true, 0) => Err(Error::NoTurningPoints),
        (true, _) => Err(Error::MultipleRoots {
            brackets: brackets.iter().map(|(a, b)| (a.to_f64(), b.to_f64())).collect(),
        }),
    }
}

fn two_brackets<R: Real>(brackets: Vec<(R, R)>) -> Result<((R, R), (R, R))> {
    match brackets.len() {
        0 => Err(Error::NoTurningPoints),
        2 => {
            let mut it = brackets.into_iter();
            let left = it.next().expect("two brackets");
            let right = it.next().expect("two brackets");
            Ok((left, right))
        }
        _ => Err(Error::MultipleRoots {
            brackets: brackets.iter().map(|(a, b)| (a.to_f64(), b.to_f64())).collect(),
        }),
    }
}

/// Sign changes of `f` on a log-spaced grid over `[x_min, x_max]`, with
/// `extra` inserted so a narrow allowed region around it cannot be stepped over.
/// A grid value of exactly zero counts as non-positive.
fn scan_sign_changes<R, F>(f: &F, x_min: &R, x_max: &R, extra: Option<&R>) -> Result<Vec<(R, R)>>
where
    R: Real,
    F: Fn(&R) -> Result<R>,
{
    let ratio = (x_max.to_f64() / x_min.to_f64()).ln() / (SCAN_POINTS - 1) as f64;
    let mut grid: Vec<R> = (0..SCAN_POINTS)
        .map(|i| {
            if i == 0 {
                x_min.clone()
            } else if i == SCAN_POINTS - 1 {
                x_max.clone()
            } else {
                x_min.clone() * (ratio * i as f64).exp()
            }
        })
        .collect();
    if let Some(extra) = extra {
        let at = grid.partition_point(|x| x < extra);
        if at < grid.len() && grid[at] != *extra {
            grid.insert(at, extra.clone());
        }
    }
    let mut brackets = Vec::new();
    let mut previous: Option<(R, bool)> = None;
    for x in grid {
        let positive = f(&x)? > 0.0;
        if let Some((x_prev, was_positive)) = previous {
            if positive != was_positive {
                brackets.push((x_prev, x.clone()));
            }
        }
        previous = Some((x, positive));
    }
    Ok(brackets)
}

/// Newton iteration kept inside a shrinking sign bracket; falls back to
/// bisection whenever a Newton step would leave it or stalls. Stops when the
/// step drops below `tol·|x|` or the function value is exactly zero.
fn polish_root<R, F>(f: &F, bracket: (R, R), tol: f64) -> Result<R>
where
    R: Real,
    F: Fn(&R) -> Result<(R, R)>,
{
    let (mut lo, mut hi) = bracket;
    let (f_lo, _) = f(&lo)?;
    let lo_positive = f_lo > 0.0;
    let mut x = (lo.clone() + &hi) / 2.0;
    let mut previous_step: Option<R> = None;
    for _ in 0..MAX_POLISH_ITERATIONS {
        let (fx, dfx) = f(&x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx > 0.0) == lo_positive {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        let newton = if dfx != 0.0 {
            Some(x.clone() - fx / &dfx)
        } else {
            None
        };
        let inside = |c: &R| (c.clone() - &lo) * (c.clone() - &hi) < 0.0;
        let bisect = (lo.clone() + &hi) / 2.0;
        let next = match newton {
            Some(candidate) if inside(&candidate) => {
                let step = (candidate.clone() - &x).abs();
                // Newton must at least halve its step every two iterations.
                let shrinking = previous_step
                    .as_ref()
                    .is_none_or(|prev| step.clone() * 2.0 < *prev || step.clone() < (hi.clone() - &lo).abs());
                if shrinking {
                    candidate
                } else {
                    bisect
                }
            }
            _ => bisect,
        };
        let step = (next.clone() - &x).abs();
        let scale = x.abs();
        x = next;
        if step <= scale * tol {
            return Ok(x);
        }
        previous_step = Some(step);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Precision;
    use rug::Float;

    fn unit(ell: f64, alpha: f64) -> ModelParams {
        ModelParams::unit(ell, alpha).unwrap()
    }

    #[test]
    fn conventional_closed_form_values() {
        let tp = conventional_turning_points(1, &1.0, &1.0).unwrap();
        let sqrt2 = 2f64.sqrt();
        assert!((tp.x_left - (6.0 - 4.0 * sqrt2).sqrt()).abs() < 1e-15);
        assert!((tp.x_right - (6.0 + 4.0 * sqrt2).sqrt()).abs() < 1e-15);
        assert!((tp.x_left - 0.585_786_4).abs() < 1e-7);
        assert!((tp.x_right - 3.414_213_6).abs() < 1e-7);
        assert!((tp.x_left * tp.x_right - 2.0).abs() < 1e-14);
        assert_eq!(
            conventional_turning_points(0, &1.0, &1.0),
            Err(Error::NoTurningPoints)
        );
    }

    #[test]
    fn numeric_roots_match_closed_form_at_alpha_zero() {
        for n in 1..=5 {
            for ell in [1.0, 2.0, 3.0] {
                let numeric = swkb_turning_points(n, &unit(ell, 0.0), 1e-14).unwrap();
                let exact = conventional_turning_points(n, &ell, &1.0).unwrap();
                assert!(
                    (numeric.x_left / exact.x_left - 1.0).abs() < 1e-12,
                    "n={n} ell={ell}"
                );
                assert!(
                    (numeric.x_right / exact.x_right - 1.0).abs() < 1e-12,
                    "n={n} ell={ell}"
                );
            }
        }
    }

    #[test]
    fn ground_state_has_no_turning_points() {
        for alpha in [0.0, 0.5, 1.0] {
            assert_eq!(
                swkb_turning_points(0, &unit(2.0, alpha), 1e-14),
                Err(Error::NoTurningPoints)
            );
        }
    }

    #[test]
    fn extended_member_roots_are_roots() {
        let tp = swkb_turning_points(1, &unit(1.0, 1.0), 1e-14).unwrap();
        assert!(tp.x_left < tp.x_right);
        assert!(tp.residual_left.abs() < 1e-13 && tp.residual_right.abs() < 1e-13);
        // Dense scan: the roots are the only sign changes.
        let f = |x: f64| 2.0 - w(&x, &unit(1.0, 1.0)).unwrap().powi(2);
        let mut changes = Vec::new();
        let mut prev = f(1e-3);
        for i in 1..200_000 {
            let x = 1e-3 + i as f64 * 1e-4;
            let v = f(x);
            if (v > 0.0) != (prev > 0.0) {
                changes.push(x);
            }
            prev = v;
        }
        assert_eq!(changes.len(), 2);
        assert!((changes[0] - tp.x_left).abs() < 2e-4);
        assert!((changes[1] - tp.x_right).abs() < 2e-4);
    }

    #[test]
    fn extended_precision_roots() {
        let p: ModelParams<Float> = unit(1000.0, 1.0).at_precision(Precision::Digits(100));
        let tp = swkb_turning_points(1, &p, 1e-96).unwrap();
        assert!(tp.residual_left.abs().to_f64() < 1e-90);
        assert!(tp.residual_right.abs().to_f64() < 1e-90);
    }

    #[test]
    fn jwkb_limits_reach_the_origin_for_ell_one() {
        let limits = jwkb_turning_points(0, &unit(1.0, 0.0), 1e-14).unwrap();
        assert!(limits.left_at_origin);
        // V₋ = x²/4 − 3/2 for ℓ = 1, α = 0.
        assert!((limits.turning.x_right - 6f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn jwkb_has_two_roots_with_centrifugal_barrier() {
        let limits = jwkb_turning_points(1, &unit(2.0, 0.0), 1e-14).unwrap();
        assert!(!limits.left_at_origin);
        // V₋ = x²/4 + 2/x² − 5/2; E = 2 → x⁴ − 18x² + 8 = 0.
        let disc = (81.0f64 - 8.0).sqrt();
        assert!((limits.turning.x_left - (9.0 - disc).sqrt()).abs() < 1e-10);
        assert!((limits.turning.x_right - (9.0 + disc).sqrt()).abs() < 1e-10);
        let swkb = swkb_turning_points(1, &unit(2.0, 0.0), 1e-14).unwrap();
        assert!((swkb.x_left - limits.turning.x_left).abs() > 1e-3);
    }
}
