//! The extended radial-oscillator superpotential family.
//!
//! With ħ = 1,
//!
//! ```text
//! W₀(x)   = ωx/2 − ℓ/x
//! W_h(x)  = 2ωx/(ωx² + 2ℓ − 1) − 2ωx/(ωx² + 2ℓ + 1)
//!         = 4ωx / ((ωx² + 2ℓ − 1)(ωx² + 2ℓ + 1))
//! W(x; α) = W₀(x) + α·W_h(x)
//! ```
//!
//! α = 0 is the conventional three-dimensional oscillator and α = 1 the
//! ħ-dependent shape-invariant extension. Both members share the spectrum
//! `E_n = 2nω` of the partner Hamiltonian built on `V₋ = W² − W′`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{Precision, Real};

/// Parameter set of one superpotential instance. ħ is fixed to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<R = f64> {
    ell: R,
    omega: R,
    alpha: R,
}

impl ModelParams<f64> {
    /// Validates `ell ≥ 1`, `omega > 0` and `0 ≤ alpha ≤ 1`.
    pub fn new(ell: f64, omega: f64, alpha: f64) -> Result<Self> {
        if !(ell >= 1.0) || !ell.is_finite() {
            return Err(Error::InvalidParameter(format!("ell must be >= 1, got {ell}")));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!("omega must be > 0, got {omega}")));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in [0, 1], got {alpha}"
            )));
        }
        Ok(Self { ell, omega, alpha })
    }

    /// ω = 1 member at the given ℓ and α.
    pub fn unit(ell: f64, alpha: f64) -> Result<Self> {
        Self::new(ell, 1.0, alpha)
    }

    /// Same parameters carried at another working precision.
    pub fn at_precision<R: Real>(&self, precision: Precision) -> ModelParams<R> {
        ModelParams {
            ell: R::from_f64(self.ell, precision),
            omega: R::from_f64(self.omega, precision),
            alpha: R::from_f64(self.alpha, precision),
        }
    }

    /// Copy with a different deformation parameter.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.ell, self.omega, alpha)
    }
}

impl<R: Real> ModelParams<R> {
    pub fn ell(&self) -> &R {
        &self.ell
    }

    pub fn omega(&self) -> &R {
        &self.omega
    }

    pub fn alpha(&self) -> &R {
        &self.alpha
    }

    /// Same member with ℓ shifted by one: the shape-invariance step `a → a + ħ`.
    pub fn shifted(&self) -> Self {
        Self {
            ell: self.ell.clone() + 1.0,
            omega: self.omega.clone(),
            alpha: self.alpha.clone(),
        }
    }

    /// `x* = √(2ℓ/ω)`, the zero of W₀.
    pub fn w0_zero(&self) -> R {
        (self.ell.clone() * 2.0 / &self.omega).sqrt()
    }
}

/// Which partner potential to build from W.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Partner {
    /// `V₋ = W² − W′`
    Minus,
    /// `V₊ = W² + W′`
    Plus,
}

fn check_domain<R: Real>(x: &R) -> Result<()> {
    if *x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { x: x.to_f64() })
    }
}

/// `(ωx² + 2ℓ − 1, ωx² + 2ℓ + 1)`, the two W_h denominators.
fn denominators<R: Real>(x: &R, p: &ModelParams<R>) -> (R, R) {
    let base = p.omega.clone() * x * x + p.ell.clone() * 2.0;
    (base.clone() - 1.0, base + 1.0)
}

/// Conventional part `W₀ = ωx/2 − ℓ/x`.
pub fn w0<R: Real>(x: &R, p: &ModelParams<R>) -> Result<R> {
    check_domain(x)?;
    Ok(p.omega.clone() * x / 2.0 - p.ell.clone() / x)
}

/// ħ-dependent part, evaluated through the single-fraction form
/// `4ωx / ((ωx² + 2ℓ − 1)(ωx² + 2ℓ + 1))` so that no cancellation occurs at large ℓ.
pub fn w_h<R: Real>(x: &R, p: &ModelParams<R>) -> Result<R> {
    check_domain(x)?;
    let (minus, plus) = denominators(x, p);
    Ok(p.omega.clone() * x * 4.0 / (minus * plus))
}

/// W_h as the difference of its two partial fractions. Only used to check
/// the single-fraction form.
pub fn w_h_two_term<R: Real>(x: &R, p: &ModelParams<R>) -> Result<R> {
    check_domain(x)?;
    let (minus, plus) = denominators(x, p);
    let numerator = p.omega.clone() * x * 2.0;
    Ok(numerator.clone() / minus - numerator / plus)
}

/// `W = W₀ + α·W_h`.
pub fn w<R: Real>(x: &R, p: &ModelParams<R>) -> Result<R> {
    let conventional = w0(x, p)?;
    if p.alpha == 0.0 {
        return Ok(conventional);
    }
    Ok(conventional + p.alpha.clone() * w_h(x, p)?)
}

/// Analytic `dW/dx`.
///
/// `W₀′ = ω/2 + ℓ/x²` and, with `s = ωx²`,
/// `W_h′ = 4ω(4ℓ² − 1 − 4ℓs − 3s²) / ((s + 2ℓ − 1)(s + 2ℓ + 1))²`.
pub fn w_prime<R: Real>(x: &R, p: &ModelParams<R>) -> Result<R> {
    check_domain(x)?;
    let conventional = p.omega.clone() / 2.0 + p.ell.clone() / x / x;
    if p.alpha == 0.0 {
        return Ok(conventional);
    }
    let s = p.omega.clone() * x * x;
    let (minus, plus) = denominators(x, p);
    let product = minus * plus;
    let ell = p.ell.clone();
    let numerator = ell.square() * 4.0 - 1.0 - ell * &s * 4.0 - s.square() * 3.0;
    let extended = p.omega.clone() * 4.0 * numerator / product.square();
    Ok(conventional + p.alpha.clone() * extended)
}

/// Partner potential `V∓ = W² ∓ W′`.
pub fn potential<R: Real>(x: &R, p: &ModelParams<R>, which: Partner) -> Result<R> {
    let w = w(x, p)?;
    let dw = w_prime(x, p)?;
    Ok(match which {
        Partner::Minus => w.square() - dw,
        Partner::Plus => w.square() + dw,
    })
}

/// `V₋` rearranged so the `ℓ²/x²` pieces of `W²` and `W′` never meet.
///
/// Writing `W = −ℓ/x + r(x)` with `r = ωx/2 + αW_h` regular at the origin,
/// `V₋ = ℓ(ℓ − 1)/x² − 2ℓ·r/x + r² − r′`. Every term is even in x, so this
/// accepts any finite `x ≠ 0` and returns `V₋(|x|)`. At ℓ = 1 the
/// centrifugal term is absent and `x = 0` is allowed as well.
pub fn potential_minus_even<R: Real>(x: &R, p: &ModelParams<R>) -> Result<R> {
    let x = x.abs();
    let regular_at_origin = p.ell == 1.0;
    if !(regular_at_origin && x == 0.0) {
        check_domain(&x)?;
    }
    let ell = p.ell.clone();
    let half_omega = p.omega.clone() / 2.0;
    let (minus, plus) = denominators(&x, p);
    let product = minus * plus;
    // r/x, r and r′
    let mut r_over_x = half_omega.clone();
    let mut r_prime = half_omega;
    if p.alpha != 0.0 {
        let s = p.omega.clone() * &x * &x;
        r_over_x = r_over_x + p.alpha.clone() * &p.omega * 4.0 / &product;
        let numerator = ell.square() * 4.0 - 1.0 - ell.clone() * &s * 4.0 - s.square() * 3.0;
        r_prime = r_prime + p.alpha.clone() * &p.omega * 4.0 * numerator / product.square();
    }
    let r = r_over_x.clone() * &x;
    let core = r.square() - r_prime - ell.clone() * r_over_x * 2.0;
    if regular_at_origin {
        return Ok(core);
    }
    Ok(core + ell.clone() * (ell - 1.0) / &x / &x)
}

/// Exact level `E_n = 2nω`; independent of ℓ and α.
pub fn energy_level<R: Real>(n: u32, p: &ModelParams<R>) -> R {
    p.omega.clone() * (2.0 * f64::from(n))
}
