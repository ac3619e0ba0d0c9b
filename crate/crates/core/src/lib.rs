//! SWKB quantization laboratory for the extended radial-oscillator
//! superpotential `W = W₀ + α·W_h`.
//!
//! The crate evaluates the SWKB action integral `I(n, ℓ, α) = ∫√(E_n − W²) dx`
//! between its turning points, compares it with the exact `nπ`, and provides
//! the supporting pieces: the closed-form and numerical slopes at α = 0, a
//! shape-invariance check, a JWKB comparison, and a Numerov eigenvalue
//! oracle for the partner potential `V₋`. Kernels are generic over [`Real`],
//! so any computation can run in double or in MPFR extended precision.

// `!(x > 0.0)` is used deliberately so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod model;
pub mod quad;
pub mod real;
pub mod shape_invariance;
pub mod spectrum;
pub mod turning;

pub use error::{Error, Result};
pub use model::{ModelParams, Partner};
pub use quad::QuadratureConfig;
pub use real::{Precision, Real};
pub use turning::TurningPoints;
