//! Numerov shooting for the bound states of `H₋ = −d²/dx² + V₋(x)` on (0, ∞).
//!
//! Each level is bracketed by node counting (the outward solution at energy
//! E has as many sign changes as there are levels below E) and then located
//! by bisection on the sign of the discrete Casoratian of the outward and
//! inward solutions, evaluated at the outer classical turning point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{potential_minus_even, ModelParams};
use crate::turning::conventional_u;

const MAX_BISECTIONS: usize = 200;
const MAX_EXPANSIONS: usize = 60;
const RESCALE_ABOVE: f64 = 1e150;

/// Uniform grid on `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumerovGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub step: f64,
}

impl NumerovGrid {
    /// `x_min = 1e−4`, step `1e−3`, and `x_max` ten oscillator lengths past
    /// the outer turning point of level `n_max`.
    pub fn for_levels(p: &ModelParams, n_max: usize) -> Self {
        let (_, u_right) = conventional_u(n_max as u32, p.ell());
        let omega = *p.omega();
        Self {
            x_min: 1e-4,
            x_max: (u_right / omega).sqrt() + 10.0 / omega.sqrt(),
            step: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min > 0.0 && self.step > 0.0 && self.step <= 1e-3) {
            return Err(Error::InvalidConfig(format!(
                "Numerov grid needs x_min > 0 and 0 < step <= 1e-3, got {self:?}"
            )));
        }
        if !(self.x_max.is_finite() && self.x_max > self.x_min + 16.0 * self.step) {
            return Err(Error::InvalidConfig(format!(
                "Numerov grid is too short: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    /// Interior nodes of each converged eigenfunction.
    pub node_counts: Vec<usize>,
    pub grid: NumerovGrid,
    /// First grid point actually used; see [`numerov_solve`].
    pub x_start: f64,
    /// Widest final eigenvalue bracket.
    pub achieved_tol: f64,
}

/// Lowest `n_max + 1` eigenvalues of `H₋`.
///
/// Near the origin `ψ ∝ x^ℓ(1 + c·x²)` with `c = (V_reg(0) − E)/(4ℓ + 2)`,
/// where `V_reg` is V₋ without its `ℓ(ℓ−1)/x²` term. Integration starts at the
/// first grid point where `h²ℓ(ℓ−1)/x² ≤ 10⁻²`, so the Numerov weights stay
/// well conditioned next to the centrifugal barrier. `ψ(x_max) = 0`.
pub fn numerov_solve(
    p: &ModelParams,
    n_max: usize,
    grid: &NumerovGrid,
    e_tol: f64,
) -> Result<SpectrumResult> {
    grid.validate()?;
    if !(e_tol > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "e_tol must be positive, got {e_tol}"
        )));
    }
    let problem = Problem::new(p, grid)?;
    let levels: Vec<Level> = (0..=n_max)
        .into_par_iter()
        .map(|k| problem.level(k, e_tol))
        .collect::<Result<_>>()?;

    let node_counts: Vec<usize> = levels.iter().map(|l| l.nodes).collect();
    if node_counts.iter().enumerate().any(|(k, &nodes)| nodes != k) {
        return Err(Error::MissedState { node_counts });
    }
    Ok(SpectrumResult {
        eigenvalues: levels.iter().map(|l| l.energy).collect(),
        node_counts,
        grid: *grid,
        x_start: problem.xs[0],
        achieved_tol: levels.iter().map(|l| l.width).fold(0.0, f64::max),
    })
}

struct Level {
    energy: f64,
    nodes: usize,
    width: f64,
}

struct Problem {
    xs: Vec<f64>,
    potential: Vec<f64>,
    step: f64,
    ell: f64,
    /// `V₋ − ℓ(ℓ−1)/x²` extrapolated to the origin.
    regular_at_origin: f64,
}

impl Problem {
    fn new(p: &ModelParams, grid: &NumerovGrid) -> Result<Self> {
        let ell = *p.ell();
        let h = grid.step;
        let barrier = ell * (ell - 1.0);
        let x_start = grid.x_min.max(10.0 * h * barrier.sqrt());
        let count = ((grid.x_max - x_start) / h).floor() as usize + 1;
        let xs: Vec<f64> = (0..count).map(|i| x_start + i as f64 * h).collect();
        let potential = xs
            .iter()
            .map(|x| potential_minus_even(x, p))
            .collect::<Result<Vec<_>>>()?;
        let tiny = 1e-6;
        let regular_at_origin = potential_minus_even(&tiny, p)? - barrier / (tiny * tiny);
        Ok(Self {
            xs,
            potential,
            step: h,
            ell,
            regular_at_origin,
        })
    }

    fn weights(&self, energy: f64) -> Vec<f64> {
        let c = self.step * self.step / 12.0;
        self.potential.iter().map(|v| 1.0 - c * (v - energy)).collect()
    }

    /// Numerov recurrence `y_{i+1} = T_i·y_i − y_{i−1}` on `y = F·ψ`, where
    /// `F = 1 − h²(V − E)/12` and `T = (12 − 10F)/F`.
    fn step_ratio(f: f64) -> f64 {
        (12.0 - 10.0 * f) / f
    }

    /// Outward `y` values up to index `stop` inclusive, with sign changes
    /// counted along the way. Values are rescaled in flight; only ratios and
    /// signs are meaningful.
    fn outward(&self, energy: f64, weights: &[f64], stop: usize) -> (f64, f64, usize) {
        let c = (self.regular_at_origin - energy) / (4.0 * self.ell + 2.0);
        let psi = |i: usize| {
            let x0 = self.xs[0];
            let x = self.xs[i];
            (x / x0).powf(self.ell) * (1.0 + c * x * x) / (1.0 + c * x0 * x0)
        };
        let mut prev = weights[0] * psi(0);
        let mut cur = weights[1] * psi(1);
        let mut nodes = usize::from(prev * cur < 0.0);
        for &w in &weights[1..stop] {
            let next = Self::step_ratio(w) * cur - prev;
            if next * cur < 0.0 {
                nodes += 1;
            }
            prev = cur;
            cur = next;
            if cur.abs() > RESCALE_ABOVE {
                prev /= RESCALE_ABOVE;
                cur /= RESCALE_ABOVE;
            }
        }
        (prev, cur, nodes)
    }

    /// Inward `y` values at indices `(stop, stop + 1)`, starting from
    /// `ψ(x_max) = 0`, with the sign changes beyond `stop + 1`.
    fn inward(&self, weights: &[f64], stop: usize) -> (f64, f64, usize) {
        let last = self.xs.len() - 1;
        let mut after = 0.0;
        let mut cur = 1e-300;
        let mut nodes = 0;
        for i in (stop + 1..last).rev() {
            let next = Self::step_ratio(weights[i]) * cur - after;
            if i > stop + 1 && next * cur < 0.0 {
                nodes += 1;
            }
            after = cur;
            cur = next;
            if cur.abs() > RESCALE_ABOVE {
                after /= RESCALE_ABOVE;
                cur /= RESCALE_ABOVE;
            }
        }
        (cur, after, nodes)
    }

    /// Number of levels strictly below `energy`.
    fn count_below(&self, energy: f64) -> usize {
        let weights = self.weights(energy);
        self.outward(energy, &weights, self.xs.len() - 1).2
    }

    /// Last grid index in the classically allowed region, kept away from
    /// both ends of the grid.
    fn matching_index(&self, energy: f64) -> usize {
        let last = self.xs.len() - 1;
        let outer = self
            .potential
            .iter()
            .rposition(|&v| v < energy)
            .unwrap_or(last / 2);
        outer.clamp(2, last - 3)
    }

    /// Sign-carrying Casoratian of the outward and inward solutions, scaled
    /// by both solution magnitudes so it stays finite.
    fn mismatch(&self, energy: f64) -> (f64, usize) {
        let weights = self.weights(energy);
        let m = self.matching_index(energy);
        let (out_m, out_next, out_nodes) = self.outward(energy, &weights, m + 1);
        let (in_m, in_next, in_nodes) = self.inward(&weights, m);
        let casoratian = out_m * in_next - out_next * in_m;
        let scale = (out_m.abs() + out_next.abs()) * (in_m.abs() + in_next.abs());
        // Outward nodes run up to m + 1, inward ones start past it.
        (casoratian / scale, out_nodes + in_nodes)
    }

    fn level(&self, k: usize, e_tol: f64) -> Result<Level> {
        // Expand an energy window until it holds level k.
        let v_min = self.potential.iter().copied().fold(f64::INFINITY, f64::min);
        let mut low = v_min;
        let mut high = v_min + 1.0;
        let mut expansions = 0;
        while self.count_below(high) <= k {
            high = v_min + 2.0 * (high - v_min);
            expansions += 1;
            if expansions > MAX_EXPANSIONS {
                return Err(Error::GridTooCoarse { state: k, e_tol });
            }
        }
        // Node-count bisection until exactly level k is inside.
        let mut below_low = self.count_below(low);
        let mut below_high = self.count_below(high);
        let mut iterations = 0;
        while !(below_low == k && below_high == k + 1) {
            let mid = 0.5 * (low + high);
            let below = self.count_below(mid);
            if below <= k {
                low = mid;
                below_low = below;
            } else {
                high = mid;
                below_high = below;
            }
            iterations += 1;
            if iterations > MAX_BISECTIONS {
                return Err(Error::GridTooCoarse { state: k, e_tol });
            }
        }
        // Casoratian bisection inside the single-level bracket.
        let (low_sign, _) = self.mismatch(low);
        let (high_sign, _) = self.mismatch(high);
        if low_sign == 0.0 {
            return self.finish(low, 0.0);
        }
        if high_sign == 0.0 || (low_sign > 0.0) == (high_sign > 0.0) {
            return Err(Error::GridTooCoarse { state: k, e_tol });
        }
        let mut iterations = 0;
        while high - low > e_tol {
            let mid = 0.5 * (low + high);
            if mid <= low || mid >= high {
                break;
            }
            let (value, _) = self.mismatch(mid);
            if value == 0.0 {
                return self.finish(mid, 0.0);
            }
            if (value > 0.0) == (low_sign > 0.0) {
                low = mid;
            } else {
                high = mid;
            }
            iterations += 1;
            if iterations > MAX_BISECTIONS {
                break;
            }
        }
        let width = high - low;
        if width > e_tol {
            return Err(Error::GridTooCoarse { state: k, e_tol });
        }
        self.finish(0.5 * (low + high), width)
    }

    fn finish(&self, energy: f64, width: f64) -> Result<Level> {
        let (_, nodes) = self.mismatch(energy);
        Ok(Level { energy, nodes, width })
    }
}
