use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coordinate must be strictly positive, got x = {x}")]
    Domain { x: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no turning points: the defining function has no sign change on the scan grid")]
    NoTurningPoints,

    #[error("expected two turning points, found {} brackets: {brackets:?}", brackets.len())]
    MultipleRoots { brackets: Vec<(f64, f64)> },

    #[error("integrand is negative ({value:e}) at x = {x} inside the integration interval")]
    NegativeIntegrand { x: f64, value: f64 },

    #[error("quadrature did not converge after {refinements} refinements (last change {last_change:e})")]
    NoConvergence { refinements: u32, last_change: f64 },

    #[error(
        "precision insufficient: quadrature error {error_estimate:e} exceeds 1% of the expected increment {increment:e}"
    )]
    PrecisionInsufficient { error_estimate: f64, increment: f64 },

    #[error(
        "finite-difference error Γ = {gamma:e} at λ = {lambda} is not positive; its logarithm is undefined"
    )]
    NonPositiveGamma { lambda: f64, gamma: f64 },

    #[error("sample grid is empty")]
    EmptyGrid,

    #[error("eigenvalue search did not converge to {e_tol:e} for state {state}")]
    GridTooCoarse { state: usize, e_tol: f64 },

    #[error("node counts are not consecutive: {node_counts:?}")]
    MissedState { node_counts: Vec<usize> },
}
