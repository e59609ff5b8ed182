//! Error type shared by all modules.

use thiserror::Error;

/// Everything that can go wrong while building or solving a model.
#[derive(Debug, Error)]
pub enum Error {
    /// Operator or state dimensions are incompatible.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A physical parameter is outside its allowed range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A computed rate came out non-finite or negative where it must not be.
    #[error("invalid rate: {0}")]
    InvalidRate(String),

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: {context} (best error estimate {error:.3e})")]
    QuadratureNonConvergence { context: String, error: f64 },

    /// The integrator's adaptive step fell below the representable minimum.
    #[error("step size underflow at t = {t:.6e} (step {h:.3e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    /// A density-matrix invariant (trace, Hermiticity, positivity) broke
    /// beyond the tolerated window.
    #[error("state invariant violated at t = {t:.6e}: {which} = {value:.3e}")]
    InvariantViolation { t: f64, which: &'static str, value: f64 },

    /// The Liouvillian kernel is not one-dimensional, so "the" steady
    /// state is undefined.
    #[error("degenerate Liouvillian kernel: dimension {dim}")]
    DegenerateKernel { dim: usize },

    /// The steady-state residual stayed above the acceptance bound.
    #[error("steady-state residual {residual:.3e} exceeds {bound:.3e}")]
    SteadyStateResidual { residual: f64, bound: f64 },

    /// Population or coherence outside the retained subspace grew beyond
    /// the bound that makes the reduction meaningful.
    #[error("subspace leakage {leakage:.3e} exceeds {bound:.3e}")]
    LeakageExceeded { leakage: f64, bound: f64 },

    /// A correlation series had not decayed to its asymptote at the end
    /// of the time grid, so its transform would be truncated.
    #[error("correlation tail {tail:.3e} above {bound:.3e} at tau_max = {tau_max:.3e} ps")]
    CorrelationTail { tail: f64, bound: f64, tau_max: f64 },
}
