use thiserror::Error;

/// Errors produced by the solvers, quadrature routines, and input validation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Root bracket does not straddle a sign change.
    #[error("bracket [{lo}, {hi}] does not straddle a root: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// Iteration limit reached before the tolerance was met.
    #[error("no convergence after {iterations} iterations (best estimate {best})")]
    Convergence { iterations: usize, best: f64 },

    /// Adaptive quadrature hit its subdivision limit; carries the best estimate.
    #[error("quadrature did not reach tolerance: estimate {estimate}, error bound {err_bound}")]
    Quadrature { estimate: f64, err_bound: f64 },

    /// A scan input failed its structural precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A computed value escaped its analytic bounds.
    #[error("internal consistency check failed: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
