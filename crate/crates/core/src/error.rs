use thiserror::Error;

/// Errors produced by the analytic series and the master-equation oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// One or more parameter fields violate their invariants.
    #[error("invalid parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),

    #[error("domain error: {0}")]
    Domain(String),

    /// A truncated series did not reach the requested tail tolerance.
    #[error("{what} truncation not converged (tail {tail:.3e} > tol {tol:.3e}); need {required} >= {suggested}")]
    Truncation {
        what: &'static str,
        required: &'static str,
        suggested: usize,
        tail: f64,
        tol: f64,
    },

    /// An index exceeds the supported truncation bound.
    #[error("truncation bound exceeded: {index} = {value} > {max}")]
    IndexBound {
        index: &'static str,
        value: u64,
        max: u64,
    },

    /// Hilbert space size exceeded.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// g2 is undefined when the photon number vanishes.
    #[error("g2 undefined: photon number {0:.3e} below threshold")]
    UndefinedG2(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
