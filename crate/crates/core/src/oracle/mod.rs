//! Brute-force Lindblad steady states in a truncated Fock space.
//!
//! Used to check the closed-form spectrum and `g2` independently. Weak drives
//! are handled by rescaling the density-matrix unknowns by `(drive/kappa)^(n+m)`
//! before the linear solve, which keeps two-photon populations near `1e-12`
//! resolvable.

mod model;
mod solve;
mod sweep;

pub use model::{
    build_hamiltonian, AuxMode, ChannelKind, CollapseChannel, FockModel, HamiltonianKind,
    DEFAULT_DIM_CAP,
};
pub use solve::{
    observables, steady_state, SteadyState, HERMITICITY_TOL, POSITIVITY_TOL, RESIDUAL_TOL,
    TRACE_TOL,
};
pub use sweep::{
    oracle_correlation_curve, oracle_sweep, reference_photon_number, truncation_diagnostics,
    ComparisonReport, OracleSweep,
};
