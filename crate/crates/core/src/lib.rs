//! Analytic photon statistics of a hybrid dissipative/dispersive optomechanical
//! cavity with clockwise and counter-clockwise whispering-gallery modes.
//!
//! The crate provides
//!
//! * [`params`]: physical parameters, derived shifts and per-direction detunings,
//! * [`specfun`]: scaled modified Bessel functions, Laguerre/Tricomi coefficients,
//! * [`spectrum`]: eigen-energies, sideband weights and the excitation spectrum,
//! * [`correlation`]: equal-time g2(0) and the CW/CCW nonreciprocity metric,
//! * [`oracle`]: a truncated Fock-space Lindblad steady-state solver used to check
//!   every closed-form result independently.
//!
//! All frequencies are expressed in units of the mechanical frequency unless a
//! field says otherwise.

pub mod correlation;
pub mod error;
pub mod oracle;
pub mod params;
pub mod specfun;
pub mod spectrum;

mod curve;

pub use correlation::{
    b_coefficient, correlation_curve, g2, nonreciprocity, nonreciprocity_from_g2,
    CorrelationCurve,
};
pub use curve::{DetuningGrid, Provenance};
pub use error::{Error, Result};
pub use params::{
    derive, effective_detuning, thermal_occupation, DerivedParams, ModeDirection, SystemParams,
};
pub use spectrum::{
    eigen_energy, excitation_spectrum, sideband_weight, EnergyLevel, SeriesTruncation,
    SpectrumCurve,
};
