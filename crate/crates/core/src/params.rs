//! Physical parameters of the hybrid coupled cavity and the scalar quantities
//! derived from them.
//!
//! Frequencies are angular frequencies in units of `omega_m`; with the default
//! `omega_m = 1` every number is directly a ratio to the mechanical frequency.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J s.
const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
const K_B: f64 = 1.380_649e-23;

/// Circulation direction of a whispering-gallery mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeDirection {
    Cw,
    Ccw,
}

impl ModeDirection {
    pub const ALL: [ModeDirection; 2] = [ModeDirection::Cw, ModeDirection::Ccw];

    pub fn other(self) -> Self {
        match self {
            ModeDirection::Cw => ModeDirection::Ccw,
            ModeDirection::Ccw => ModeDirection::Cw,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModeDirection::Cw => "cw",
            ModeDirection::Ccw => "ccw",
        }
    }
}

impl fmt::Display for ModeDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModeDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cw" => Ok(ModeDirection::Cw),
            "ccw" => Ok(ModeDirection::Ccw),
            other => Err(Error::Domain(format!(
                "unknown mode direction '{other}' (expected cw or ccw)"
            ))),
        }
    }
}

/// Device rates, couplings and drive settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Optical resonance frequency. Only enters absolute eigen-energies; 0 selects
    /// the detuning frame.
    pub omega_r: f64,
    /// Mechanical frequency, the unit of the problem.
    pub omega_m: f64,
    /// Dispersive coupling rate.
    pub g_s: f64,
    /// Dissipative coupling rate.
    pub g_d: f64,
    /// Optical amplitude decay rate.
    pub kappa: f64,
    /// Mechanical (amplitude) decay rate.
    pub gamma_m: f64,
    /// Auxiliary pump amplitude (dimensionless).
    pub aux_amplitude: f64,
    /// Weak probe amplitude.
    pub drive_amplitude: f64,
    /// Mean thermal phonon number of the mechanical bath.
    pub n_thermal: f64,
    /// Direction that receives the auxiliary cross-Kerr shift.
    pub pumped_direction: ModeDirection,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            omega_r: 0.0,
            omega_m: 1.0,
            g_s: 0.0,
            g_d: 0.0,
            kappa: 0.1,
            gamma_m: 0.0,
            aux_amplitude: 0.0,
            drive_amplitude: 1e-4,
            n_thermal: 0.0,
            pumped_direction: ModeDirection::Cw,
        }
    }
}

impl SystemParams {
    /// Checks every field invariant and reports all offending fields at once.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        let mut check = |name: &str, value: f64, strict: bool| {
            if !value.is_finite() {
                bad.push(format!("{name} must be finite (got {value})"));
            } else if strict && value <= 0.0 {
                bad.push(format!("{name} must be > 0 (got {value})"));
            } else if !strict && value < 0.0 {
                bad.push(format!("{name} must be >= 0 (got {value})"));
            }
        };
        check("omega_m", self.omega_m, true);
        check("kappa", self.kappa, true);
        check("g_s", self.g_s, false);
        check("g_d", self.g_d, false);
        check("gamma_m", self.gamma_m, false);
        check("aux_amplitude", self.aux_amplitude, false);
        check("drive_amplitude", self.drive_amplitude, false);
        check("n_thermal", self.n_thermal, false);
        if !self.omega_r.is_finite() {
            bad.push(format!("omega_r must be finite (got {})", self.omega_r));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(bad))
        }
    }

    /// Dimensionless Kerr parameter g_s / omega_m.
    pub fn eta(&self) -> f64 {
        self.g_s / self.omega_m
    }

    /// Single-photon Kerr shift g_s^2 / omega_m.
    pub fn kerr_shift(&self) -> f64 {
        self.g_s * self.g_s / self.omega_m
    }

    /// Auxiliary cross-Kerr shift 2 g_d^2 E^2 / omega_m.
    pub fn aux_shift(&self) -> f64 {
        2.0 * self.g_d * self.g_d * self.aux_amplitude * self.aux_amplitude / self.omega_m
    }

    /// Sets `g_s` from a target `eta`.
    pub fn with_eta(mut self, eta: f64) -> Self {
        self.g_s = eta * self.omega_m;
        self
    }

    /// Chooses the auxiliary amplitude that produces the shift `delta_d`.
    ///
    /// Needs a nonzero dissipative coupling unless `delta_d` is zero.
    pub fn with_aux_shift(mut self, delta_d: f64) -> Result<Self> {
        if !(delta_d >= 0.0) || !delta_d.is_finite() {
            return Err(Error::Domain(format!("aux shift must be >= 0 (got {delta_d})")));
        }
        if delta_d == 0.0 {
            self.aux_amplitude = 0.0;
            return Ok(self);
        }
        if self.g_d <= 0.0 {
            return Err(Error::Domain(
                "a nonzero aux shift needs g_d > 0".to_string(),
            ));
        }
        self.aux_amplitude = (delta_d * self.omega_m / (2.0 * self.g_d * self.g_d)).sqrt();
        Ok(self)
    }
}

/// Scalars computed once from [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub eta: f64,
    /// Auxiliary shift of the pumped direction.
    pub delta_d: f64,
    /// Two-photon anharmonicity entering the g2 propagator.
    pub delta_g: f64,
    pub kerr_shift: f64,
}

pub fn derive(params: &SystemParams) -> Result<DerivedParams> {
    params.validate()?;
    let kerr_shift = params.kerr_shift();
    Ok(DerivedParams {
        eta: params.eta(),
        delta_d: params.aux_shift(),
        // Sign checked against the master-equation oracle: the two-photon
        // polaron level sits 2*(delta_i + kerr_shift) away from the drive.
        delta_g: kerr_shift,
        kerr_shift,
    })
}

/// Detuning seen by mode `direction` for laser detuning `delta = omega_l - omega_r`.
///
/// The pumped direction gets `delta - kerr_shift - delta_d`, the other one
/// `delta - kerr_shift`.
pub fn effective_detuning(
    params: &SystemParams,
    direction: ModeDirection,
    delta: f64,
) -> Result<f64> {
    params.validate()?;
    Ok(detuning_unchecked(params, direction, delta))
}

pub(crate) fn detuning_unchecked(params: &SystemParams, direction: ModeDirection, delta: f64) -> f64 {
    let base = delta - params.kerr_shift();
    if direction == params.pumped_direction {
        base - params.aux_shift()
    } else {
        base
    }
}

/// Bose-Einstein occupation for the ratio `x = hbar*omega / (k_B*T)`.
pub fn bose_einstein(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("hbar*omega/k_B*T must be > 0 (got {x})")));
    }
    // expm1 overflows to +inf past ~709.8, giving 0.
    Ok(1.0 / x.exp_m1())
}

/// Thermal phonon number at `temperature` (kelvin) and angular frequency
/// `omega` (rad/s).
pub fn thermal_occupation(temperature: f64, omega: f64) -> Result<f64> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::Domain(format!("temperature must be > 0 K (got {temperature})")));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("omega must be > 0 (got {omega})")));
    }
    bose_einstein(HBAR * omega / (K_B * temperature))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p() -> SystemParams {
        SystemParams::default()
    }

    #[test]
    fn aux_shift_vanishes_without_dissipative_coupling() {
        let params = SystemParams { g_d: 0.0, aux_amplitude: 5.0, ..p() };
        assert_eq!(derive(&params).unwrap().delta_d, 0.0);
    }

    #[test]
    fn aux_shift_direct_substitution() {
        let params = SystemParams { g_d: 0.5, aux_amplitude: 1.0, ..p() };
        assert_relative_eq!(derive(&params).unwrap().delta_d, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn eta_and_kerr_shift() {
        let d = derive(&SystemParams { g_s: 1.0, ..p() }).unwrap();
        assert_eq!(d.eta, 1.0);
        assert_eq!(d.kerr_shift, 1.0);
        assert_eq!(d.delta_g, 1.0);
    }

    #[test]
    fn invalid_params_list_every_field() {
        let params = SystemParams { omega_m: 0.0, kappa: -1.0, n_thermal: f64::NAN, ..p() };
        match derive(&params) {
            Err(Error::InvalidParams(fields)) => {
                assert_eq!(fields.len(), 3);
                assert!(fields[0].contains("omega_m"));
                assert!(fields[1].contains("kappa"));
                assert!(fields[2].contains("n_thermal"));
            }
            other => panic!("expected InvalidParams, got {other:?}"),
        }
    }

    #[test]
    fn detuning_without_couplings() {
        for dir in ModeDirection::ALL {
            assert_eq!(effective_detuning(&p(), dir, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn detuning_direct_substitution() {
        let params = SystemParams { g_s: 1.0, g_d: 0.5, aux_amplitude: 1.0, ..p() };
        assert_relative_eq!(effective_detuning(&params, ModeDirection::Cw, 1.0).unwrap(), -0.5);
        assert_relative_eq!(effective_detuning(&params, ModeDirection::Ccw, 1.0).unwrap(), 0.0);
        let louder = SystemParams { aux_amplitude: 7.0, ..params.clone() };
        assert_eq!(
            effective_detuning(&louder, ModeDirection::Ccw, 1.0).unwrap(),
            effective_detuning(&params, ModeDirection::Ccw, 1.0).unwrap()
        );
    }

    #[test]
    fn pumped_direction_is_configurable() {
        let params = SystemParams {
            g_d: 0.5,
            aux_amplitude: 1.0,
            pumped_direction: ModeDirection::Ccw,
            ..p()
        };
        assert_eq!(effective_detuning(&params, ModeDirection::Cw, 0.0).unwrap(), 0.0);
        assert_relative_eq!(effective_detuning(&params, ModeDirection::Ccw, 0.0).unwrap(), -0.5);
    }

    #[test]
    fn with_aux_shift_round_trips() {
        let params = SystemParams { g_d: 0.3, ..p() }.with_aux_shift(0.75).unwrap();
        assert_relative_eq!(params.aux_shift(), 0.75, max_relative = 1e-14);
        assert!(SystemParams::default().with_aux_shift(0.5).is_err());
        assert_eq!(SystemParams::default().with_aux_shift(0.0).unwrap().aux_amplitude, 0.0);
    }

    #[test]
    fn bose_einstein_values() {
        assert_relative_eq!(bose_einstein(std::f64::consts::LN_2).unwrap(), 1.0, max_relative = 1e-14);
        // 1/(e^0.01 - 1) evaluated with 30-digit arithmetic.
        assert_relative_eq!(bose_einstein(0.01).unwrap(), 99.500_833_331_944_4, max_relative = 1e-13);
        assert_eq!(bose_einstein(1e4).unwrap(), 0.0);
        assert!(bose_einstein(0.0).is_err());
    }

    #[test]
    fn thermal_occupation_limits_and_errors() {
        let omega = 2.0 * std::f64::consts::PI * 1e9;
        assert_eq!(thermal_occupation(1e-6, omega).unwrap(), 0.0);
        assert!(thermal_occupation(1e-3, omega).unwrap() < 1e-20);
        assert!(thermal_occupation(0.0, omega).is_err());
        assert!(thermal_occupation(-1.0, omega).is_err());
        assert!(thermal_occupation(1.0, 0.0).is_err());
        // hbar*omega / k_B*T = ln 2
        let t = HBAR * omega / (K_B * std::f64::consts::LN_2);
        assert_relative_eq!(thermal_occupation(t, omega).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn direction_parsing() {
        assert_eq!("CW".parse::<ModeDirection>().unwrap(), ModeDirection::Cw);
        assert_eq!(" ccw ".parse::<ModeDirection>().unwrap(), ModeDirection::Ccw);
        assert!("both".parse::<ModeDirection>().is_err());
        assert_eq!(ModeDirection::Cw.other(), ModeDirection::Ccw);
    }

    proptest! {
        #[test]
        fn aux_shift_is_quadratic(g_d in 0.0f64..2.0, aux in 0.0f64..10.0, c in 0.0f64..10.0) {
            let base = SystemParams { g_d, aux_amplitude: aux, ..p() };
            let scaled = SystemParams { aux_amplitude: c * aux, ..base.clone() };
            let lhs = derive(&scaled).unwrap().delta_d;
            let rhs = c * c * derive(&base).unwrap().delta_d;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
        }

        #[test]
        fn cw_minus_ccw_is_minus_shift(
            g_s in 0.0f64..2.0, g_d in 0.0f64..2.0, aux in 0.0f64..5.0, delta in -10.0f64..10.0,
        ) {
            let params = SystemParams { g_s, g_d, aux_amplitude: aux, ..p() };
            let diff = effective_detuning(&params, ModeDirection::Cw, delta).unwrap()
                - effective_detuning(&params, ModeDirection::Ccw, delta).unwrap();
            let dd = params.aux_shift();
            prop_assert!((diff + dd).abs() <= 1e-12 * (1.0 + delta.abs() + dd));
        }

        #[test]
        fn occupation_monotone(t in 1e-3f64..1e3, dt in 1e-3f64..1e2, w in 1e6f64..1e12, dw in 1e3f64..1e11) {
            let n = thermal_occupation(t, w).unwrap();
            let hotter = thermal_occupation(t + dt, w).unwrap();
            let stiffer = thermal_occupation(t, w + dw).unwrap();
            prop_assert!(hotter > n || (n == 0.0 && hotter >= 0.0));
            prop_assert!(stiffer < n || n == 0.0);
        }
    }
}
