//! Directional eigen-energies, thermal sideband weights and the weak-drive
//! photon excitation spectrum.
//!
//! The spectrum is a sum of mechanical sidebands,
//!
//! ```text
//! S(delta) = kappa * sum_n A_n kappa_n / (kappa_n^2 + (delta_i - n omega_m)^2)
//! ```
//!
//! with `delta_i` the direction-dependent detuning from [`crate::params`] and
//! `kappa_n = kappa + |n| gamma_m / 2`. Normalization: a bare cavity peaks at 1.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{check_increasing, Provenance};
use crate::error::{Error, Result};
use crate::params::{detuning_unchecked, ModeDirection, SystemParams};
use crate::specfun::{ln_bessel_i_scaled, log_factorial};

/// Thermal occupations below this use the closed zero-temperature weights.
pub const ZERO_TEMPERATURE_THRESHOLD: f64 = 1e-12;

/// Largest cutoff suggested when a truncation fails.
const MAX_SUGGESTED_CUTOFF: usize = 10_000;

/// Cutoffs for the infinite sideband sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTruncation {
    /// Sideband orders run over `-n_max..=n_max` (and `0..=n_max` in g2).
    pub n_max: usize,
    /// Cutoff of the two-photon index in the g2 triple sum.
    pub p_max: usize,
    /// Relative tail tolerance.
    pub tail_tol: f64,
}

impl Default for SeriesTruncation {
    fn default() -> Self {
        Self { n_max: 30, p_max: 40, tail_tol: 1e-10 }
    }
}

impl SeriesTruncation {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.n_max < 1 {
            bad.push(format!("n_max must be >= 1 (got {})", self.n_max));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            bad.push(format!("tail_tol must lie in (0, 1) (got {})", self.tail_tol));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(bad))
        }
    }

    pub fn doubled(&self) -> Self {
        Self { n_max: 2 * self.n_max, p_max: 2 * self.p_max, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub n_photon: u32,
    pub n_phonon: u32,
    pub direction: ModeDirection,
    /// Energy in units of omega_m.
    pub energy: f64,
}

/// `n omega_r - (g_s^2/omega_m) n^2 - [delta_d if pumped] + n_m omega_m`.
pub fn eigen_energy(n: u32, n_m: u32, direction: ModeDirection, params: &SystemParams) -> f64 {
    let n = n as f64;
    let aux = if direction == params.pumped_direction { params.aux_shift() } else { 0.0 };
    n * params.omega_r - params.kerr_shift() * n * n - aux + n_m as f64 * params.omega_m
}

/// Level table for both directions, photons `0..=n_max`, phonons `0..=n_m_max`.
pub fn energy_levels(n_max: u32, n_m_max: u32, params: &SystemParams) -> Result<Vec<EnergyLevel>> {
    params.validate()?;
    let mut out = Vec::with_capacity(2 * (n_max as usize + 1) * (n_m_max as usize + 1));
    for direction in ModeDirection::ALL {
        for n_photon in 0..=n_max {
            for n_phonon in 0..=n_m_max {
                out.push(EnergyLevel {
                    n_photon,
                    n_phonon,
                    direction,
                    energy: eigen_energy(n_photon, n_phonon, direction, params),
                });
            }
        }
    }
    Ok(out)
}

/// Auxiliary shift `2 g_d^2 E^2 / omega_m` for each pump amplitude.
pub fn aux_shift_curve(params: &SystemParams, amplitudes: &[f64]) -> Result<Vec<f64>> {
    params.validate()?;
    amplitudes
        .iter()
        .map(|&e| {
            if !(e >= 0.0) || !e.is_finite() {
                return Err(Error::Domain(format!("aux amplitude must be >= 0 (got {e})")));
            }
            Ok(SystemParams { aux_amplitude: e, ..params.clone() }.aux_shift())
        })
        .collect()
}

/// Thermal sideband weight
/// `A_n = e^{-eta^2(2N+1)} I_n(2 eta^2 sqrt(N(N+1))) ((N+1)/N)^{n/2}`.
///
/// Assembled in log space; below [`ZERO_TEMPERATURE_THRESHOLD`] the Poisson
/// limit `e^{-eta^2} eta^{2n}/n!` (zero for `n < 0`) is used.
pub fn sideband_weight(n: i64, eta: f64, n_thermal: f64) -> f64 {
    let x = eta * eta;
    if n_thermal < ZERO_TEMPERATURE_THRESHOLD {
        if n < 0 {
            return 0.0;
        }
        if n == 0 {
            return (-x).exp();
        }
        if x == 0.0 {
            return 0.0;
        }
        return (-x + n as f64 * x.ln() - log_factorial(n as u64)).exp();
    }
    let root = (n_thermal * (n_thermal + 1.0)).sqrt();
    let arg = 2.0 * x * root;
    // -eta^2(2N+1) + arg = -eta^2 (sqrt(N+1) - sqrt(N))^2
    let gap = (n_thermal + 1.0).sqrt() - n_thermal.sqrt();
    let ln_bessel = ln_bessel_i_scaled(n, arg).expect("argument is finite and non-negative");
    if ln_bessel == f64::NEG_INFINITY {
        return 0.0;
    }
    let ln_ratio = ((n_thermal + 1.0) / n_thermal).ln();
    (-x * gap * gap + ln_bessel + 0.5 * n as f64 * ln_ratio).exp()
}

/// Weights `A_{-n_max} ..= A_{n_max}`.
pub fn sideband_weights(eta: f64, n_thermal: f64, n_max: usize) -> Vec<f64> {
    let n_max = n_max as i64;
    (-n_max..=n_max).map(|n| sideband_weight(n, eta, n_thermal)).collect()
}

/// Relative mass carried by the outermost two orders on each side.
fn weight_tail(eta: f64, n_thermal: f64, n_max: usize) -> f64 {
    let weights = sideband_weights(eta, n_thermal, n_max);
    let total: f64 = weights.iter().sum();
    let outer = if n_max >= 2 { 2 } else { 1 };
    let len = weights.len();
    let tail: f64 = weights[..outer].iter().chain(&weights[len - outer..]).sum();
    tail / total
}

pub(crate) fn check_sideband_truncation(
    eta: f64,
    n_thermal: f64,
    trunc: &SeriesTruncation,
) -> Result<()> {
    let tail = weight_tail(eta, n_thermal, trunc.n_max);
    if tail <= trunc.tail_tol {
        return Ok(());
    }
    let suggested = (trunc.n_max + 1..=MAX_SUGGESTED_CUTOFF)
        .find(|&n| weight_tail(eta, n_thermal, n) <= trunc.tail_tol)
        .unwrap_or(MAX_SUGGESTED_CUTOFF);
    Err(Error::Truncation {
        what: "sideband",
        required: "n_max",
        suggested,
        tail,
        tol: trunc.tail_tol,
    })
}

/// Precomputed sideband weights for repeated evaluation of `S`.
#[derive(Debug, Clone)]
pub(crate) struct SidebandSeries {
    weights: Vec<f64>,
    n_max: i64,
    kappa: f64,
    gamma_m: f64,
    omega_m: f64,
}

impl SidebandSeries {
    pub(crate) fn new(params: &SystemParams, n_thermal: f64, trunc: &SeriesTruncation) -> Result<Self> {
        params.validate()?;
        trunc.validate()?;
        let eta = params.eta();
        check_sideband_truncation(eta, n_thermal, trunc)?;
        Ok(Self {
            weights: sideband_weights(eta, n_thermal, trunc.n_max),
            n_max: trunc.n_max as i64,
            kappa: params.kappa,
            gamma_m: params.gamma_m,
            omega_m: params.omega_m,
        })
    }

    /// `S` at effective detuning `delta_i`.
    pub(crate) fn eval(&self, delta_i: f64) -> f64 {
        let mut s = 0.0;
        for (idx, &a) in self.weights.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let n = idx as i64 - self.n_max;
            let kn = self.kappa + 0.5 * n.unsigned_abs() as f64 * self.gamma_m;
            let det = delta_i - n as f64 * self.omega_m;
            s += a * kn / (kn * kn + det * det);
        }
        self.kappa * s
    }
}

/// Sampled excitation spectrum for one direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCurve {
    pub detuning_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub direction: ModeDirection,
    pub truncation: SeriesTruncation,
    pub provenance: Provenance,
}

impl SpectrumCurve {
    pub const CSV_HEADER: &'static str = "delta,S,direction,provenance";

    pub fn len(&self) -> usize {
        self.detuning_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detuning_grid.is_empty()
    }

    /// Rows without the header.
    pub fn write_csv_rows<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (d, s) in self.detuning_grid.iter().zip(&self.values) {
            writeln!(w, "{d:?},{s:?},{},{}", self.direction, self.provenance)?;
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        self.write_csv_rows(w)
    }

    /// Grid points that are strict local maxima of the sampled values.
    pub fn local_maxima(&self) -> Vec<(f64, f64)> {
        local_maxima(&self.detuning_grid, &self.values)
    }
}

pub(crate) fn local_maxima(grid: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    values
        .windows(3)
        .enumerate()
        .filter(|(_, w)| w[1] > w[0] && w[1] > w[2])
        .map(|(i, w)| (grid[i + 1], w[1]))
        .collect()
}

/// Several curves into one CSV table with a single header.
pub fn write_spectrum_csv<W: Write>(curves: &[SpectrumCurve], mut w: W) -> io::Result<()> {
    writeln!(w, "{}", SpectrumCurve::CSV_HEADER)?;
    for c in curves {
        c.write_csv_rows(&mut w)?;
    }
    Ok(())
}

/// `S` at a single laser detuning.
pub fn spectrum_at(
    delta: f64,
    direction: ModeDirection,
    params: &SystemParams,
    trunc: &SeriesTruncation,
) -> Result<f64> {
    let series = SidebandSeries::new(params, params.n_thermal, trunc)?;
    Ok(series.eval(detuning_unchecked(params, direction, delta)))
}

/// Excitation spectrum over `grid` (laser detunings, strictly increasing).
pub fn excitation_spectrum(
    grid: &[f64],
    direction: ModeDirection,
    params: &SystemParams,
    trunc: &SeriesTruncation,
) -> Result<SpectrumCurve> {
    if grid.is_empty() {
        return Err(Error::Domain("spectrum grid is empty".into()));
    }
    check_increasing(grid)?;
    let series = SidebandSeries::new(params, params.n_thermal, trunc)?;
    let values = grid
        .par_iter()
        .map(|&d| series.eval(detuning_unchecked(params, direction, d)))
        .collect();
    Ok(SpectrumCurve {
        detuning_grid: grid.to_vec(),
        values,
        direction,
        truncation: *trunc,
        provenance: Provenance::Analytic,
    })
}
