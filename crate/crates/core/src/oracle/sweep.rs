use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::FockModel;
use super::solve::{observables, steady_state, SteadyState};
use crate::correlation::CorrelationCurve;
use crate::curve::{check_increasing, Provenance};
use crate::error::{Error, Result};
use crate::params::{ModeDirection, SystemParams};
use crate::spectrum::{SeriesTruncation, SpectrumCurve};

/// Oracle results for one direction over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSweep {
    /// Photon number divided by the bare-cavity resonant value.
    pub spectrum: SpectrumCurve,
    pub photon_number: Vec<f64>,
    pub g2: Vec<f64>,
    /// Largest population found in the top photon and phonon levels.
    pub edge_population: (f64, f64),
}

/// `<a'a>` of the bare cavity on resonance with the same drive and cavity cutoff.
pub fn reference_photon_number(model: &FockModel, params: &SystemParams) -> Result<f64> {
    let bare = SystemParams { g_s: 0.0, g_d: 0.0, aux_amplitude: 0.0, ..params.clone() };
    let state = steady_state(&FockModel::kerr(model.cavity_dim), &bare, ModeDirection::Cw, 0.0)?;
    Ok(state.photon_number())
}

fn edge(state: &SteadyState) -> (f64, f64) {
    let photons = state.photon_distribution();
    let phonons = state.phonon_distribution();
    let top_m = if phonons.len() > 1 { *phonons.last().unwrap() } else { 0.0 };
    (*photons.last().unwrap(), top_m)
}

/// Steady states over `grid` for one direction.
pub fn oracle_sweep(
    grid: &[f64],
    model: &FockModel,
    params: &SystemParams,
    direction: ModeDirection,
) -> Result<OracleSweep> {
    check_increasing(grid)?;
    model.validate()?;
    let reference = reference_photon_number(model, params)?;
    if !(reference > 0.0) {
        return Err(Error::Domain("oracle sweep needs a non-zero drive amplitude".into()));
    }
    let points = grid
        .par_iter()
        .map(|&d| {
            let state = steady_state(model, params, direction, d)?;
            let (n, g) = observables(&state)?;
            Ok((n, g, edge(&state)))
        })
        .collect::<Result<Vec<_>>>()?;
    let photon_number: Vec<f64> = points.iter().map(|p| p.0).collect();
    let g2 = points.iter().map(|p| p.1).collect();
    let edge_population = points
        .iter()
        .fold((0.0f64, 0.0f64), |acc, p| (acc.0.max(p.2 .0), acc.1.max(p.2 .1)));
    Ok(OracleSweep {
        spectrum: SpectrumCurve {
            detuning_grid: grid.to_vec(),
            values: photon_number.iter().map(|n| n / reference).collect(),
            direction,
            truncation: SeriesTruncation::default(),
            provenance: Provenance::Oracle,
        },
        photon_number,
        g2,
        edge_population,
    })
}

/// Oracle `g2` in both directions and the resulting nonreciprocity.
pub fn oracle_correlation_curve(
    grid: &[f64],
    model: &FockModel,
    params: &SystemParams,
) -> Result<CorrelationCurve> {
    let cw = oracle_sweep(grid, model, params, ModeDirection::Cw)?;
    let ccw = oracle_sweep(grid, model, params, ModeDirection::Ccw)?;
    CorrelationCurve::from_g2(
        grid.to_vec(),
        cw.g2,
        ccw.g2,
        SeriesTruncation::default(),
        Provenance::Oracle,
    )
}

/// Analytic vs oracle agreement for one quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema: u32,
    pub quantity: String,
    pub points: usize,
    pub max_rel_deviation: f64,
    pub mean_rel_deviation: f64,
    pub worst_delta: f64,
    pub analytic_at_worst: f64,
    pub oracle_at_worst: f64,
    pub threshold: f64,
    pub pass: bool,
    pub diagnostics: Vec<String>,
}

impl ComparisonReport {
    pub fn new(
        quantity: &str,
        grid: &[f64],
        analytic: &[f64],
        oracle: &[f64],
        threshold: f64,
    ) -> Result<Self> {
        if analytic.len() != grid.len() || oracle.len() != grid.len() {
            return Err(Error::Domain("comparison columns do not match the grid".into()));
        }
        if grid.is_empty() {
            return Err(Error::Domain("comparison needs at least one point".into()));
        }
        let rel: Vec<f64> = analytic
            .iter()
            .zip(oracle)
            .map(|(&a, &o)| {
                let scale = a.abs().max(o.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (a - o).abs() / scale
                }
            })
            .collect();
        let (worst, max) = rel
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, r)| if r > acc.1 || r.is_nan() { (i, r) } else { acc });
        let mean = rel.iter().sum::<f64>() / rel.len() as f64;
        Ok(Self {
            schema: 1,
            quantity: quantity.to_string(),
            points: grid.len(),
            max_rel_deviation: max,
            mean_rel_deviation: mean,
            worst_delta: grid[worst],
            analytic_at_worst: analytic[worst],
            oracle_at_worst: oracle[worst],
            threshold,
            pass: max <= threshold,
            diagnostics: Vec::new(),
        })
    }

    pub fn with_diagnostics(mut self, diagnostics: Vec<String>) -> Self {
        self.diagnostics = diagnostics;
        self
    }
}

/// Notes on truncation that explain an oracle mismatch.
pub fn truncation_diagnostics(model: &FockModel, sweep: &OracleSweep) -> Vec<String> {
    let mut out = Vec::new();
    if model.cavity_dim < 3 {
        out.push(format!(
            "cavity_dim = {} cannot hold two photons; oracle g2 is identically 0, raise cavity_dim",
            model.cavity_dim
        ));
    }
    let (photon_edge, phonon_edge) = sweep.edge_population;
    let max_n = sweep.photon_number.iter().copied().fold(0.0, f64::max);
    if model.cavity_dim >= 3 && photon_edge > 1e-6 * max_n.max(1e-300) {
        out.push(format!(
            "top photon level holds population {photon_edge:.3e}; raise cavity_dim"
        ));
    }
    if phonon_edge > 1e-6 * max_n.max(1e-300) {
        out.push(format!(
            "top phonon level holds population {phonon_edge:.3e}; raise mech_dim"
        ));
    }
    out
}
