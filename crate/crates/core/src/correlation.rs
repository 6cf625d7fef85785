//! Equal-time second-order correlation and the CW/CCW nonreciprocity metric.
//!
//! The weak-drive triple sum over `(n, m, p)` factorizes per `p`:
//!
//! ```text
//! g2 = sum_p c_p |F_p|^2 Re[2 kappa^3 / (2 kappa - i X_p)] / S^2
//! F_p = sum_n L_n^{(p-n)}(eta^2) / (kappa + i(delta_i - n omega_m))
//! c_p = e^{-2 eta^2} eta^{2p} / p!,   X_p = 2 delta_i + 2 delta_g - p omega_m
//! ```
//!
//! Every slice is non-negative, so the result needs no clamping. Only the
//! zero-temperature coefficients are implemented; `n_thermal` is ignored here.

use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{check_increasing, Provenance};
use crate::error::{Error, Result};
use crate::params::{detuning_unchecked, ModeDirection, SystemParams};
use crate::specfun::{laguerre_shifted, log_factorial};
use crate::spectrum::{check_sideband_truncation, SeriesTruncation, SidebandSeries};

const MAX_SUGGESTED_P: usize = 10_000;

/// `B_{n,m,p} = e^{-2 eta^2} eta^{2p} W_{n,p} W_{m,p} / (n! m! p!)`.
pub fn b_coefficient(n: u64, m: u64, p: u64, eta: f64) -> f64 {
    let x = eta * eta;
    let ln_c = if p == 0 {
        -2.0 * x
    } else if x == 0.0 {
        return 0.0;
    } else {
        -2.0 * x + p as f64 * x.ln() - log_factorial(p)
    };
    // W_{n,p}/n! = L_n^{(p-n)}
    ln_c.exp() * (laguerre_shifted(n, p, x) * laguerre_shifted(m, p, x))
}

/// Delta-independent pieces of the factorized sum.
#[derive(Debug, Clone)]
struct G2Series {
    x: f64,
    kappa: f64,
    omega_m: f64,
    delta_g: f64,
    n_max: usize,
    tail_tol: f64,
    /// `c_p` for `p = 0..=p_max`
    weights: Vec<f64>,
    /// `L_n^{(p-n)}(x)`, row `p`, column `n`
    laguerre: Vec<Vec<f64>>,
    spectrum: SidebandSeries,
}

impl G2Series {
    fn new(params: &SystemParams, trunc: &SeriesTruncation) -> Result<Self> {
        params.validate()?;
        trunc.validate()?;
        let eta = params.eta();
        check_sideband_truncation(eta, 0.0, trunc)?;
        let x = eta * eta;
        let mut series = Self {
            x,
            kappa: params.kappa,
            omega_m: params.omega_m,
            delta_g: params.kerr_shift(),
            n_max: trunc.n_max,
            tail_tol: trunc.tail_tol,
            weights: Vec::new(),
            laguerre: Vec::new(),
            spectrum: SidebandSeries::new(params, 0.0, trunc)?,
        };
        series.extend_to(trunc.p_max);
        Ok(series)
    }

    fn p_max(&self) -> usize {
        self.weights.len() - 1
    }

    fn extend_to(&mut self, p_max: usize) {
        for p in self.weights.len()..=p_max {
            let c = if p == 0 {
                (-2.0 * self.x).exp()
            } else if self.x == 0.0 {
                0.0
            } else {
                (-2.0 * self.x + p as f64 * self.x.ln() - log_factorial(p as u64)).exp()
            };
            self.weights.push(c);
            self.laguerre.push(
                (0..=self.n_max as u64).map(|n| laguerre_shifted(n, p as u64, self.x)).collect(),
            );
        }
    }

    /// Contribution of slice `p` at effective detuning `delta_i`.
    fn slice(&self, p: usize, delta_i: f64, terms: &mut Vec<Complex64>) -> f64 {
        let c = self.weights[p];
        if c == 0.0 {
            return 0.0;
        }
        let k = self.kappa;
        terms.clear();
        terms.extend(self.laguerre[p].iter().enumerate().map(|(n, &l)| {
            Complex64::new(l, 0.0) / Complex64::new(k, delta_i - n as f64 * self.omega_m)
        }));
        terms.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        let f: Complex64 = terms.iter().sum();
        let xp = 2.0 * delta_i + 2.0 * self.delta_g - p as f64 * self.omega_m;
        // Re[2k^3 / (2k - i X)] = 4k^4 / (4k^2 + X^2)
        let prop = 4.0 * k.powi(4) / (4.0 * k * k + xp * xp);
        c * f.norm_sqr() * prop
    }

    fn slices(&self, delta_i: f64) -> Vec<f64> {
        let mut terms = Vec::with_capacity(self.n_max + 1);
        (0..=self.p_max()).map(|p| self.slice(p, delta_i, &mut terms)).collect()
    }

    fn tail(slices: &[f64]) -> f64 {
        let total: f64 = slices.iter().sum();
        if total == 0.0 {
            return 0.0;
        }
        let k = slices.len().min(2);
        slices[slices.len() - k..].iter().sum::<f64>() / total
    }

    fn eval(&self, delta_i: f64) -> Result<f64> {
        let slices = self.slices(delta_i);
        let tail = Self::tail(&slices);
        if tail > self.tail_tol {
            return Err(self.p_truncation_error(delta_i, tail));
        }
        let s = self.spectrum.eval(delta_i);
        Ok(slices.iter().sum::<f64>() / (s * s))
    }

    fn p_truncation_error(&self, delta_i: f64, tail: f64) -> Error {
        let mut wider = self.clone();
        let mut suggested = MAX_SUGGESTED_P;
        let mut p = self.p_max() + 1;
        while p <= MAX_SUGGESTED_P {
            wider.extend_to(p);
            if Self::tail(&wider.slices(delta_i)) <= self.tail_tol {
                suggested = p;
                break;
            }
            p += 1 + p / 8;
        }
        Error::Truncation { what: "two-photon", required: "p_max", suggested, tail, tol: self.tail_tol }
    }
}

/// Equal-time `g2(0)` of mode `direction` at laser detuning `delta`.
pub fn g2(
    delta: f64,
    direction: ModeDirection,
    params: &SystemParams,
    trunc: &SeriesTruncation,
) -> Result<f64> {
    let series = G2Series::new(params, trunc)?;
    series.eval(detuning_unchecked(params, direction, delta))
}

/// `(log10 g_cw - log10 g_ccw)^2 / (|log10 g_cw| + |log10 g_ccw|)`, zero when equal.
pub fn nonreciprocity_from_g2(g2_cw: f64, g2_ccw: f64) -> Result<f64> {
    for (name, g) in [("cw", g2_cw), ("ccw", g2_ccw)] {
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::Domain(format!("g2_{name} must be positive and finite (got {g})")));
        }
    }
    if g2_cw == g2_ccw {
        return Ok(0.0);
    }
    let (a, b) = (g2_cw.log10(), g2_ccw.log10());
    let den = a.abs() + b.abs();
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok((a - b).powi(2) / den)
}

pub fn nonreciprocity(delta: f64, params: &SystemParams, trunc: &SeriesTruncation) -> Result<f64> {
    let series = G2Series::new(params, trunc)?;
    let cw = series.eval(detuning_unchecked(params, ModeDirection::Cw, delta))?;
    let ccw = series.eval(detuning_unchecked(params, ModeDirection::Ccw, delta))?;
    nonreciprocity_from_g2(cw, ccw)
}

/// Sampled `g2` for both directions and the nonreciprocity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCurve {
    pub detuning_grid: Vec<f64>,
    pub g2_cw: Vec<f64>,
    pub g2_ccw: Vec<f64>,
    pub nonreciprocity: Vec<f64>,
    pub truncation: SeriesTruncation,
    pub provenance: Provenance,
}

impl CorrelationCurve {
    pub const CSV_HEADER: &'static str = "delta,g2_cw,g2_ccw,R,provenance";

    /// Builds the nonreciprocity column from the two g2 columns.
    pub fn from_g2(
        detuning_grid: Vec<f64>,
        g2_cw: Vec<f64>,
        g2_ccw: Vec<f64>,
        truncation: SeriesTruncation,
        provenance: Provenance,
    ) -> Result<Self> {
        if g2_cw.len() != detuning_grid.len() || g2_ccw.len() != detuning_grid.len() {
            return Err(Error::Domain("g2 columns do not match the grid length".into()));
        }
        let nonreciprocity = g2_cw
            .iter()
            .zip(&g2_ccw)
            .map(|(&a, &b)| nonreciprocity_from_g2(a, b))
            .collect::<Result<_>>()?;
        Ok(Self { detuning_grid, g2_cw, g2_ccw, nonreciprocity, truncation, provenance })
    }

    pub fn len(&self) -> usize {
        self.detuning_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detuning_grid.is_empty()
    }

    pub fn g2(&self, direction: ModeDirection) -> &[f64] {
        match direction {
            ModeDirection::Cw => &self.g2_cw,
            ModeDirection::Ccw => &self.g2_ccw,
        }
    }

    pub fn write_csv_rows<W: Write>(&self, mut w: W) -> io::Result<()> {
        for i in 0..self.len() {
            writeln!(
                w,
                "{:?},{:?},{:?},{:?},{}",
                self.detuning_grid[i],
                self.g2_cw[i],
                self.g2_ccw[i],
                self.nonreciprocity[i],
                self.provenance
            )?;
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        self.write_csv_rows(w)
    }

    /// Grid points that are strict local maxima of the nonreciprocity.
    pub fn nonreciprocity_maxima(&self) -> Vec<(f64, f64)> {
        crate::spectrum::local_maxima(&self.detuning_grid, &self.nonreciprocity)
    }
}

/// `g2` in both directions and `R` over a strictly increasing grid.
pub fn correlation_curve(
    grid: &[f64],
    params: &SystemParams,
    trunc: &SeriesTruncation,
) -> Result<CorrelationCurve> {
    check_increasing(grid)?;
    let series = G2Series::new(params, trunc)?;
    let pairs = grid
        .par_iter()
        .map(|&d| {
            let cw = series.eval(detuning_unchecked(params, ModeDirection::Cw, d))?;
            let ccw = series.eval(detuning_unchecked(params, ModeDirection::Ccw, d))?;
            Ok((cw, ccw))
        })
        .collect::<Result<Vec<_>>>()?;
    let (g2_cw, g2_ccw) = pairs.into_iter().unzip();
    CorrelationCurve::from_g2(grid.to_vec(), g2_cw, g2_ccw, *trunc, Provenance::Analytic)
}
