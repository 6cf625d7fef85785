use std::collections::HashMap;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{c64, Mat, Scale, Side};

use super::model::{build_hamiltonian, FockModel};
use crate::error::{Error, Result};
use crate::params::{ModeDirection, SystemParams};

/// Liouvillian dimension up to which a dense LU is used.
const DENSE_LIMIT: usize = 1024;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-9;
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Stationary density matrix with its diagnostics.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: Mat<c64>,
    /// Frobenius norm of the Liouvillian applied to `rho`.
    pub residual: f64,
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
    pub cavity_dim: usize,
    pub mech_dim: usize,
    pub aux_dim: usize,
}

impl SteadyState {
    /// Wraps an arbitrary density matrix; `residual` is left at zero.
    pub fn from_density_matrix(
        rho: Mat<c64>,
        cavity_dim: usize,
        mech_dim: usize,
        aux_dim: usize,
    ) -> Result<Self> {
        let d = cavity_dim * mech_dim * aux_dim;
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::Domain(format!(
                "density matrix is {}x{}, expected {d}x{d}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let hermiticity_error = hermiticity_error(&rho);
        let rho = hermitian_part(&rho);
        let trace: f64 = (0..d).map(|i| rho[(i, i)].re).sum();
        let min_eigenvalue = min_eigenvalue(&rho)?;
        Ok(Self {
            rho,
            residual: 0.0,
            trace_error: (trace - 1.0).abs(),
            hermiticity_error,
            min_eigenvalue,
            cavity_dim,
            mech_dim,
            aux_dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    fn photon(&self, i: usize) -> usize {
        i / (self.mech_dim * self.aux_dim)
    }

    /// Populations of the photon-number levels.
    pub fn photon_distribution(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.cavity_dim];
        for i in 0..self.dim() {
            p[self.photon(i)] += self.rho[(i, i)].re;
        }
        p
    }

    /// Populations of the phonon-number levels.
    pub fn phonon_distribution(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.mech_dim];
        for i in 0..self.dim() {
            p[(i / self.aux_dim) % self.mech_dim] += self.rho[(i, i)].re;
        }
        p
    }

    pub fn photon_number(&self) -> f64 {
        self.photon_distribution().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// `<a'a'aa>`
    pub fn two_photon_moment(&self) -> f64 {
        self.photon_distribution()
            .iter()
            .enumerate()
            .map(|(n, p)| (n * n.saturating_sub(1)) as f64 * p)
            .sum()
    }
}

/// `(<a'a>, <a'a'aa>/<a'a>^2)`.
pub fn observables(state: &SteadyState) -> Result<(f64, f64)> {
    let n = state.photon_number();
    if n < 1e-30 {
        return Err(Error::UndefinedG2(n));
    }
    Ok((n, state.two_photon_moment() / (n * n)))
}

fn hermiticity_error(rho: &Mat<c64>) -> f64 {
    let d = rho.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..d {
        for i in 0..=j {
            worst = worst.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
        }
    }
    worst
}

fn hermitian_part(rho: &Mat<c64>) -> Mat<c64> {
    Mat::from_fn(rho.nrows(), rho.ncols(), |i, j| (rho[(i, j)] + rho[(j, i)].conj()) * 0.5)
}

fn min_eigenvalue(rho: &Mat<c64>) -> Result<f64> {
    let ev = rho
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigenvalue solver failed: {e:?}")))?;
    Ok(ev.first().copied().unwrap_or(0.0))
}

fn frobenius(m: &Mat<c64>) -> f64 {
    m.col_iter().flat_map(|c| c.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>()).sum::<f64>().sqrt()
}

/// Pieces of `L rho = K rho + rho K' + sum_c r_c C rho C'`.
struct Generator {
    k: Mat<c64>,
    jumps: Vec<(f64, Mat<c64>)>,
}

impl Generator {
    fn new(model: &FockModel, params: &SystemParams, direction: ModeDirection, delta: f64) -> Result<Self> {
        let h = build_hamiltonian(model, params, direction, delta)?;
        let ops = model.ops();
        let d = h.nrows();
        let mut k = Mat::from_fn(d, d, |i, j| h[(i, j)] * c64::new(0.0, -1.0));
        let mut jumps = Vec::new();
        for ch in model.collapse_channels(params) {
            let c = ops.jump(ch.kind);
            let cdc = c.adjoint() * &c;
            k -= Scale(c64::new(0.5 * ch.rate, 0.0)) * cdc;
            jumps.push((ch.rate, c));
        }
        if jumps.is_empty() {
            return Err(Error::Numerical("no dissipative channel: steady state is not unique".into()));
        }
        Ok(Self { k, jumps })
    }

    fn apply(&self, rho: &Mat<c64>) -> Mat<c64> {
        let mut out = &self.k * rho + rho * self.k.adjoint();
        for (r, c) in &self.jumps {
            out += Scale(c64::new(*r, 0.0)) * (c * rho * c.adjoint());
        }
        out
    }

    /// Column-stacked entries `(row, col, value)` of the scaled system with the
    /// `rho_00` equation replaced by the trace constraint.
    fn scaled_entries(&self, scale: &[f64]) -> Vec<(usize, usize, c64)> {
        let d = self.k.nrows();
        let idx = |i: usize, j: usize| i + j * d;
        let mut acc: HashMap<(usize, usize), c64> = HashMap::new();
        let mut add = |r: usize, c: usize, v: c64| {
            if r != 0 && v != c64::new(0.0, 0.0) {
                *acc.entry((r, c)).or_insert(c64::new(0.0, 0.0)) += v;
            }
        };
        let nz = |m: &Mat<c64>| {
            let mut out = Vec::new();
            for j in 0..m.ncols() {
                for i in 0..m.nrows() {
                    let v = m[(i, j)];
                    if v != c64::new(0.0, 0.0) {
                        out.push((i, j, v));
                    }
                }
            }
            out
        };
        let k_nz = nz(&self.k);
        for &(i, k, v) in &k_nz {
            for j in 0..d {
                // (K rho)_{ij} += K_ik rho_kj
                add(idx(i, j), idx(k, j), v);
                // (rho K')_{ji} += rho_jk conj(K_ik)
                add(idx(j, i), idx(j, k), v.conj());
            }
        }
        for (r, c) in &self.jumps {
            let c_nz = nz(c);
            for &(i, k, v) in &c_nz {
                for &(j, l, w) in &c_nz {
                    add(idx(i, j), idx(k, l), v * w.conj() * *r);
                }
            }
        }
        let s = |i: usize, j: usize| scale[i] * scale[j];
        let mut out: Vec<(usize, usize, c64)> = acc
            .into_iter()
            .map(|((r, c), v)| {
                let (ri, rj) = (r % d, r / d);
                let (ci, cj) = (c % d, c / d);
                (r, c, v * (s(ci, cj) / s(ri, rj)))
            })
            .collect();
        for i in 0..d {
            out.push((0, idx(i, i), c64::new(s(i, i), 0.0)));
        }
        out.sort_by_key(|&(r, c, _)| (c, r));
        out
    }
}

/// Per-basis-state scale `sigma^n` with `sigma = drive/kappa` (capped at 1).
fn scales(model: &FockModel, params: &SystemParams) -> Vec<f64> {
    let ratio = params.drive_amplitude / params.kappa;
    let sigma = if ratio > 0.0 && ratio < 1.0 { ratio } else { 1.0 };
    let block = model.mech_dim * model.aux_dim();
    (0..model.hilbert_dim()).map(|i| sigma.powi((i / block) as i32)).collect()
}

fn solve_system(n: usize, entries: &[(usize, usize, c64)]) -> Result<(Vec<c64>, f64)> {
    let mut rhs = Mat::<c64>::zeros(n, 1);
    rhs[(0, 0)] = c64::new(1.0, 0.0);
    let a_norm1 = {
        let mut cols = vec![0.0; n];
        for &(_, c, v) in entries {
            cols[c] += v.norm();
        }
        cols.into_iter().fold(0.0, f64::max)
    };
    let x = if n <= DENSE_LIMIT {
        let mut a = Mat::<c64>::zeros(n, n);
        for &(r, c, v) in entries {
            a[(r, c)] += v;
        }
        a.partial_piv_lu().solve(&rhs)
    } else {
        let triplets: Vec<_> = entries.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
        let a = SparseColMat::<usize, c64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::Numerical(format!("sparse assembly failed: {e:?}")))?;
        let lu = a
            .sp_lu()
            .map_err(|e| Error::Numerical(format!("sparse LU failed (singular Liouvillian?): {e:?}")))?;
        lu.solve(&rhs)
    };
    let x: Vec<c64> = (0..n).map(|i| x[(i, 0)]).collect();
    let x_norm1: f64 = x.iter().map(|z| z.norm()).sum();
    // ||A|| ||x|| / ||b|| bounds the condition number from below
    Ok((x, a_norm1 * x_norm1))
}

/// Stationary state of the Lindblad equation for one direction and detuning.
pub fn steady_state(
    model: &FockModel,
    params: &SystemParams,
    direction: ModeDirection,
    delta: f64,
) -> Result<SteadyState> {
    let gen = Generator::new(model, params, direction, delta)?;
    let d = model.hilbert_dim();
    let scale = scales(model, params);
    let entries = gen.scaled_entries(&scale);
    let (x, cond) = solve_system(d * d, &entries)?;
    let rho = Mat::from_fn(d, d, |i, j| x[i + j * d] * (scale[i] * scale[j]));
    if rho.col_iter().any(|c| c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
        return Err(Error::Numerical(format!(
            "singular Liouvillian: non-finite steady state (condition estimate {cond:.3e})"
        )));
    }
    let residual = frobenius(&gen.apply(&rho));
    let mut state = SteadyState::from_density_matrix(rho, model.cavity_dim, model.mech_dim, model.aux_dim())?;
    state.residual = residual;
    let checks = [
        (state.hermiticity_error > HERMITICITY_TOL, "hermiticity", state.hermiticity_error),
        (state.trace_error > TRACE_TOL, "trace", state.trace_error),
        (state.min_eigenvalue < -POSITIVITY_TOL, "positivity", state.min_eigenvalue),
        (residual > RESIDUAL_TOL, "stationarity residual", residual),
    ];
    if let Some((_, what, value)) = checks.iter().find(|c| c.0) {
        return Err(Error::Numerical(format!(
            "steady state failed the {what} check ({value:.3e}); condition estimate {cond:.3e}"
        )));
    }
    Ok(state)
}
