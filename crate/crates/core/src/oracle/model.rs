use faer::{c64, Mat, Scale};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ModeDirection, SystemParams};

/// Default cap on the total Hilbert dimension.
pub const DEFAULT_DIM_CAP: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    /// Mechanics eliminated: photon-number anharmonicity only.
    KerrReduced,
    /// Cavity plus mechanical oscillator with dispersive coupling.
    FullOptomechanical,
}

/// Optional quantum auxiliary mode replacing the static cross-Kerr shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxMode {
    pub dim: usize,
    /// Amplitude decay rate of the auxiliary mode.
    pub decay: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    CavityDecay,
    MechanicalDecay,
    MechanicalHeating,
    AuxDecay,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseChannel {
    pub kind: ChannelKind,
    pub rate: f64,
}

/// Truncated Fock-space model. Basis index is
/// `(photon * mech_dim + phonon) * aux_dim + aux`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockModel {
    pub kind: HamiltonianKind,
    pub cavity_dim: usize,
    pub mech_dim: usize,
    pub aux: Option<AuxMode>,
    pub dim_cap: usize,
}

impl FockModel {
    pub fn kerr(cavity_dim: usize) -> Self {
        Self {
            kind: HamiltonianKind::KerrReduced,
            cavity_dim,
            mech_dim: 1,
            aux: None,
            dim_cap: DEFAULT_DIM_CAP,
        }
    }

    pub fn full(cavity_dim: usize, mech_dim: usize) -> Self {
        Self {
            kind: HamiltonianKind::FullOptomechanical,
            cavity_dim,
            mech_dim,
            aux: None,
            dim_cap: DEFAULT_DIM_CAP,
        }
    }

    pub fn with_aux(mut self, dim: usize, decay: f64) -> Self {
        self.aux = Some(AuxMode { dim, decay });
        self
    }

    pub fn with_dim_cap(mut self, cap: usize) -> Self {
        self.dim_cap = cap;
        self
    }

    pub fn aux_dim(&self) -> usize {
        self.aux.map_or(1, |a| a.dim)
    }

    pub fn hilbert_dim(&self) -> usize {
        self.cavity_dim * self.mech_dim * self.aux_dim()
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.cavity_dim < 2 {
            bad.push(format!("cavity_dim must be >= 2 (got {})", self.cavity_dim));
        }
        if self.mech_dim < 1 {
            bad.push("mech_dim must be >= 1".to_string());
        }
        if self.kind == HamiltonianKind::KerrReduced && self.mech_dim != 1 {
            bad.push(format!("kerr_reduced needs mech_dim = 1 (got {})", self.mech_dim));
        }
        if let Some(aux) = self.aux {
            if aux.dim < 2 {
                bad.push(format!("aux dim must be >= 2 (got {})", aux.dim));
            }
            if !(aux.decay > 0.0) || !aux.decay.is_finite() {
                bad.push(format!("aux decay must be > 0 (got {})", aux.decay));
            }
        }
        if !bad.is_empty() {
            return Err(Error::InvalidParams(bad));
        }
        let dim = self.hilbert_dim();
        if dim > self.dim_cap {
            return Err(Error::Resource(format!(
                "Hilbert dimension {dim} exceeds the cap of {}",
                self.dim_cap
            )));
        }
        Ok(())
    }

    /// Channels with positive rate, cavity first.
    pub fn collapse_channels(&self, params: &SystemParams) -> Vec<CollapseChannel> {
        let mut out = vec![CollapseChannel { kind: ChannelKind::CavityDecay, rate: 2.0 * params.kappa }];
        if self.mech_dim > 1 {
            out.push(CollapseChannel {
                kind: ChannelKind::MechanicalDecay,
                rate: params.gamma_m * (params.n_thermal + 1.0),
            });
            out.push(CollapseChannel {
                kind: ChannelKind::MechanicalHeating,
                rate: params.gamma_m * params.n_thermal,
            });
        }
        if let Some(aux) = self.aux {
            out.push(CollapseChannel { kind: ChannelKind::AuxDecay, rate: 2.0 * aux.decay });
        }
        out.retain(|c| c.rate > 0.0);
        out
    }

    pub(crate) fn ops(&self) -> Operators {
        Operators::new(self.cavity_dim, self.mech_dim, self.aux_dim())
    }
}

/// Ladder operators embedded in the composite space.
pub(crate) struct Operators {
    pub a: Mat<c64>,
    pub c: Mat<c64>,
    pub b: Mat<c64>,
}

fn lowering(n: usize) -> Mat<c64> {
    Mat::from_fn(n, n, |i, j| {
        if j == i + 1 {
            c64::new((j as f64).sqrt(), 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

fn identity(n: usize) -> Mat<c64> {
    Mat::from_fn(n, n, |i, j| c64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
}

fn kron(x: &Mat<c64>, y: &Mat<c64>) -> Mat<c64> {
    let (p, q) = (y.nrows(), y.ncols());
    Mat::from_fn(x.nrows() * p, x.ncols() * q, |i, j| x[(i / p, j / q)] * y[(i % p, j % q)])
}

impl Operators {
    fn new(nc: usize, nm: usize, nb: usize) -> Self {
        let (ic, im, ib) = (identity(nc), identity(nm), identity(nb));
        Self {
            a: kron(&kron(&lowering(nc), &im), &ib),
            c: kron(&kron(&ic, &lowering(nm)), &ib),
            b: kron(&kron(&ic, &im), &lowering(nb)),
        }
    }

    pub fn jump(&self, kind: ChannelKind) -> Mat<c64> {
        match kind {
            ChannelKind::CavityDecay => self.a.clone(),
            ChannelKind::MechanicalDecay => self.c.clone(),
            ChannelKind::MechanicalHeating => self.c.adjoint().to_owned(),
            ChannelKind::AuxDecay => self.b.clone(),
        }
    }
}

/// Hamiltonian in the drive frame, parameterized by the mode's effective
/// detuning `delta_i` (see [`crate::params::effective_detuning`]).
///
/// * kerr_reduced: `E(n) = -delta_i n - (g_s^2/omega_m) n(n-1)` on the diagonal
/// * full: `-(delta_i - g_s^2/omega_m) a'a + omega_m c'c + g_s a'a (c + c')`
///
/// Both get `drive (a + a')`. With an auxiliary mode the static shift of the
/// pumped direction is replaced by `chi b'b a'a + F (b + b')`, where
/// `chi = 2 g_d^2 / omega_m` and `F = aux_amplitude * decay`.
pub fn build_hamiltonian(
    model: &FockModel,
    params: &SystemParams,
    direction: ModeDirection,
    delta: f64,
) -> Result<Mat<c64>> {
    params.validate()?;
    model.validate()?;
    let ops = model.ops();
    let d = model.hilbert_dim();
    let block = model.mech_dim * model.aux_dim();
    let kerr = params.kerr_shift();
    let pumped = direction == params.pumped_direction;
    let static_shift = if pumped && model.aux.is_none() { params.aux_shift() } else { 0.0 };
    let delta_i = delta - kerr - static_shift;

    let re = |x: f64| c64::new(x, 0.0);
    let mut h = Mat::<c64>::zeros(d, d);
    for i in 0..d {
        let n = (i / block) as f64;
        h[(i, i)] = match model.kind {
            HamiltonianKind::KerrReduced => re(-delta_i * n - kerr * n * (n - 1.0)),
            HamiltonianKind::FullOptomechanical => re(-(delta_i - kerr) * n),
        };
    }
    if model.kind == HamiltonianKind::FullOptomechanical && model.mech_dim > 1 {
        let c = &ops.c;
        let cd = c.adjoint().to_owned();
        let num = &ops.a.adjoint() * &ops.a;
        let x = c + &cd;
        h += Scale(re(params.omega_m)) * (&cd * c);
        h += Scale(re(params.g_s)) * (&num * &x);
    }
    if params.drive_amplitude != 0.0 {
        h += Scale(re(params.drive_amplitude)) * (&ops.a + ops.a.adjoint());
    }
    if let Some(aux) = model.aux {
        let bd = ops.b.adjoint().to_owned();
        if pumped {
            let chi = 2.0 * params.g_d * params.g_d / params.omega_m;
            let num = &ops.a.adjoint() * &ops.a;
            h += Scale(re(chi)) * (&(&bd * &ops.b) * &num);
        }
        let f = params.aux_amplitude * aux.decay;
        if f != 0.0 {
            h += Scale(re(f)) * (&ops.b + &bd);
        }
    }
    Ok(h)
}
