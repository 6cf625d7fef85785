//! Flat `key=value` run configuration.
//!
//! Layers are merged in order (defaults, preset, config file, `--set`, flags);
//! later layers win. Keys that alias each other (`eta`/`g_s`,
//! `mechanical_q`/`gamma_m`, `temperature`/`n_thermal`, `shift`/`aux_amplitude`)
//! replace one another.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nrblockade::oracle::{FockModel, HamiltonianKind, DEFAULT_DIM_CAP};
use nrblockade::{thermal_occupation, DetuningGrid, ModeDirection, SeriesTruncation, SystemParams};

use crate::error::CliError;

pub const KEYS: &[&str] = &[
    "omega_r",
    "omega_m",
    "g_s",
    "eta",
    "g_d",
    "kappa",
    "gamma_m",
    "mechanical_q",
    "aux_amplitude",
    "shift",
    "drive_amplitude",
    "n_thermal",
    "temperature",
    "si_omega_m",
    "pumped_direction",
    "grid",
    "direction",
    "n_max",
    "p_max",
    "tail_tol",
    "cavity_dim",
    "mech_dim",
    "oracle_model",
    "oracle_gamma_m",
    "dim_cap",
    "spectrum_tol",
    "g2_tol",
    "photon_levels",
    "phonon_levels",
    "aux_grid",
    "g_d_values",
];

const ALIASES: &[(&str, &str)] = &[
    ("eta", "g_s"),
    ("mechanical_q", "gamma_m"),
    ("temperature", "n_thermal"),
    ("shift", "aux_amplitude"),
];

/// Keys holding a frequency, rescaled when `si_omega_m` is given.
const FREQUENCY_KEYS: &[&str] =
    &["omega_r", "g_s", "g_d", "kappa", "gamma_m", "drive_amplitude", "shift", "oracle_gamma_m"];

fn usage(e: nrblockade::Error) -> CliError {
    CliError::Usage(e.to_string())
}

pub const DEFAULT_GRID: &str = "-1:4:501";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionChoice {
    Cw,
    Ccw,
    Both,
}

impl DirectionChoice {
    pub fn directions(self) -> Vec<ModeDirection> {
        match self {
            DirectionChoice::Cw => vec![ModeDirection::Cw],
            DirectionChoice::Ccw => vec![ModeDirection::Ccw],
            DirectionChoice::Both => ModeDirection::ALL.to_vec(),
        }
    }
}

/// Merged raw settings.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Usage(format!("unknown config key '{key}'")));
        }
        for &(a, b) in ALIASES {
            if key == a {
                self.values.remove(b);
            } else if key == b {
                self.values.remove(a);
            }
        }
        self.values.insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Parses `key=value` lines; `#` starts a comment.
    pub fn merge_text(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("{origin}:{}: expected key=value, got '{line}'", lineno + 1))
            })?;
            self.set(k, v)
                .map_err(|e| CliError::Usage(format!("{origin}:{}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config file '{}': {e}", path.display()))
        })?;
        self.merge_text(&text, &path.display().to_string())
    }

    /// `key=value` from the command line.
    pub fn merge_assignment(&mut self, pair: &str) -> Result<(), CliError> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects key=value, got '{pair}'")))?;
        self.set(k, v)
    }

    fn number(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("{key}: '{v}' is not a number")))
            })
            .transpose()
    }

    fn count(&self, key: &str) -> Result<Option<usize>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| CliError::Usage(format!("{key}: '{v}' is not a non-negative integer")))
            })
            .transpose()
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| CliError::Usage(format!("{key}: '{t}' is not a number")))
                    })
                    .collect()
            })
            .transpose()
    }

    fn grid(&self, key: &str) -> Result<Option<DetuningGrid>, CliError> {
        self.get(key)
            .map(|v| v.parse::<DetuningGrid>().map_err(|e| CliError::Usage(format!("{key}: {e}"))))
            .transpose()
    }
}

/// Fully resolved run settings, in units of omega_m.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: SystemParams,
    pub grid: DetuningGrid,
    pub truncation: SeriesTruncation,
    /// Requested aux shifts; empty means "use `params` as given".
    pub shifts: Vec<f64>,
    pub direction: DirectionChoice,
    pub cavity_dim: Option<usize>,
    pub mech_dim: Option<usize>,
    pub oracle_model: Option<HamiltonianKind>,
    pub oracle_gamma_m: Option<f64>,
    pub dim_cap: usize,
    pub spectrum_tol: Option<f64>,
    pub g2_tol: Option<f64>,
    pub photon_levels: u32,
    pub phonon_levels: u32,
    pub aux_grid: DetuningGrid,
    pub g_d_values: Vec<f64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(raw: &RawConfig, out: Option<PathBuf>) -> Result<Self, CliError> {
        let si = raw.number("si_omega_m")?;
        if let Some(w) = si {
            if !(w > 0.0) {
                return Err(CliError::Usage(format!("si_omega_m must be > 0 (got {w})")));
            }
            if raw.get("omega_m").is_some() {
                return Err(CliError::Usage("omega_m and si_omega_m are mutually exclusive".into()));
            }
        }
        let freq = |key: &str| -> Result<Option<f64>, CliError> {
            let v = raw.number(key)?;
            Ok(match (v, si) {
                (Some(v), Some(w)) if FREQUENCY_KEYS.contains(&key) => Some(v / w),
                _ => v,
            })
        };

        let mut p = SystemParams::default();
        if let Some(v) = raw.number("omega_m")? {
            p.omega_m = v;
        }
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = freq(stringify!($field))? {
                    p.$field = v;
                }
            };
        }
        take!(omega_r);
        take!(g_s);
        take!(g_d);
        take!(kappa);
        take!(gamma_m);
        take!(drive_amplitude);
        if let Some(v) = raw.number("aux_amplitude")? {
            p.aux_amplitude = v;
        }
        if let Some(v) = raw.number("n_thermal")? {
            p.n_thermal = v;
        }
        if let Some(eta) = raw.number("eta")? {
            p = p.with_eta(eta);
        }
        if let Some(q) = raw.number("mechanical_q")? {
            if !(q > 0.0) {
                return Err(CliError::Usage(format!("mechanical_q must be > 0 (got {q})")));
            }
            p.gamma_m = p.omega_m / q;
        }
        if let Some(t) = raw.number("temperature")? {
            let w = si.ok_or_else(|| {
                CliError::Usage("temperature needs si_omega_m (mechanical frequency in rad/s)".into())
            })?;
            p.n_thermal = if t == 0.0 { 0.0 } else { thermal_occupation(t, w).map_err(usage)? };
        }
        if let Some(d) = raw.get("pumped_direction") {
            p.pumped_direction = d.parse().map_err(|e| CliError::Usage(format!("pumped_direction: {e}")))?;
        }

        let mut grid = raw.grid("grid")?.unwrap_or_else(|| DEFAULT_GRID.parse().expect("valid default grid"));
        if let Some(w) = si {
            if raw.get("grid").is_some() {
                grid = DetuningGrid::new(grid.start / w, grid.stop / w, grid.points).map_err(usage)?;
            }
        }

        let mut shifts = raw.list("shift")?.unwrap_or_default();
        if let Some(w) = si {
            shifts.iter_mut().for_each(|s| *s /= w);
        }
        if shifts.iter().any(|s| !(*s >= 0.0)) {
            return Err(CliError::Usage("shift values must be >= 0".into()));
        }

        let direction = match raw.get("direction").unwrap_or("both") {
            "cw" => DirectionChoice::Cw,
            "ccw" => DirectionChoice::Ccw,
            "both" => DirectionChoice::Both,
            other => return Err(CliError::Usage(format!("direction must be cw, ccw or both (got '{other}')"))),
        };

        let defaults = SeriesTruncation::default();
        let truncation = SeriesTruncation {
            n_max: raw.count("n_max")?.unwrap_or(defaults.n_max),
            p_max: raw.count("p_max")?.unwrap_or(defaults.p_max),
            tail_tol: raw.number("tail_tol")?.unwrap_or(defaults.tail_tol),
        };
        truncation.validate().map_err(usage)?;

        let oracle_model = match raw.get("oracle_model") {
            None => None,
            Some("kerr" | "kerr_reduced") => Some(HamiltonianKind::KerrReduced),
            Some("full" | "full_optomechanical") => Some(HamiltonianKind::FullOptomechanical),
            Some(other) => {
                return Err(CliError::Usage(format!("oracle_model must be kerr or full (got '{other}')")))
            }
        };

        let levels = |key: &str, default: u32| -> Result<u32, CliError> {
            match raw.count(key)? {
                None => Ok(default),
                Some(v) => u32::try_from(v).map_err(|_| CliError::Usage(format!("{key} is too large"))),
            }
        };

        let config = Self {
            params: p,
            grid,
            truncation,
            shifts,
            direction,
            cavity_dim: raw.count("cavity_dim")?,
            mech_dim: raw.count("mech_dim")?,
            oracle_model,
            oracle_gamma_m: freq("oracle_gamma_m")?,
            dim_cap: raw.count("dim_cap")?.unwrap_or(DEFAULT_DIM_CAP),
            spectrum_tol: raw.number("spectrum_tol")?,
            g2_tol: raw.number("g2_tol")?,
            photon_levels: levels("photon_levels", 3)?,
            phonon_levels: levels("phonon_levels", 3)?,
            aux_grid: raw.grid("aux_grid")?.unwrap_or_else(|| "0:2:201".parse().expect("valid default grid")),
            g_d_values: raw.list("g_d_values")?.unwrap_or_default(),
            out,
        };
        config.params.validate().map_err(usage)?;
        Ok(config)
    }

    /// Parameter sets to run: one per requested shift, or the base set.
    ///
    /// A shift with `g_d = 0` picks `g_d = omega_m` so the amplitude is finite.
    pub fn shifted_params(&self) -> Result<Vec<(Option<f64>, SystemParams)>, CliError> {
        if self.shifts.is_empty() {
            return Ok(vec![(None, self.params.clone())]);
        }
        self.shifts
            .iter()
            .map(|&s| {
                let mut p = self.params.clone();
                if s > 0.0 && p.g_d == 0.0 {
                    p.g_d = p.omega_m;
                }
                Ok((Some(s), p.with_aux_shift(s).map_err(usage)?))
            })
            .collect()
    }

    /// Oracle model for `verify`: Kerr at eta = 0, full model otherwise.
    /// The phonon cutoff grows with the polaron displacement.
    pub fn fock_model(&self, params: &SystemParams) -> FockModel {
        let eta = params.eta();
        let kind = self.oracle_model.unwrap_or(if eta == 0.0 {
            HamiltonianKind::KerrReduced
        } else {
            HamiltonianKind::FullOptomechanical
        });
        let model = match kind {
            HamiltonianKind::KerrReduced => FockModel::kerr(self.cavity_dim.unwrap_or(5)),
            HamiltonianKind::FullOptomechanical => {
                let mech = self.mech_dim.unwrap_or((16.0 + 20.0 * eta * eta).ceil() as usize);
                FockModel::full(self.cavity_dim.unwrap_or(3), mech)
            }
        };
        model.with_dim_cap(self.dim_cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str) -> Result<RunConfig, CliError> {
        let mut raw = RawConfig::default();
        raw.merge_text(text, "test")?;
        RunConfig::resolve(&raw, None)
    }

    #[test]
    fn defaults() {
        let c = resolve("").unwrap();
        assert_eq!(c.params, SystemParams::default());
        assert_eq!(c.grid.to_string(), DEFAULT_GRID);
        assert_eq!(c.direction, DirectionChoice::Both);
        assert!(c.shifts.is_empty());
    }

    #[test]
    fn later_layers_win_and_aliases_replace() {
        let mut raw = RawConfig::default();
        raw.merge_text("g_s = 0.3\nkappa=0.2 # comment\n", "a").unwrap();
        raw.merge_text("eta=0.5", "b").unwrap();
        let c = RunConfig::resolve(&raw, None).unwrap();
        assert_eq!(c.params.g_s, 0.5);
        assert_eq!(c.params.kappa, 0.2);
        raw.merge_text("g_s=0.7", "c").unwrap();
        assert_eq!(RunConfig::resolve(&raw, None).unwrap().params.g_s, 0.7);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(matches!(resolve("bogus=1"), Err(CliError::Usage(_))));
        assert!(matches!(resolve("kappa"), Err(CliError::Usage(_))));
        assert!(matches!(resolve("kappa=abc"), Err(CliError::Usage(_))));
        assert!(matches!(resolve("kappa=-1"), Err(CliError::Usage(_))));
        assert!(matches!(resolve("grid=1:0:3"), Err(CliError::Usage(_))));
        assert!(matches!(resolve("direction=up"), Err(CliError::Usage(_))));
        assert!(matches!(resolve("temperature=1"), Err(CliError::Usage(_))));
    }

    #[test]
    fn quality_factor_and_shifts() {
        let c = resolve("mechanical_q=1e4\nshift=0,0.5,1\n").unwrap();
        assert_eq!(c.params.gamma_m, 1e-4);
        let sets = c.shifted_params().unwrap();
        assert_eq!(sets.len(), 3);
        assert!((sets[2].1.aux_shift() - 1.0).abs() < 1e-12);
        assert_eq!(sets[0].1.aux_amplitude, 0.0);
    }

    #[test]
    fn si_units_are_rescaled() {
        let w = 2.0 * std::f64::consts::PI * 1e7;
        let text = format!("si_omega_m={w}\nkappa={}\ng_s={w}\ntemperature=0.001\ngrid=-{w}:{w}:3", 0.1 * w);
        let c = resolve(&text).unwrap();
        assert!((c.params.kappa - 0.1).abs() < 1e-15);
        assert!((c.params.g_s - 1.0).abs() < 1e-15);
        assert_eq!(c.grid.values(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(c.params.n_thermal, thermal_occupation(0.001, w).unwrap());
        assert!(c.params.n_thermal > 1.0);
    }

    #[test]
    fn verify_model_choice() {
        let c = resolve("").unwrap();
        let kerr = c.fock_model(&c.params);
        assert_eq!(kerr.kind, HamiltonianKind::KerrReduced);
        let p = SystemParams { g_s: 1.0, ..SystemParams::default() };
        let full = c.fock_model(&p);
        assert_eq!((full.kind, full.mech_dim), (HamiltonianKind::FullOptomechanical, 36));
    }
}
