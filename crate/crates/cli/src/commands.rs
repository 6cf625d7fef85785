use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nrblockade::oracle::{oracle_sweep, truncation_diagnostics, ComparisonReport, HamiltonianKind};
use nrblockade::spectrum::{aux_shift_curve, energy_levels, write_spectrum_csv};
use nrblockade::{correlation_curve, excitation_spectrum, g2, ModeDirection, SystemParams};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliError;

/// Oracle mechanical damping used when the analytic side has none.
pub const ORACLE_GAMMA_M: f64 = 1e-4;

/// One CSV (or JSON) document, tagged with the shift it was computed for.
pub struct Output {
    pub shift: Option<f64>,
    pub text: String,
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Usage(format!("cannot write '{}': {e}", path.display()))
}

/// `run.csv` becomes `run.shift-0.5.csv`.
pub fn shift_path(path: &Path, shift: f64) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.shift-{shift}.{}", ext.to_string_lossy()),
        None => format!("{stem}.shift-{shift}"),
    };
    path.with_file_name(name)
}

/// Single documents go to `out` (or stdout). Several documents become one
/// file per shift, or `# shift = x` separated blocks on stdout.
pub fn emit(out: Option<&Path>, docs: &[Output]) -> Result<(), CliError> {
    let single = docs.len() == 1;
    match out {
        Some(path) => {
            for doc in docs {
                let target = match (single, doc.shift) {
                    (false, Some(s)) => shift_path(path, s),
                    _ => path.to_path_buf(),
                };
                fs::write(&target, &doc.text).map_err(|e| io_error(&target, e))?;
                if !single {
                    eprintln!("wrote {}", target.display());
                }
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for doc in docs {
                if let (false, Some(s)) = (single, doc.shift) {
                    writeln!(lock, "# shift = {s}").map_err(|e| io_error(Path::new("<stdout>"), e))?;
                }
                lock.write_all(doc.text.as_bytes())
                    .map_err(|e| io_error(Path::new("<stdout>"), e))?;
            }
        }
    }
    Ok(())
}

fn text(buf: Vec<u8>) -> String {
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn spectrum(cfg: &RunConfig) -> Result<Vec<Output>, CliError> {
    let grid = cfg.grid.values();
    cfg.shifted_params()?
        .into_iter()
        .map(|(shift, p)| {
            let curves = cfg
                .direction
                .directions()
                .into_iter()
                .map(|d| excitation_spectrum(&grid, d, &p, &cfg.truncation))
                .collect::<Result<Vec<_>, _>>()?;
            let mut buf = Vec::new();
            write_spectrum_csv(&curves, &mut buf).expect("write to memory");
            Ok(Output { shift, text: text(buf) })
        })
        .collect()
}

/// `g2` and `nonreciprocity` share the correlation table.
pub fn correlation(cfg: &RunConfig) -> Result<Vec<Output>, CliError> {
    let grid = cfg.grid.values();
    cfg.shifted_params()?
        .into_iter()
        .map(|(shift, p)| {
            let curve = correlation_curve(&grid, &p, &cfg.truncation)?;
            let mut buf = Vec::new();
            curve.write_csv(&mut buf).expect("write to memory");
            Ok(Output { shift, text: text(buf) })
        })
        .collect()
}

pub fn energy(cfg: &RunConfig) -> Result<Vec<Output>, CliError> {
    if !cfg.g_d_values.is_empty() {
        let amplitudes = cfg.aux_grid.values();
        let mut out = String::from("aux_amplitude,g_d,delta_d\n");
        for &g_d in &cfg.g_d_values {
            let p = SystemParams { g_d, ..cfg.params.clone() };
            for (e, dd) in amplitudes.iter().zip(aux_shift_curve(&p, &amplitudes)?) {
                out.push_str(&format!("{e:?},{g_d:?},{dd:?}\n"));
            }
        }
        return Ok(vec![Output { shift: None, text: out }]);
    }
    cfg.shifted_params()?
        .into_iter()
        .map(|(shift, p)| {
            let mut out = String::from("direction,n_photon,n_phonon,energy\n");
            let wanted = cfg.direction.directions();
            for l in energy_levels(cfg.photon_levels, cfg.phonon_levels, &p)? {
                if wanted.contains(&l.direction) {
                    out.push_str(&format!(
                        "{},{},{},{:?}\n",
                        l.direction.as_str(),
                        l.n_photon,
                        l.n_phonon,
                        l.energy
                    ));
                }
            }
            Ok(Output { shift, text: out })
        })
        .collect()
}

fn analytic_g2(grid: &[f64], d: ModeDirection, cfg: &RunConfig, p: &SystemParams) -> Result<Vec<f64>, CliError> {
    grid.iter()
        .map(|&x| g2(x, d, p, &cfg.truncation).map_err(CliError::from))
        .collect()
}

/// Analytic vs oracle comparison. Writes the JSON report, then fails with the
/// worst point if any threshold is missed.
pub fn verify(cfg: &RunConfig) -> Result<(), CliError> {
    let grid = cfg.grid.values();
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for (shift, p) in cfg.shifted_params()? {
        let eta = p.eta();
        let model = cfg.fock_model(&p);
        model.validate()?;
        let mut oracle_params = p.clone();
        if let Some(g) = cfg.oracle_gamma_m {
            oracle_params.gamma_m = g;
        } else if model.kind == HamiltonianKind::FullOptomechanical && p.gamma_m == 0.0 {
            oracle_params.gamma_m = ORACLE_GAMMA_M * p.omega_m;
        }
        let s_tol = cfg.spectrum_tol.unwrap_or(if eta == 0.0 { 1e-6 } else { 0.05 });
        let g2_tol = cfg.g2_tol.unwrap_or(if eta == 0.0 { 1e-6 } else { 0.15 });

        let mut directions = cfg.direction.directions();
        if p.aux_shift() == 0.0 {
            directions.truncate(1);
        }
        for d in directions {
            let sweep = oracle_sweep(&grid, &model, &oracle_params, d)?;
            let diagnostics = truncation_diagnostics(&model, &sweep);
            let s = excitation_spectrum(&grid, d, &p, &cfg.truncation)?;
            let reports = [
                ComparisonReport::new("S", &grid, &s.values, &sweep.spectrum.values, s_tol)?,
                ComparisonReport::new("g2", &grid, &analytic_g2(&grid, d, cfg, &p)?, &sweep.g2, g2_tol)?,
            ]
            .map(|r| r.with_diagnostics(diagnostics.clone()));
            for r in reports.iter().filter(|r| !r.pass) {
                let mut msg = format!(
                    "{} ({}, shift {}): max rel deviation {:.3e} > {} at delta = {} (analytic {}, oracle {})",
                    r.quantity,
                    d.as_str(),
                    shift.unwrap_or_else(|| p.aux_shift()),
                    r.max_rel_deviation,
                    r.threshold,
                    r.worst_delta,
                    r.analytic_at_worst,
                    r.oracle_at_worst
                );
                for note in &r.diagnostics {
                    msg.push_str("\n  ");
                    msg.push_str(note);
                }
                failures.push(msg);
            }
            runs.push(json!({
                "shift": p.aux_shift(),
                "direction": d.as_str(),
                "model": model,
                "oracle_gamma_m": oracle_params.gamma_m,
                "reports": reports,
            }));
        }
    }
    let report = json!({
        "schema": 1,
        "grid": cfg.grid.to_string(),
        "pass": failures.is_empty(),
        "runs": runs,
    });
    let mut doc = serde_json::to_string_pretty(&report).expect("report serializes");
    doc.push('\n');
    emit(cfg.out.as_deref(), &[Output { shift: None, text: doc }])?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failures.join("\n")))
    }
}
