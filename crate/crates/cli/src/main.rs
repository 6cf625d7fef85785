//! `nrblockade`: excitation spectra, g2(0), nonreciprocity and oracle checks
//! from the command line.

mod commands;
mod config;
mod error;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{RawConfig, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "nrblockade", version, about = "Nonreciprocal photon blockade in hybrid optomechanics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Excitation spectrum S(delta) as CSV.
    Spectrum(CommonArgs),
    /// Equal-time g2(0) for both directions as CSV.
    G2(CommonArgs),
    /// Nonreciprocity R(delta) with the underlying g2 columns as CSV.
    Nonreciprocity(CommonArgs),
    /// Energy level table, or the auxiliary shift curve with `--preset fig2b`.
    Energy(CommonArgs),
    /// Compare analytic results with the master-equation oracle (JSON report).
    Verify(CommonArgs),
    /// List the bundled presets.
    Presets,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::G2(_) => "g2",
            Command::Nonreciprocity(_) => "nonreciprocity",
            Command::Energy(_) => "energy",
            Command::Verify(_) => "verify",
            Command::Presets => "presets",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Cw,
    Ccw,
    Both,
}

#[derive(Args)]
struct CommonArgs {
    /// key=value file; keys are the SystemParams fields and run settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Figure preset, applied before the config file.
    #[arg(long)]
    preset: Option<String>,
    /// Laser detuning grid start:stop:points (units of omega_m).
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, value_enum)]
    direction: Option<Direction>,
    /// Auxiliary shift delta_d/omega_m (comma-separated for several).
    #[arg(long)]
    shift: Option<String>,
    /// g_s/omega_m.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    /// Extra key=value override; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output file (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn resolve(&self, command: &str) -> Result<RunConfig, CliError> {
        let mut raw = RawConfig::default();
        if let Some(name) = &self.preset {
            let preset = presets::find(name)?;
            if preset.command != command && command != "verify" {
                return Err(CliError::Usage(format!(
                    "preset '{name}' belongs to the '{}' command",
                    preset.command
                )));
            }
            preset.apply(&mut raw)?;
        }
        if let Some(path) = &self.config {
            raw.merge_file(path)?;
        }
        for pair in &self.set {
            raw.merge_assignment(pair)?;
        }
        if let Some(g) = &self.grid {
            raw.set("grid", g)?;
        }
        if let Some(d) = self.direction {
            let d = match d {
                Direction::Cw => "cw",
                Direction::Ccw => "ccw",
                Direction::Both => "both",
            };
            raw.set("direction", d)?;
        }
        if let Some(s) = &self.shift {
            raw.set("shift", s)?;
        }
        if let Some(eta) = self.eta {
            raw.set("eta", &eta.to_string())?;
        }
        if let Some(kappa) = self.kappa {
            raw.set("kappa", &kappa.to_string())?;
        }
        RunConfig::resolve(&raw, self.out.clone())
    }
}

fn list_presets() {
    for p in presets::all() {
        println!("{:<6} {:<15} {}", p.name, p.command, p.description);
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let name = cli.command.name();
    let (args, handler): (&CommonArgs, fn(&RunConfig) -> Result<Vec<commands::Output>, CliError>) =
        match &cli.command {
            Command::Spectrum(a) => (a, commands::spectrum),
            Command::G2(a) | Command::Nonreciprocity(a) => (a, commands::correlation),
            Command::Energy(a) => (a, commands::energy),
            Command::Verify(a) => return commands::verify(&a.resolve(name)?),
            Command::Presets => {
                list_presets();
                return Ok(());
            }
        };
    let cfg = args.resolve(name)?;
    let docs = handler(&cfg)?;
    commands::emit(cfg.out.as_deref(), &docs)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
