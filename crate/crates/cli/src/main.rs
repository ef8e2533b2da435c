//! `riesz`: eigenpairs, Riesz-basis verdicts and diagnostics for
//! Schrödinger operators with rational eigenparameter-dependent boundary
//! conditions.
//!
//! Exit status: 0 success (or `basis`), 1 configuration error, 2 computation
//! error, 3 `not_basis`, 4 `borderline`.

mod commands;
mod config;
mod table;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use riesz_core::Error as CoreError;

use crate::commands::Output;
use crate::config::{Config, Overrides};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cli: config: {0}")]
    Config(String),
    #[error("cli: io: {0}")]
    Io(String),
    #[error("{0}")]
    Compute(CoreError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Compute(_) => 2,
        }
    }
}

impl From<CoreError> for CliError {
    /// Errors about malformed input are configuration errors; everything
    /// else is a failed computation.
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidHerglotz(_)
            | CoreError::InvalidPotential(_)
            | CoreError::LengthMismatch { .. }
            | CoreError::DimensionMismatch { .. }
            | CoreError::InvalidTheta(_)
            | CoreError::InvalidRequest(_)
            | CoreError::MissingIndex(_) => CliError::Config(e.to_string()),
            other => CliError::Compute(other),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "riesz", version, about = "Spectra and Riesz-basis checks for eigenparameter-dependent boundary problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Problem configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Removed indices, comma separated (overrides the config).
    #[arg(long, value_delimiter = ',')]
    theta: Option<Vec<usize>>,
    /// Highest eigenvalue index (overrides the config).
    #[arg(long = "n-max")]
    n_max: Option<usize>,
    /// Gram section sizes, comma separated (overrides the config).
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Write artifacts and a JSON report into this directory instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of potential cells (overrides grid_size; presets only).
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepMode {
    Pairs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues, link constants and boundary coordinates (CSV).
    Spectrum(Common),
    /// Riesz-basis verdict for one index set (JSON report; exit 0/3/4).
    BasisCheck(Common),
    /// Extreme eigenvalues of finite Gram sections (CSV).
    Gram(Common),
    /// Verdicts for every index pair up to n-max (CSV).
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "pairs")]
        mode: SweepMode,
    },
    /// Link constants with their asymptotic diagnostics (CSV).
    Beta(Common),
    /// Residuals of the completeness defect for a singular index set (CSV).
    Defect(Common),
    /// Characteristic function on a uniform λ grid (CSV).
    DumpOmega {
        #[command(flatten)]
        common: Common,
        #[arg(long = "lambda-min", default_value_t = -10.0, allow_negative_numbers = true)]
        lambda_min: f64,
        #[arg(long = "lambda-max", default_value_t = 400.0, allow_negative_numbers = true)]
        lambda_max: f64,
        #[arg(long, default_value_t = 2001)]
        points: usize,
    },
    /// Left solution at one λ on the output grid (CSV: x, u, v).
    DumpTrajectory {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::BasisCheck(_) => "basis-check",
            Command::Gram(_) => "gram",
            Command::Sweep { .. } => "sweep",
            Command::Beta(_) => "beta",
            Command::Defect(_) => "defect",
            Command::DumpOmega { .. } => "dump-omega",
            Command::DumpTrajectory { .. } => "dump-trajectory",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Spectrum(c)
            | Command::BasisCheck(c)
            | Command::Gram(c)
            | Command::Beta(c)
            | Command::Defect(c) => c,
            Command::Sweep { common, .. }
            | Command::DumpOmega { common, .. }
            | Command::DumpTrajectory { common, .. } => common,
        }
    }
}

fn load(common: &Common) -> Result<Config, CliError> {
    let overrides = Overrides {
        theta: common.theta.clone(),
        n_max: common.n_max,
        sizes: common.sizes.clone(),
        grid: common.grid,
    };
    Config::load(&common.config)?.apply(&overrides)
}

fn execute(command: &Command, cfg: &Config) -> Result<Output, CliError> {
    match command {
        Command::Spectrum(_) => commands::spectrum(cfg),
        Command::BasisCheck(_) => commands::basis_check_cmd(cfg),
        Command::Gram(_) => commands::gram(cfg),
        Command::Sweep { mode: SweepMode::Pairs, .. } => commands::sweep_pairs(cfg),
        Command::Beta(_) => commands::beta(cfg),
        Command::Defect(_) => commands::defect(cfg),
        Command::DumpOmega { lambda_min, lambda_max, points, .. } => {
            commands::dump_omega(cfg, *lambda_min, *lambda_max, *points)
        }
        Command::DumpTrajectory { lambda, .. } => commands::dump_trajectory(cfg, *lambda),
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn emit(command: &Command, cfg: &Config, output: &Output) -> Result<(), CliError> {
    let report = serde_json::json!({
        "command": command.name(),
        "config": cfg,
        "result": output.report,
    });
    match &command.common().out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
            if let Some((stem, csv)) = &output.csv {
                let path = dir.join(format!("{stem}.csv"));
                std::fs::write(&path, csv).map_err(|e| io_error(&path, e))?;
            }
            let path = dir.join("report.json");
            let text = serde_json::to_string_pretty(&report)? + "\n";
            std::fs::write(&path, text).map_err(|e| io_error(&path, e))?;
        }
        None => {
            let text = match &output.csv {
                Some((_, csv)) => csv.clone(),
                None => serde_json::to_string_pretty(&report)? + "\n",
            };
            std::io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = load(cli.command.common())?;
    let output = execute(&cli.command, &cfg)?;
    emit(&cli.command, &cfg, &output)?;
    Ok(output.exit)
}

fn main() -> ExitCode {
    // Usage errors are configuration errors (exit 1), not computation errors.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
