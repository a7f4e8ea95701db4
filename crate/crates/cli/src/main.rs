//! `admiss`: admissibility and controllability checks for diagonal systems.

mod commands;
mod engine;
mod inputs;
mod manifest;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use admiss_core::ScaleGrid;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use engine::Selection;

/// Exit 1: usage, parse or refusal errors.
#[derive(Debug)]
pub struct CliError(String);

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError(msg.into())
    }
}

impl From<admiss_core::Error> for CliError {
    fn from(e: admiss_core::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "admiss", version, about = "Weighted admissibility and exact controllability of diagonal systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the criteria for one system and input space.
    Check(CheckArgs),
    /// Repeat a check over values of one space (or system) parameter.
    Sweep(SweepArgs),
    /// Empirical lower bounds from seeded test functions, or the isometry self-test.
    Oracle(OracleArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// System document (JSON).
    #[arg(long, value_name = "PATH")]
    pub system: Option<PathBuf>,
    /// Input space as inline JSON or a path to a JSON file.
    #[arg(long, value_name = "JSON|PATH")]
    pub space: Option<String>,
    /// auto, C1..C8, R1, R7, kernel, exact_control, sobolev_control or interpolation.
    #[arg(long, default_value = "auto", value_parser = Selection::parse)]
    pub criterion: Selection,
    /// Dyadic scale range `n_min:n_max`.
    #[arg(long, default_value = "-20:40", value_parser = parse_grid)]
    pub grid: ScaleGrid,
    /// Truncation K (regenerates generator systems, truncates listed ones).
    #[arg(long, value_name = "K")]
    pub modes: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Resolvent order N for R1.
    #[arg(long)]
    pub order: Option<u32>,
    /// λ-grid points per octave of the resolvent forms.
    #[arg(long, default_value_t = 2)]
    pub per_octave: u32,
    /// Kernel-sweep points per octave.
    #[arg(long, default_value_t = 4)]
    pub kernel_per_octave: u32,
    /// Skip resolvent forms and kernel sweeps next to the routed criteria.
    #[arg(long)]
    pub no_cross_checks: bool,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Space key to vary (`beta` varies the system document for controllability criteria).
    #[arg(long)]
    pub param: String,
    /// Comma-separated values; fractions such as `4/3` are accepted.
    #[arg(long, value_delimiter = ',', value_parser = parse_value, num_args = 0..)]
    pub values: Vec<f64>,
    /// Also write the run manifest here.
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: Common,
    /// Family sizes M; one lower bound per size.
    #[arg(long = "m", value_delimiter = ',', default_value = "64")]
    pub sizes: Vec<usize>,
    /// Isometry self-test for a weight preset (`hardy`, `bergman:<alpha>`) instead of a system.
    #[arg(long, value_name = "PRESET")]
    pub isometry: Option<String>,
}

fn parse_grid(s: &str) -> Result<ScaleGrid, String> {
    ScaleGrid::parse(s).map_err(|e| e.to_string())
}

fn parse_value(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
            a / b
        }
        None => s.parse().map_err(|_| format!("`{s}` is not a number"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("ADMISS_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::usage(format!("ADMISS_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Check(a) => commands::check(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Oracle(a) => commands::oracle(a),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
