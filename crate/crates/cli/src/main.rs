//! `ablation`: tables, field profiles, validation suites and finite-difference runs.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ablation_core::Error;

/// Process exit codes.
pub mod exit {
    pub const CONFIG: u8 = 2;
    pub const NUMERIC: u8 = 3;
    pub const VALIDATION: u8 = 4;
}

#[derive(Debug, Parser)]
#[command(name = "ablation", version, about = "Closed-form focal laser ablation fields")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Scenario and output options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Parameter file overriding the bundled registry.
    #[arg(long, global = true, env = "ABLATION_PARAMS")]
    pub params: Option<PathBuf>,
    /// Tissue pair (breast, prostate).
    #[arg(long, global = true, default_value = "breast")]
    pub tissue: String,
    /// Wavelength [nm] (810, 980, 1064).
    #[arg(long = "lambda-nm", global = true)]
    pub lambda_nm: Option<f64>,
    /// Peak laser power [W].
    #[arg(long = "power-w", global = true)]
    pub power_w: Option<f64>,
    /// Pulse width [s].
    #[arg(long = "tp-s", global = true)]
    pub tp_s: Option<f64>,
    /// Pulse interval [s].
    #[arg(long = "dt-s", global = true)]
    pub dt_s: Option<f64>,
    /// End of the pulse train [s].
    #[arg(long = "tend-s", global = true)]
    pub tend_s: Option<f64>,
    /// Anisotropy factor.
    #[arg(long, global = true)]
    pub g: Option<f64>,
    /// Reflectance constant of the Robin conditions.
    #[arg(long = "gamma-r", global = true)]
    pub gamma_r: Option<f64>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reference tables with deviation columns.
    Tables {
        #[arg(long, value_enum, default_value_t = Which::All)]
        which: Which,
    },
    /// One-dimensional sweep of a field.
    Profile(ProfileArgs),
    /// Run validation suites; exit code 4 when any check fails.
    Validate {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
    /// Finite-difference run on the tumor core compared with the closed form.
    FdRun(FdArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    SourceMax,
    Zeta0,
    Ratio,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Specfun,
    PdeResidual,
    Duhamel,
    Damage,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Field {
    Source,
    Fluence,
    Temperature,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Source => "source",
            Field::Fluence => "fluence",
            Field::Temperature => "temperature",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Field::Source => "W/m^3",
            Field::Fluence => "W/m^2",
            Field::Temperature => "K",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    R,
    Z,
    T,
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    #[arg(long, value_enum)]
    pub field: Field,
    /// Swept coordinate.
    #[arg(long, value_enum)]
    pub axis: Axis,
    /// Sweep start (m or s).
    #[arg(long)]
    pub from: f64,
    /// Sweep end (m or s).
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
    /// Fixed radius [m] when not swept.
    #[arg(long = "r-m", default_value_t = 0.0)]
    pub r_m: f64,
    /// Fixed depth [m] when not swept.
    #[arg(long = "z-m", default_value_t = 0.0)]
    pub z_m: f64,
    /// Fixed time [s] when not swept; defaults to the pulse width.
    #[arg(long = "t-s")]
    pub t_s: Option<f64>,
    /// Critical time used by the perfusion law; resolved by fixed point when absent.
    #[arg(long = "t-crit-s")]
    pub t_crit_s: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FdField {
    Fluence,
    Temperature,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct FdArgs {
    #[arg(long, value_enum, default_value_t = FdField::Both)]
    pub field: FdField,
    /// Index into the bundled core grids, 0 = coarsest; defaults to the finest.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Snapshot time as a fraction of the pulse width.
    #[arg(long = "t-frac", default_value_t = 0.5)]
    pub t_frac: f64,
}

/// Error with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: exit::CONFIG,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.root_cause() {
            Error::Config(_) | Error::Domain { .. } => exit::CONFIG,
            _ => exit::NUMERIC,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::config(format!("output: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
