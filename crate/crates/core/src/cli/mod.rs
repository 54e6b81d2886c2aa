//! Command-line front end: `spectrum`, `recoil`, `validate` and `limit`.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad configuration or arguments,
//! 3 an integral missed its tolerance.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::Error;
use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "unruh", version, about = "Emission and recoil of accelerated two-level detectors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML file with dotted keys; missing keys take the reference values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Overrides `quadrature.mc_seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Angle-resolved and angle-integrated emission spectra.
    Spectrum,
    /// Recoil density over (r, zeta).
    Recoil,
    /// Closed form vs oracle, Taylor vs Monte Carlo and the velocity guard.
    Validate,
    /// Deviation from the classical spectrum as the mass grows.
    Limit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    CheckFailed,
    NotConverged,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::CheckFailed => 1,
            Status::NotConverged => 3,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Numeric(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
            CliError::Numeric(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numeric(Error::QuadratureNoConvergence { .. })
            | CliError::Numeric(Error::DerivativeUnstable { .. }) => 3,
            _ => 2,
        }
    }
}

/// Loads the configuration and applies the command-line overrides.
pub fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(CliError::Config)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.quadrature.mc_seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.run.out = Some(out.clone());
    }
    if let Some(w) = cli.workers {
        cfg.run.workers = w;
    }
    Ok(cfg)
}

pub fn execute(cli: &Cli) -> Result<Status, CliError> {
    let cfg = load_config(cli)?;
    // Validation reports on out-of-regime drives instead of refusing them.
    let res = cfg
        .resolve(cli.command != Command::Validate)
        .map_err(CliError::Config)?;
    let out = cfg.run.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out.display())))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start workers: {e}")))?;
    let workers = pool.current_num_threads();
    pool.install(|| match cli.command {
        Command::Spectrum => commands::run_spectrum(&cfg, res, &out, workers),
        Command::Recoil => commands::run_recoil(&cfg, res, &out, workers),
        Command::Validate => commands::run_validate(&cfg, res, &out),
        Command::Limit => commands::run_limit(&cfg, res, &out, workers),
    })
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(status) => {
            match status {
                Status::Pass => {}
                Status::CheckFailed => eprintln!("unruh: a check failed; see the report"),
                Status::NotConverged => eprintln!("unruh: some integrals missed their tolerance"),
            }
            status.exit_code()
        }
        Err(e) => {
            eprintln!("unruh: {e}");
            e.exit_code()
        }
    }
}
