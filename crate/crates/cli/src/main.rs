//! `radiance`: command-line front end.
//!
//! Exit codes: 0 success, 2 argument or parameter error, 3 numerical
//! validity failure, 4 I/O error. `RADIANCE_THREADS` caps the worker pool.

mod cli;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};
use radiance_core::radiation::RadiationError;
use radiance_core::{ParamError, ResponseError, RootError};
use radiance_dynamics::DynamicsError;
use thiserror::Error;

use crate::cli::{Cli, Command, OutputArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validity(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validity(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<RootError> for CliError {
    fn from(e: RootError) -> Self {
        match e {
            RootError::DegenerateCubic => CliError::Usage(format!("{e} (zero charge?)")),
            _ => CliError::Validity(e.to_string()),
        }
    }
}

impl From<ResponseError> for CliError {
    fn from(e: ResponseError) -> Self {
        match e {
            ResponseError::Roots(r) => r.into(),
            ResponseError::InvalidIndex(_)
            | ResponseError::InvalidTime(_)
            | ResponseError::InvalidWavenumber(_)
            | ResponseError::RequiresFreeParticle => CliError::Usage(e.to_string()),
            _ => CliError::Validity(e.to_string()),
        }
    }
}

impl From<RadiationError> for CliError {
    fn from(e: RadiationError) -> Self {
        match e {
            RadiationError::Response(r) => r.into(),
            RadiationError::Roots(r) => r.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::InvalidGrid(_)
            | DynamicsError::InvalidTimeStep(_)
            | DynamicsError::InvalidZeta(_)
            | DynamicsError::NotNormalized(_)
            | DynamicsError::InvalidDensity(_)
            | DynamicsError::TooFewTrajectories(_) => CliError::Usage(e.to_string()),
            _ => CliError::Validity(e.to_string()),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("RADIANCE_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("RADIANCE_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure {n} threads: {e}")))
}

/// Help and version requests exit through clap; real errors are reduced to
/// their first line.
fn clap_error(e: clap::Error) -> CliError {
    use clap::error::ErrorKind;
    if matches!(
        e.kind(),
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
    ) {
        e.exit()
    }
    let text = e.render().to_string();
    let line = text.lines().next().unwrap_or("invalid arguments");
    CliError::Usage(format!("{} (see --help)", line.trim_start_matches("error: ")))
}

fn output_args(command: &Command) -> &OutputArgs {
    match command {
        Command::Constants(a) => &a.output,
        Command::Roots(a) => &a.output,
        Command::Response(a) => &a.output,
        Command::Spectrum(a) => &a.output,
        Command::Energy(a) => &a.output,
        Command::Simulate(a) => &a.output,
        Command::Master(a) => &a.output,
        Command::Limits(a) => &a.output,
    }
}

fn run() -> Result<(), CliError> {
    configure_threads()?;
    let args = config::expand(std::env::args_os().collect())?;
    let matches = Cli::command().try_get_matches_from(args).map_err(clap_error)?;
    let cli = Cli::from_arg_matches(&matches).map_err(clap_error)?;
    let name = cli.command.name();
    let recorded = matches.subcommand_matches(name).map(|m| config::record(name, m)).unwrap_or_default();
    let report = commands::run(&cli.command)?;
    output::emit(&report, name, &recorded, output_args(&cli.command))
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("radiance: {e}");
            ExitCode::from(e.code())
        }
    }
}
