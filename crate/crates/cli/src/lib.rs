//! Command-line harness for `sfwm-core`: scenario files, numeric exports and
//! the source summary table.

pub mod bundled;
pub mod commands;
pub mod error;
pub mod format;
pub mod jsi_file;
pub mod scenario;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use commands::{Format, Output, Overrides};
pub use error::{CliError, Result};
pub use scenario::Scenario;

#[derive(Debug, Parser)]
#[command(
    name = "sfwm",
    version,
    about = "Photon-pair source simulator for SFWM waveguides and microrings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file, or the name of a bundled scenario.
    #[arg(long, global = true)]
    pub scenario: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override the number of grid points per axis.
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
    /// Run without the output band-pass filter.
    #[arg(long, global = true)]
    pub no_filter: bool,
    /// Coincidence-to-accidental ratio for the visibility correction.
    #[arg(long, global = true)]
    pub car: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Txt)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Write the filtered joint spectral intensity grid.
    Jsi,
    /// Report purity, Schmidt tail and filter survival.
    Purity,
    /// Write the Schmidt coefficients.
    Schmidt,
    /// Scan the interferometer phase and report the fringe visibility.
    Fringe,
    /// Photon-number statistics of the squeezed state.
    Stats,
    /// Summary table over the bundled scenarios.
    Table1,
}

/// Resolves `--scenario`: an existing file wins over a bundled name.
pub fn resolve_scenario(arg: &str) -> Result<Scenario> {
    let path = Path::new(arg);
    if path.is_file() {
        return Scenario::load(path);
    }
    if bundled::text(arg).is_some() {
        return bundled::load(arg);
    }
    Err(CliError::Config(format!(
        "scenario `{arg}` is neither a readable file nor a bundled scenario"
    )))
}

/// Runs one command; the caller maps errors to exit codes.
pub fn run(cli: &Cli) -> Result<Output> {
    let overrides = Overrides {
        grid_points: cli.grid_points,
        no_filter: cli.no_filter,
        car: cli.car,
    };
    if cli.command == Command::Table1 {
        return commands::table1(&overrides, cli.format);
    }
    let arg = cli
        .scenario
        .as_deref()
        .ok_or_else(|| CliError::Config("--scenario is required for this command".into()))?;
    let scenario = overrides.apply(&resolve_scenario(arg)?)?;
    match cli.command {
        Command::Jsi => commands::jsi(&scenario),
        Command::Purity => commands::purity(&scenario, cli.format),
        Command::Schmidt => commands::schmidt(&scenario),
        Command::Fringe => commands::fringe(&scenario, cli.format),
        Command::Stats => commands::stats(&scenario, cli.format),
        Command::Table1 => unreachable!(),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Parses arguments, runs, writes outputs and returns the exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let result = run(&cli).and_then(|output| {
        for w in &output.warnings {
            let _ = writeln!(stderr, "warning: {w}");
        }
        match (&output.data, &cli.out) {
            (Some(data), Some(path)) => {
                write_file(path, data)?;
                let _ = write!(stdout, "{}", output.report);
            }
            (Some(data), None) => {
                let _ = write!(stdout, "{data}");
            }
            (None, Some(path)) => write_file(path, &output.report)?,
            (None, None) => {
                let _ = write!(stdout, "{}", output.report);
            }
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
