//! Command-line front end: configuration, file formats and the `simulate`,
//! `tfr`, `predict` and `physio` pipelines.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;
pub use error::CliError;
pub use output::{read_tfr1, Metadata, Tfr1};

#[derive(Debug, Parser)]
#[command(name = "nyqmirror", version, about = "Reflection artifacts of spline-interpolated non-uniform samples")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a scenario, interpolate and write the signals and true curves.
    Simulate(RunArgs),
    /// Time-frequency analysis of a scenario pipeline or a uniform signal file.
    Tfr(RunArgs),
    /// Predicted reflected components and the series-vs-pipeline residual.
    Predict(RunArgs),
    /// Heart-rate and ECG-derived respiration signals from R peaks.
    Physio(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON run configuration; `{}` selects every default.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set analysis.method=rm`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<Vec<PathBuf>, CliError> {
    let (Command::Simulate(a) | Command::Tfr(a) | Command::Predict(a) | Command::Physio(a)) = command;
    let text = std::fs::read_to_string(&a.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", a.config.display())))?;
    let cfg = RunConfig::load(&text, &a.set)?;
    let mut out = output::OutputDir::create(&commands::output_root(&cfg, a.out.clone()))?;
    match command {
        Command::Simulate(_) => commands::simulate(&cfg, &mut out)?,
        Command::Tfr(_) => commands::tfr(&cfg, &mut out)?,
        Command::Predict(_) => commands::predict(&cfg, &mut out)?,
        Command::Physio(_) => commands::physio(&cfg, &mut out)?,
    }
    Ok(out.written().to_vec())
}
