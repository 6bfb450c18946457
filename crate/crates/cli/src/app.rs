use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use inarao_core::{InarParams, Initialization};

use crate::commands::{cmd_contaminate, cmd_detect, cmd_report, cmd_simulate};
use crate::config::{OutlierSpec, ReportFormat, RunConfig, SimulationSpec, OUT_DIR_ENV};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "inarao",
    version,
    about = "Bayesian detection of additive outliers in Poisson INAR(1) count series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a Poisson INAR(1) series, optionally with additive outliers.
    Simulate(SimulateArgs),
    /// Add outliers to an existing series.
    Contaminate(ContaminateArgs),
    /// Run the Gibbs sampler and report detected outliers.
    Detect(Box<DetectArgs>),
    /// Print descriptive statistics and the CLS fit of a series.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub n: usize,
    /// `9:7,29:13` for fixed times, or sizes `7,13,18` at random times.
    #[arg(long)]
    pub outliers: Option<OutlierSpec>,
    #[arg(long)]
    pub seed: u64,
    /// Start from this count instead of a stationary draw.
    #[arg(long)]
    pub initial: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ContaminateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub outliers: OutlierSpec,
    /// Needed when outlier times are random.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// `key = value` file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub max_lag: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    pub format: ReportFormat,
}

fn env_out_dir() -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(env_out_dir)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn emit(text: &str) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(text.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| CliError::io("<stdout>", e))
}

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate(a) => {
            let spec = SimulationSpec {
                params: InarParams::new(a.alpha, a.lambda)?,
                n: a.n,
                outliers: a.outliers.unwrap_or(OutlierSpec::Fixed(Vec::new())),
            };
            let init = a
                .initial
                .map_or(Initialization::Stationary, Initialization::Fixed);
            let written = cmd_simulate(&spec, init, a.seed, &out_dir(a.out_dir))?;
            emit(
                &written
                    .iter()
                    .map(|p| format!("wrote {}\n", p.display()))
                    .collect::<String>(),
            )
        }
        Command::Contaminate(a) => {
            let written = cmd_contaminate(&a.input, &a.outliers, a.seed, &out_dir(a.out_dir))?;
            emit(
                &written
                    .iter()
                    .map(|p| format!("wrote {}\n", p.display()))
                    .collect::<String>(),
            )
        }
        Command::Detect(a) => {
            let file = match &a.config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                    RunConfig::from_file_text(&text)?
                }
                None => RunConfig::default(),
            };
            let run = a.run.or(file).resolve(env_out_dir())?;
            emit(&cmd_detect(&run)?)
        }
        Command::Report(a) => emit(&cmd_report(&a.input, a.max_lag, a.format)?),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
