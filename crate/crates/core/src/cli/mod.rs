//! The `mlmkit` command line: argument parsing, dispatch and metrics output.
//!
//! Exit status: 0 on success, 1 when a check or computation fails, 2 on
//! I/O, usage or configuration errors.

mod commands;
mod config;
mod metrics;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::{ApproxSection, DataSection, GradcheckSection, InputSection, NormsSection, RunConfig, TrainSection};
pub use metrics::{Metrics, Record};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("config field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] crate::io::IoError),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub(crate) fn field(field: &str, message: impl std::fmt::Display) -> Self {
        CliError::Field { field: field.to_string(), message: message.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mlmkit", version, about = "Low-rank tensor approximation and multilinear-map output layers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Append metrics records to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Truncated SVD or KPSVD reconstructions of an image or tensor.
    Approx(ApproxArgs),
    /// Nuclear norms per unfolding, weighted tensor nuclear norm, RPCA-norm.
    Norms(NormsArgs),
    /// Per-layer parameter counts and the FC-equivalent ratio of each head.
    Params,
    /// Central-difference check of the analytic gradient.
    Gradcheck(GradcheckArgs),
    /// Train the configured network and write the parameters.
    Train(TrainArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ApproxArgs {
    /// PGM/PPM input.
    #[arg(long, conflicts_with = "tensor")]
    pub image: Option<PathBuf>,
    /// TensorFile input (order 2, or order 3 as C x H x W).
    #[arg(long)]
    pub tensor: Option<PathBuf>,
    /// svd, kpsvd or both.
    #[arg(long)]
    pub method: Option<String>,
    /// Comma-separated ranks.
    #[arg(long, value_delimiter = ',')]
    pub ranks: Option<Vec<usize>>,
    /// Right factor shape: HxW or CxHxW.
    #[arg(long)]
    pub right_shape: Option<String>,
    /// Directory for reconstructed images.
    #[arg(long)]
    pub recon_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct NormsArgs {
    /// TensorFile input.
    #[arg(long, conflicts_with = "image")]
    pub input: Option<PathBuf>,
    /// PGM/PPM input.
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Comma-separated unfolding weights; uniform 1/N by default.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub weights: Option<Vec<f64>>,
    /// RPCA sparsity weight; 1/sqrt(max(m, n)) by default.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Unfolding mode fed to RPCA.
    #[arg(long)]
    pub mode: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GradcheckArgs {
    #[arg(long)]
    pub batch: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Largest accepted relative error.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Adds a constant to every analytic gradient entry.
    #[arg(long, hide = true, allow_negative_numbers = true)]
    pub corrupt_gradient: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TrainArgs {
    /// Model output path; overrides `train.model`.
    #[arg(long)]
    pub model: Option<PathBuf>,
}

pub(crate) fn parse_dims(s: &str) -> Result<Vec<usize>, String> {
    s.split(['x', 'X', ','])
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("bad extent {p:?}: {e}")))
        .collect()
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("mlmkit: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let config = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let seed = cli.common.seed.unwrap_or(config.seed);
    let mut sink = metrics::Sink::open(cli.common.out.as_deref())?;
    let ctx = commands::Context { config: &config, seed };
    match &cli.command {
        Command::Approx(a) => commands::approx(&ctx, a, &mut sink),
        Command::Norms(a) => commands::norms(&ctx, a, &mut sink),
        Command::Params => commands::params(&ctx, &mut sink),
        Command::Gradcheck(a) => commands::gradcheck(&ctx, a, &mut sink),
        Command::Train(a) => commands::train(&ctx, a, &mut sink),
    }
}
