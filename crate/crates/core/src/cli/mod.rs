//! The `rollcall` command line. Every command that writes files also writes
//! a [`RunManifest`] from which it can be replayed.

mod commands;
mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use manifest::{sha256_file, RunManifest, MANIFEST_FORMAT};

/// Environment variable that overrides every configured seed.
pub const SEED_ENV: &str = "ROLLCALL_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "rollcall",
    version,
    about = "Roll-call vote prediction experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse JSONL inputs and write a processed corpus cache.
    Ingest(IngestArgs),
    /// Train one model on a corpus cache and write a checkpoint.
    Train(TrainArgs),
    /// Run an evaluation protocol over a menu of models.
    Eval(EvalArgs),
    /// Generate a synthetic JSONL corpus.
    Synth(SynthArgs),
    /// Compare analytic and numeric gradients on a micro-instance.
    Gradcheck(GradcheckArgs),
    /// Merge JSON result files into report tables.
    Report(ReportArgs),
    /// Re-run a command from its manifest and compare outputs.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub bills: PathBuf,
    #[arg(long)]
    pub legislators: PathBuf,
    #[arg(long)]
    pub votes: PathBuf,
    /// One stopword per line; the built-in list when omitted.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// JSON file with caps, unanimity threshold and allowed sessions.
    #[arg(long)]
    pub options: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Preset name or path to a model config JSON file.
    #[arg(long)]
    pub model_config: String,
    #[arg(long)]
    pub out_checkpoint: PathBuf,
    /// Train only on these sessions (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub sessions: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    InSession,
    OutOfSession,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum)]
    pub protocol: Protocol,
    /// Preset names or config paths (comma separated or repeated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub models: Vec<String>,
    /// Experiment JSON: sessions, folds, train sessions and test blocks.
    #[arg(long)]
    pub experiment: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write oracle accuracies with rules fitted on these sessions.
    #[arg(long, value_delimiter = ',')]
    pub oracle_train: Vec<String>,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    /// Preset name or path to a model config JSON file.
    #[arg(long)]
    pub model_config: String,
    /// Sample at most this many coordinates per tensor (all when omitted).
    #[arg(long)]
    pub max_coords: Option<usize>,
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    /// Write the report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Corrupt the analytic gradient (negative control).
    #[arg(long, hide = true)]
    pub sabotage: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// JSON result files written by `eval`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub results: Vec<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(crate::Error),
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(e) => write!(f, "error: {e}"),
        }
    }
}

/// Per-invocation settings that do not come from flags.
#[derive(Clone, Debug, Default)]
pub struct Context {
    pub seed_override: Option<u64>,
    /// Skip writing manifests (used while replaying).
    pub replaying: bool,
}

impl Context {
    pub fn from_env() -> Result<Context, CliError> {
        let seed_override = match std::env::var(SEED_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| {
                CliError::Usage(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))
            })?),
            Err(_) => None,
        };
        Ok(Context {
            seed_override,
            replaying: false,
        })
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let argv: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let result = Context::from_env().and_then(|ctx| commands::dispatch(cli.command, argv, &ctx));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
