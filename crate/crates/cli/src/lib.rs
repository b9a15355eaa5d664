//! Command-line front end: `tune`, `coarsen`, `eval` and `compare`.
//!
//! Every failure is reported as one JSON line on stderr,
//! `{"error":"<kind>","message":"..."}`, with exit status 1, except a tuning
//! run in which no trial succeeded, which exits with status 2 after writing
//! its logs.

mod artifacts;
mod commands;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{run, AllTrialsFailed, UsageError};

#[derive(Debug, Parser)]
#[command(name = "jitune", version, about = "Time-budgeted hyperparameter tuning for network embedding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tune an embedder within a time or round budget.
    Tune(TuneArgs),
    /// Build the synopsis chain of a graph and write every level.
    Coarsen(CoarsenArgs),
    /// Score a precomputed embedding on a task.
    Eval(EvalArgs),
    /// Run several tuners under the same round budget and tabulate them.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    /// Edge list: `u v [w]` per line.
    #[arg(long)]
    pub edges: PathBuf,
    /// Node labels: `node label [label...]` per line.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Node attributes: `node x1 ... xk` per line.
    #[arg(long)]
    pub attrs: Option<PathBuf>,
    /// Treat the edge list as directed (it is symmetrized).
    #[arg(long)]
    pub directed: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EmbedderArgs {
    /// Native embedder: deepwalk or spectral (alias arope).
    #[arg(long, default_value = "deepwalk")]
    pub embedder: String,
    /// External embedder command; overrides --embedder.
    #[arg(long)]
    pub plugin_cmd: Option<String>,
    /// Search-space file for the plugin (default: the GCN space).
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// Complexity class of the plugin: vlogv, e_plus_v or e.
    #[arg(long, default_value = "e")]
    pub complexity: String,
    /// Per-run plugin timeout in seconds.
    #[arg(long)]
    pub plugin_timeout: Option<f64>,
    /// Embedding size of the spectral embedder.
    #[arg(long, default_value_t = jitune::embed::DEFAULT_SPECTRAL_DIM)]
    pub dim: usize,
}

#[derive(Debug, Clone, Args)]
pub struct TaskArgs {
    /// link_prediction or classification.
    #[arg(long, default_value = "link_prediction")]
    pub task: String,
    /// Fraction of edges held out for link prediction.
    #[arg(long, default_value_t = jitune::eval::DEFAULT_HOLDOUT_FRACTION)]
    pub holdout: f64,
    /// Fraction of labeled nodes used to train the classifier.
    #[arg(long, default_value_t = jitune::eval::DEFAULT_TRAIN_FRACTION)]
    pub train_fraction: f64,
    /// Link score: inner or cosine.
    #[arg(long, default_value = "inner")]
    pub scorer: String,
    /// Classification metric: micro_f1 or accuracy.
    #[arg(long, default_value = "micro_f1")]
    pub metric: String,
}

#[derive(Debug, Clone, Args)]
#[group(id = "budget", required = true, multiple = false)]
pub struct BudgetArgs {
    /// Wall-clock budget in seconds.
    #[arg(long)]
    pub budget_seconds: Option<f64>,
    /// Budget in original-graph-run equivalents.
    #[arg(long)]
    pub budget_rounds: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub embedder: EmbedderArgs,
    #[command(flatten)]
    pub task: TaskArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Similarity threshold of the synopsis chain.
    #[arg(long, default_value_t = jitune::coarsen::DEFAULT_TAU)]
    pub tau: f64,
    /// Use attribute-aware coarsening (requires --attrs).
    #[arg(long)]
    pub attributed: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Parallel trials per batch.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Stop after the synopsis phase and validate its best configuration.
    #[arg(long)]
    pub synopsis_only: bool,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CoarsenArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, default_value_t = jitune::coarsen::DEFAULT_TAU)]
    pub tau: f64,
    #[arg(long)]
    pub attributed: bool,
    /// Cosine threshold for attribute-similar pairs.
    #[arg(long, default_value_t = jitune::coarsen::DEFAULT_COSINE_THRESHOLD)]
    pub cosine_threshold: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Embedding file: `node v1 ... vd` per line.
    #[arg(long)]
    pub embedding: PathBuf,
    #[command(flatten)]
    pub task: TaskArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub embedder: EmbedderArgs,
    #[command(flatten)]
    pub task: TaskArgs,
    /// Comma-separated subset of jitune, random, gp (at least two).
    #[arg(long, default_value = "jitune,random")]
    pub methods: String,
    /// Budget in original-graph-run equivalents, shared by every method.
    #[arg(long)]
    pub budget_rounds: u64,
    /// Number of seeds; seeds run from --seed upward.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = jitune::coarsen::DEFAULT_TAU)]
    pub tau: f64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long)]
    pub out: PathBuf,
}

/// A reportable failure: exit status plus the JSON error line.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn json_line(&self) -> String {
        serde_json::json!({ "error": self.kind, "message": self.message }).to_string()
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        if err.downcast_ref::<UsageError>().is_some() {
            Failure {
                code: 1,
                kind: "usage",
                message: format!("{err:#}"),
            }
        } else if err.downcast_ref::<AllTrialsFailed>().is_some() {
            Failure {
                code: 2,
                kind: "all_trials_failed",
                message: format!("{err:#}"),
            }
        } else {
            Failure {
                code: 1,
                kind: "invalid",
                message: format!("{err:#}"),
            }
        }
    }
}

/// Parses `args` and runs the command. Help and version requests print to
/// stdout and succeed; usage errors become `Failure`s with exit status 1.
pub fn execute<I, T>(args: I) -> Result<(), Failure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => {
            return Err(Failure {
                code: 1,
                kind: "usage",
                message: e.to_string().lines().next().unwrap_or_default().to_string(),
            })
        }
    };
    run(cli.command).map_err(Failure::from)
}
