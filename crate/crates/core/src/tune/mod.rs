//! Tuning: search spaces, sampling, budget arithmetic, space trimming, the
//! two-phase synopsis tuner and the random-search / GP baselines.

mod budget;
mod gp;
mod jitune;
mod lhs;
mod random;
mod runner;
mod space;
mod task;
mod trial;
mod trim;

use serde::Serialize;
use thiserror::Error;

pub use budget::{compute_rounds, BudgetError, BudgetReport, Ratio, TuningBudget};
pub use gp::{encode, expected_improvement, tune_gp, GaussianProcess, DEFAULT_GP_INIT};
pub use jitune::{tune_jitune, JituneOptions};
pub use lhs::{lhs_sample, EmptySample};
pub use random::tune_random;
pub use runner::{BudgetSpec, ROUND_UNIT};
pub use space::{Configuration, Dim, DimKind, HyperparameterSpace, SpaceError, Value};
pub use task::{TaskData, TaskDataError, TaskSettings};
pub use trial::{CurvePoint, GraphTag, Phase, Trial, TrialLog, TrialStatus};
pub use trim::{is_subspace, trim_space, TrimError};

#[derive(Debug, Error)]
pub enum TuneError {
    #[error(transparent)]
    Budget(#[from] BudgetError),
    #[error(transparent)]
    Task(#[from] TaskDataError),
    #[error("rounds ({rounds}) must exceed the initial design size ({init})")]
    TooFewRounds { rounds: u64, init: u64 },
}

/// Per-level statistics of the synopsis chain a tuner built.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSummary {
    pub level: usize,
    pub nodes: usize,
    pub edges: usize,
    pub alpha: f64,
    pub delta_w: f64,
}

/// Run-level accounting written next to the trial log.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub method: String,
    /// `rounds` (charged clock) or `wall`.
    pub clock: String,
    pub budget: Option<BudgetReport>,
    pub chain: Vec<LevelSummary>,
    pub selected_level: Option<usize>,
    pub alpha: Option<f64>,
    pub rho: Option<f64>,
    pub trim_factor: Option<f64>,
    pub coarsen_secs: f64,
    pub wall_secs: f64,
    /// Tuner clock at the end of the run (charged or wall).
    pub clock_secs: f64,
    pub original_runs: usize,
    pub synopsis_runs: usize,
    /// Sum of the refinement batch sizes.
    pub refine_rounds: u64,
    pub failed_trials: usize,
    pub notes: Vec<String>,
}

impl RunSummary {
    pub(crate) fn new(method: &str, charged: bool) -> Self {
        Self {
            method: method.to_string(),
            clock: if charged { "rounds" } else { "wall" }.to_string(),
            budget: None,
            chain: Vec::new(),
            selected_level: None,
            alpha: None,
            rho: None,
            trim_factor: None,
            coarsen_secs: 0.0,
            wall_secs: 0.0,
            clock_secs: 0.0,
            original_runs: 0,
            synopsis_runs: 0,
            refine_rounds: 0,
            failed_trials: 0,
            notes: Vec::new(),
        }
    }
}

/// What every tuner returns: the incumbent, the full trial log and the run
/// accounting. `best` is `None` only when every original-graph trial failed.
#[derive(Debug, Clone)]
pub struct TuneOutcome {
    pub best: Option<Configuration>,
    pub best_performance: Option<f64>,
    pub best_trial: Option<usize>,
    pub log: TrialLog,
    pub summary: RunSummary,
}

impl TuneOutcome {
    pub(crate) fn finish(log: TrialLog, mut summary: RunSummary, best: Option<usize>) -> Self {
        summary.original_runs = log.count_where(|t| t.graph == GraphTag::Original);
        summary.synopsis_runs = log.count_where(|t| t.graph == GraphTag::Synopsis);
        summary.failed_trials = log.count_where(|t| !t.succeeded());
        let best_trial = best.map(|i| &log.trials()[i]);
        Self {
            best: best_trial.map(|t| t.config.clone()),
            best_performance: best_trial.and_then(|t| t.performance),
            best_trial: best,
            log,
            summary,
        }
    }
}
