use super::runner::{Runner, ROUND_UNIT};
use super::task::{TaskData, TaskSettings};
use super::trial::{GraphTag, Phase};
use super::{RunSummary, TuneOutcome};
use crate::embed::Embedder;
use crate::rng::{self, derive_seed, stream};

/// Random search: `rounds` independent uniform draws from the embedder's
/// space, each run on the original graph. Draws are fixed up front, so the
/// trial sequence depends only on `seed`.
pub fn tune_random(
    embedder: &dyn Embedder,
    data: &TaskData,
    settings: &TaskSettings,
    rounds: u64,
    seed: u64,
    workers: usize,
) -> TuneOutcome {
    let space = &embedder.descriptor().space;
    let mut rng = rng::seeded(derive_seed(seed, stream::RANDOM_SEARCH));
    let configs: Vec<_> = (0..rounds).map(|_| space.sample_uniform(&mut rng)).collect();
    let mut runner = Runner::new(embedder, settings, true, workers, seed);
    runner.run_batch(Phase::Random, GraphTag::Original, data, &configs, ROUND_UNIT);
    let mut summary = RunSummary::new("random", true);
    summary.wall_secs = runner.wall_secs();
    summary.clock_secs = runner.now().as_secs_f64();
    let best = runner.log.best_where(|_| true).map(|t| t.index);
    TuneOutcome::finish(runner.log, summary, best)
}
