//! The two-phase tuner.
//!
//! 1. Time one run of the embedder on the original graph (`t_G`).
//! 2. Build the synopsis chain and pick the selected synopsis (similarity `α`).
//! 3. Split the budget into `r` synopsis runs and `⌊R/2⌋` validation runs.
//! 4. Phase 1: Latin-hypercube sample `r` configurations on the synopsis,
//!    trim the space around the best by `α`, then sample `⌊R/2⌋`
//!    configurations in the trimmed space on the original graph.
//! 5. Phase 2: while at least `t_G` remains, trim again around the incumbent
//!    and spend the remainder on further original-graph runs.

use std::time::{Duration, Instant};

use log::{info, warn};

use super::budget::{compute_rounds, nanos, BudgetReport, Ratio};
use super::lhs::lhs_sample;
use super::runner::{BudgetSpec, Runner, ROUND_UNIT};
use super::space::{Configuration, HyperparameterSpace};
use super::task::{TaskData, TaskSettings};
use super::trial::{GraphTag, Phase, TrialLog};
use super::trim::trim_space;
use super::{LevelSummary, RunSummary, TuneError, TuneOutcome};
use crate::coarsen::{build_chain_with, ChainConfig, DEFAULT_COSINE_THRESHOLD, DEFAULT_TAU};
use crate::embed::{runtime_ratio, Embedder};
use crate::rng::{derive_seed, stream};

/// Upper bound on refinement iterations, a guard against clocks that stop.
const MAX_REFINE_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JituneOptions {
    pub budget: BudgetSpec,
    pub tau: f64,
    pub attributed: bool,
    pub cosine_threshold: f64,
    pub workers: usize,
    pub seed: u64,
    /// Stop after the synopsis phase and validate only its best
    /// configuration on the original graph.
    pub synopsis_only: bool,
}

impl JituneOptions {
    pub fn new(budget: BudgetSpec, seed: u64) -> Self {
        Self {
            budget,
            tau: DEFAULT_TAU,
            attributed: false,
            cosine_threshold: DEFAULT_COSINE_THRESHOLD,
            workers: 1,
            seed,
            synopsis_only: false,
        }
    }
}

fn best_original(log: &TrialLog) -> Option<usize> {
    log.best_where(|t| matches!(t.phase, Phase::Original | Phase::Refine))
        .or_else(|| log.best_where(|t| t.phase == Phase::Timing))
        .map(|t| t.index)
}

fn lhs_or_empty(space: &HyperparameterSpace, count: u64, seed: u64) -> Vec<Configuration> {
    if count == 0 {
        Vec::new()
    } else {
        lhs_sample(space, count as usize, seed).expect("count is positive")
    }
}

pub fn tune_jitune(
    embedder: &dyn Embedder,
    data: &TaskData,
    settings: &TaskSettings,
    opts: &JituneOptions,
) -> Result<TuneOutcome, TuneError> {
    let charged = matches!(opts.budget, BudgetSpec::Rounds(_));
    let mut runner = Runner::new(embedder, settings, charged, opts.workers, opts.seed);
    let mut summary = RunSummary::new("jitune", charged);
    let space = embedder.descriptor().space.clone();
    let lhs_seed = derive_seed(opts.seed, stream::LHS);

    // (a) timing run
    let timing = runner.run_batch(Phase::Timing, GraphTag::Original, data, &[space.center()], ROUND_UNIT);
    let mut t_g = if charged {
        ROUND_UNIT
    } else {
        Duration::from_secs_f64(runner.log.trials()[timing.start].elapsed_secs).max(Duration::from_nanos(1))
    };
    let total = match opts.budget {
        BudgetSpec::Duration(d) => d,
        BudgetSpec::Rounds(n) => nanos(t_g.as_nanos() * n as u128),
    };

    // (b) synopsis chain
    let chain_start = Instant::now();
    let chain_config = ChainConfig {
        tau: opts.tau,
        attributed: opts.attributed,
        cosine_threshold: opts.cosine_threshold,
        seed: derive_seed(opts.seed, stream::COARSEN),
    };
    let mut synopsis = None;
    match build_chain_with(&data.graph, &chain_config) {
        Ok(chain) => {
            summary.chain = chain
                .members
                .iter()
                .map(|m| LevelSummary {
                    level: m.level,
                    nodes: m.graph.node_count(),
                    edges: m.graph.edge_count(),
                    alpha: m.alpha,
                    delta_w: m.delta_w,
                })
                .collect();
            let selected = chain.selected().clone();
            let syn_seed = derive_seed(opts.seed, stream::SYNOPSIS_SPLIT);
            match TaskData::prepare(&selected.graph, settings, syn_seed) {
                Ok(syn_data) => {
                    summary.selected_level = Some(selected.level);
                    summary.alpha = Some(selected.alpha);
                    synopsis = Some((selected, syn_data));
                }
                Err(e) => {
                    warn!("synopsis unusable for the task ({e}); tuning on the original graph only");
                    summary.notes.push(format!("synopsis unusable: {e}"));
                }
            }
        }
        Err(e) => {
            warn!("coarsening failed ({e}); tuning on the original graph only");
            summary.notes.push(format!("coarsening failed: {e}"));
        }
    }
    summary.coarsen_secs = chain_start.elapsed().as_secs_f64();

    // (c) budget split
    let rho = synopsis
        .as_ref()
        .map(|(s, _)| runtime_ratio(embedder.descriptor().complexity_class, &data.graph, &s.graph))
        .unwrap_or(Ratio::ONE);
    let mut budget = compute_rounds(total, t_g, rho)?;
    if synopsis.is_none() {
        budget.synopsis_rounds = 0;
    }
    summary.rho = synopsis.as_ref().map(|_| rho.to_f64());
    summary.budget = Some(BudgetReport::from(&budget));
    info!(
        "budget: T={:?} t_G={:?} R={} r={} rho={}",
        total, t_g, budget.original_rounds, budget.synopsis_rounds, rho
    );
    let alpha = synopsis
        .as_ref()
        .map(|(s, _)| s.alpha)
        .filter(|a| *a > 0.0 && *a < 1.0)
        .unwrap_or(opts.tau);
    summary.trim_factor = Some(alpha);

    // (d) phase 1 on the synopsis
    let mut space1 = space.clone();
    if let Some((_, syn_data)) = &synopsis {
        let configs = lhs_or_empty(&space, budget.synopsis_rounds, derive_seed(lhs_seed, 0));
        let validation = nanos(t_g.as_nanos() * budget.validation_rounds() as u128);
        let limit = total.saturating_sub(validation);
        runner.run_admitted(Phase::Synopsis, GraphTag::Synopsis, syn_data, &configs, rho.scale(t_g), limit);
        if let Some(best) = runner.log.best_where(|t| t.graph == GraphTag::Synopsis) {
            let best = best.config.clone();
            if opts.synopsis_only {
                runner.run_batch(Phase::Original, GraphTag::Original, data, &[best], t_g);
                let best = best_original(&runner.log);
                return Ok(finish(runner, summary, best));
            }
            space1 = trim_space(&space, &best, alpha).expect("best lies in the space it was sampled from");
        }
    }

    // (d) phase 1 validation on the original graph
    let configs = lhs_or_empty(&space1, budget.validation_rounds(), derive_seed(lhs_seed, 1));
    runner.run_admitted(Phase::Original, GraphTag::Original, data, &configs, t_g, total + t_g);

    // (e) phase 2 refinement
    let mut current = space1;
    for iteration in 0..MAX_REFINE_ITERATIONS {
        let remaining = total.saturating_sub(runner.now());
        if remaining < t_g {
            break;
        }
        let r_extra = (remaining.as_nanos() / t_g.as_nanos()) as u64;
        if let Some(i) = best_original(&runner.log) {
            let incumbent = current.clamp(&runner.log.trials()[i].config);
            current = trim_space(&current, &incumbent, alpha).expect("clamped incumbent lies in the space");
        }
        let configs = lhs_or_empty(&current, r_extra, derive_seed(lhs_seed, 2 + iteration as u64));
        let ran = runner.run_admitted(Phase::Refine, GraphTag::Original, data, &configs, t_g, total + t_g);
        summary.refine_rounds += r_extra;
        if ran == 0 {
            break;
        }
        if !charged {
            let runs: Vec<f64> = runner
                .log
                .trials()
                .iter()
                .filter(|t| t.graph == GraphTag::Original)
                .map(|t| t.elapsed_secs)
                .collect();
            let mean = runs.iter().sum::<f64>() / runs.len() as f64;
            t_g = Duration::from_secs_f64(mean).max(Duration::from_nanos(1));
        }
    }

    let best = best_original(&runner.log);
    Ok(finish(runner, summary, best))
}

fn finish(runner: Runner<'_>, mut summary: RunSummary, best: Option<usize>) -> TuneOutcome {
    summary.wall_secs = runner.wall_secs();
    summary.clock_secs = runner.now().as_secs_f64();
    TuneOutcome::finish(runner.log, summary, best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::Spectral;
    use crate::eval::Task;
    use crate::tune::is_subspace;

    fn setup() -> (crate::Graph, TaskSettings) {
        let g = crate::synthetic::stochastic_block_model(&[60, 60], 0.15, 0.02, 3);
        (g, TaskSettings::new(Task::LinkPrediction))
    }

    #[test]
    fn rounds_budget_follows_the_split() {
        let (g, settings) = setup();
        let data = TaskData::prepare(&g, &settings, 1).unwrap();
        let emb = Spectral::new(8);
        let out = tune_jitune(&emb, &data, &settings, &JituneOptions::new(BudgetSpec::Rounds(12), 5)).unwrap();
        let b = out.summary.budget.as_ref().unwrap();
        assert_eq!(b.original_rounds, 12);
        let log = &out.log;
        assert_eq!(log.trials()[0].phase, Phase::Timing);
        assert_eq!(log.count_where(|t| t.phase == Phase::Synopsis) as u64, b.synopsis_rounds);
        assert_eq!(log.count_where(|t| t.phase == Phase::Original) as u64, b.validation_rounds);
        assert!(out.summary.original_runs as u64 <= 1 + b.validation_rounds + out.summary.refine_rounds);
        assert!(out.summary.clock_secs <= 12.0 + 1e-9);
        assert!(out.best.is_some());
    }

    #[test]
    fn deterministic_across_workers() {
        let (g, settings) = setup();
        let data = TaskData::prepare(&g, &settings, 1).unwrap();
        let emb = Spectral::new(8);
        let mut opts = JituneOptions::new(BudgetSpec::Rounds(10), 9);
        let a = tune_jitune(&emb, &data, &settings, &opts).unwrap();
        opts.workers = 4;
        let b = tune_jitune(&emb, &data, &settings, &opts).unwrap();
        assert_eq!(a.log, b.log);
        assert_eq!(a.best, b.best);
    }

    #[test]
    fn validation_configs_lie_in_the_trimmed_space() {
        let (g, settings) = setup();
        let data = TaskData::prepare(&g, &settings, 1).unwrap();
        let emb = Spectral::new(8);
        let out = tune_jitune(&emb, &data, &settings, &JituneOptions::new(BudgetSpec::Rounds(16), 2)).unwrap();
        let best_syn = out.log.best_where(|t| t.graph == GraphTag::Synopsis).unwrap();
        let alpha = out.summary.trim_factor.unwrap();
        let space = emb.descriptor().space.clone();
        let trimmed = trim_space(&space, &best_syn.config, alpha).unwrap();
        assert!(is_subspace(&trimmed, &space));
        for t in out.log.trials().iter().filter(|t| t.phase == Phase::Original) {
            assert!(trimmed.contains(&t.config), "{:?}", t.config);
        }
    }

    #[test]
    fn tiny_budget_skips_the_synopsis() {
        let (g, settings) = setup();
        let data = TaskData::prepare(&g, &settings, 1).unwrap();
        let emb = Spectral::new(8);
        let out = tune_jitune(&emb, &data, &settings, &JituneOptions::new(BudgetSpec::Rounds(2), 2)).unwrap();
        assert_eq!(out.summary.budget.as_ref().unwrap().synopsis_rounds, 0);
        assert_eq!(out.log.count_where(|t| t.graph == GraphTag::Synopsis), 0);
        assert_eq!(out.log.count_where(|t| t.phase == Phase::Original), 1);
        assert!(matches!(
            tune_jitune(&emb, &data, &settings, &JituneOptions::new(BudgetSpec::Rounds(1), 2)),
            Err(TuneError::Budget(_))
        ));
    }

    #[test]
    fn wall_budget_is_respected() {
        let (g, settings) = setup();
        let data = TaskData::prepare(&g, &settings, 1).unwrap();
        let emb = Spectral::new(8);
        let budget = Duration::from_millis(400);
        let start = Instant::now();
        let out = tune_jitune(&emb, &data, &settings, &JituneOptions::new(BudgetSpec::Duration(budget), 2));
        let took = start.elapsed();
        if let Ok(out) = out {
            assert!(out.best.is_some());
        }
        assert!(took < budget.mul_f64(1.3) + Duration::from_millis(100), "{took:?}");
    }
}
