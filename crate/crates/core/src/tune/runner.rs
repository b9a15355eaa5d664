//! Shared trial execution: the tuner clock, budget admission and parallel
//! batches whose results land in the log in index order.

use std::ops::Range;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use log::debug;

use super::space::Configuration;
use super::task::{TaskData, TaskSettings};
use super::trial::{GraphTag, Phase, Trial, TrialLog, TrialStatus};
use crate::embed::Embedder;
use crate::rng::{derive_seed, stream};

/// Charged cost of one original-graph run under a round-count budget.
pub const ROUND_UNIT: Duration = Duration::from_secs(1);

/// How the tuning budget is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetSpec {
    /// Wall-clock limit, enforced with a monotonic clock.
    Duration(Duration),
    /// A count of original-graph-run equivalents. Runs are charged rather
    /// than timed (one unit per original run, `ρ` units per synopsis run),
    /// which makes the whole tuning trace reproducible.
    Rounds(u64),
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Clock {
    Charged { used: Duration },
    Wall { start: Instant },
}

struct Outcome {
    performance: Result<f64, String>,
    elapsed: Duration,
    finished: Duration,
}

pub(crate) struct Runner<'a> {
    pub embedder: &'a dyn Embedder,
    pub settings: &'a TaskSettings,
    pub workers: usize,
    pub seed: u64,
    pub clock: Clock,
    pub log: TrialLog,
    started: Instant,
}

impl<'a> Runner<'a> {
    pub fn new(embedder: &'a dyn Embedder, settings: &'a TaskSettings, charged: bool, workers: usize, seed: u64) -> Self {
        let started = Instant::now();
        Self {
            embedder,
            settings,
            workers: workers.max(1),
            seed,
            clock: if charged {
                Clock::Charged { used: Duration::ZERO }
            } else {
                Clock::Wall { start: started }
            },
            log: TrialLog::new(),
            started,
        }
    }

    pub fn now(&self) -> Duration {
        match self.clock {
            Clock::Charged { used } => used,
            Clock::Wall { start } => start.elapsed(),
        }
    }

    pub fn wall_secs(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }

    /// How many of `wanted` runs, each expected to take `cost`, may start now
    /// so that each completes by `limit`.
    pub fn admit(&self, wanted: usize, cost: Duration, limit: Duration) -> usize {
        match self.clock {
            Clock::Charged { used } => {
                let mut n = 0;
                let mut t = used;
                while n < wanted && t + cost <= limit {
                    t += cost;
                    n += 1;
                }
                n
            }
            Clock::Wall { .. } => {
                if self.now() + cost <= limit {
                    wanted.min(self.workers)
                } else {
                    0
                }
            }
        }
    }

    fn trial_seed(&self, index: usize) -> u64 {
        derive_seed(derive_seed(self.seed, stream::TRIAL), index as u64)
    }

    /// Runs every config (in parallel up to the worker count) and appends the
    /// trials in index order. `cost` is the charge per run on a charged clock.
    pub fn run_batch(
        &mut self,
        phase: Phase,
        graph: GraphTag,
        data: &TaskData,
        configs: &[Configuration],
        cost: Duration,
    ) -> Range<usize> {
        let base = self.log.len();
        let seeds: Vec<u64> = (0..configs.len()).map(|i| self.trial_seed(base + i)).collect();
        let embedder = self.embedder;
        let settings = self.settings;
        let origin = self.started;
        let execute = |i: usize| -> Outcome {
            let t0 = Instant::now();
            let performance = embedder
                .embed(&data.graph, &configs[i], seeds[i])
                .map_err(|e| format!("embed: {e}"))
                .and_then(|emb| {
                    data.evaluate(settings, &emb)
                        .map(|r| r.value)
                        .map_err(|e| format!("eval: {e}"))
                });
            Outcome {
                performance,
                elapsed: t0.elapsed(),
                finished: origin.elapsed(),
            }
        };

        let threads = self.workers.min(configs.len());
        let outcomes: Vec<Outcome> = if threads <= 1 {
            (0..configs.len()).map(execute).collect()
        } else {
            let next = AtomicUsize::new(0);
            let slots: Mutex<Vec<Option<Outcome>>> = Mutex::new((0..configs.len()).map(|_| None).collect());
            std::thread::scope(|scope| {
                for _ in 0..threads {
                    scope.spawn(|| loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= configs.len() {
                            break;
                        }
                        let out = execute(i);
                        slots.lock().expect("no worker panicked")[i] = Some(out);
                    });
                }
            });
            slots
                .into_inner()
                .expect("no worker panicked")
                .into_iter()
                .map(|o| o.expect("every slot filled"))
                .collect()
        };

        let metric = self.settings.metric();
        for (i, (out, config)) in outcomes.into_iter().zip(configs).enumerate() {
            let (elapsed, at) = match &mut self.clock {
                Clock::Charged { used } => {
                    *used += cost;
                    (cost, *used)
                }
                Clock::Wall { start } => {
                    let at = out.finished.saturating_sub(start.duration_since(origin));
                    (out.elapsed, at)
                }
            };
            let at_secs = at.as_secs_f64().max(self.log.last_at());
            let (performance, status, error) = match out.performance {
                Ok(p) => (Some(p), TrialStatus::Ok, None),
                Err(e) => (None, TrialStatus::Failed, Some(e)),
            };
            debug!(
                "trial {} [{}] {:?}: {:?}{}",
                base + i,
                phase.as_str(),
                graph,
                performance,
                error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default()
            );
            self.log.push(Trial {
                index: base + i,
                phase,
                graph,
                config: config.clone(),
                performance,
                metric,
                status,
                error,
                elapsed_secs: elapsed.as_secs_f64(),
                at_secs,
                seed: seeds[i],
            });
        }
        base..self.log.len()
    }

    /// Admits and runs configs batch by batch until they are exhausted or
    /// the next batch would finish after `limit`. Returns the number run.
    pub fn run_admitted(
        &mut self,
        phase: Phase,
        graph: GraphTag,
        data: &TaskData,
        configs: &[Configuration],
        cost: Duration,
        limit: Duration,
    ) -> usize {
        let mut done = 0;
        while done < configs.len() {
            let n = self.admit(configs.len() - done, cost, limit);
            if n == 0 {
                break;
            }
            self.run_batch(phase, graph, data, &configs[done..done + n], cost);
            done += n;
        }
        done
    }
}
