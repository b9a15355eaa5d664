//! Bayesian-optimization baseline: a Gaussian-process surrogate over the
//! normalized search space with expected-improvement acquisition.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use super::runner::{Runner, ROUND_UNIT};
use super::space::{Configuration, DimKind, HyperparameterSpace, Value};
use super::task::{TaskData, TaskSettings};
use super::trial::{GraphTag, Phase};
use super::{RunSummary, TuneError, TuneOutcome};
use crate::embed::Embedder;
use crate::rng::{self, derive_seed, stream};

pub const DEFAULT_GP_INIT: u64 = 5;
const LENGTH_SCALE: f64 = 0.2;
const NOISE: f64 = 1e-6;
const CANDIDATES: usize = 1024;

/// Maps a configuration into `[0, 1]` per numeric dim (log-aware) and a
/// one-hot block per categorical dim.
pub fn encode(space: &HyperparameterSpace, config: &Configuration) -> Vec<f64> {
    let mut out = Vec::new();
    for d in space.dims() {
        let v = config.get(&d.name);
        match &d.kind {
            DimKind::Numeric { .. } => {
                out.push(v.and_then(|v| d.unit_position(v)).unwrap_or(0.5).clamp(0.0, 1.0));
            }
            DimKind::Categorical { choices } => {
                for c in choices {
                    out.push(matches!(v, Some(Value::Choice(x)) if x == c) as u8 as f64);
                }
            }
        }
    }
    out
}

fn rbf(a: &[f64], b: &[f64]) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-d2 / (2.0 * LENGTH_SCALE * LENGTH_SCALE)).exp()
}

/// GP regression on standardized targets with an RBF kernel.
pub struct GaussianProcess {
    points: Vec<Vec<f64>>,
    chol: Cholesky<f64, Dyn>,
    weights: DVector<f64>,
    y_mean: f64,
    y_scale: f64,
}

impl GaussianProcess {
    pub fn fit(points: Vec<Vec<f64>>, y: &[f64]) -> Option<Self> {
        let n = points.len();
        if n == 0 || n != y.len() {
            return None;
        }
        let y_mean = y.iter().sum::<f64>() / n as f64;
        let var = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum::<f64>() / n as f64;
        let y_scale = if var > 0.0 { var.sqrt() } else { 1.0 };
        let target = DVector::from_iterator(n, y.iter().map(|v| (v - y_mean) / y_scale));
        let mut jitter = NOISE;
        while jitter < 1.0 {
            let k = DMatrix::from_fn(n, n, |i, j| rbf(&points[i], &points[j]) + if i == j { jitter } else { 0.0 });
            if let Some(chol) = Cholesky::new(k) {
                let weights = chol.solve(&target);
                return Some(Self {
                    points,
                    chol,
                    weights,
                    y_mean,
                    y_scale,
                });
            }
            jitter *= 10.0;
        }
        None
    }

    /// Posterior mean and standard deviation in the original target units.
    pub fn predict(&self, x: &[f64]) -> (f64, f64) {
        let k = DVector::from_iterator(self.points.len(), self.points.iter().map(|p| rbf(p, x)));
        let mean = k.dot(&self.weights);
        let v = self.chol.l().solve_lower_triangular(&k).expect("triangular factor is invertible");
        let var = (1.0 - v.dot(&v)).max(0.0);
        (self.y_mean + self.y_scale * mean, self.y_scale * var.sqrt())
    }
}

/// `E[max(f − best, 0)]` for `f ~ N(mean, sd²)`; never negative.
pub fn expected_improvement(mean: f64, sd: f64, best: f64) -> f64 {
    let gain = mean - best;
    if sd <= 1e-12 {
        return gain.max(0.0);
    }
    let z = gain / sd;
    let n = Normal::standard();
    (gain * n.cdf(z) + sd * n.pdf(z)).max(0.0)
}

/// `init` uniform random runs, then one run per round at the candidate of
/// highest expected improvement among 1024 uniform draws. Failed trials are
/// left out of the surrogate.
pub fn tune_gp(
    embedder: &dyn Embedder,
    data: &TaskData,
    settings: &TaskSettings,
    rounds: u64,
    init: u64,
    seed: u64,
) -> Result<TuneOutcome, TuneError> {
    if rounds <= init {
        return Err(TuneError::TooFewRounds { rounds, init });
    }
    let space = &embedder.descriptor().space;
    let mut rng = rng::seeded(derive_seed(seed, stream::GP));
    let mut runner = Runner::new(embedder, settings, true, 1, seed);
    let initial: Vec<Configuration> = (0..init).map(|_| space.sample_uniform(&mut rng)).collect();
    runner.run_batch(Phase::GpInit, GraphTag::Original, data, &initial, ROUND_UNIT);

    for _ in init..rounds {
        let observed: Vec<_> = runner.log.trials().iter().filter(|t| t.succeeded()).collect();
        let candidates: Vec<Configuration> = (0..CANDIDATES).map(|_| space.sample_uniform(&mut rng)).collect();
        let points: Vec<Vec<f64>> = observed.iter().map(|t| encode(space, &t.config)).collect();
        let y: Vec<f64> = observed.iter().map(|t| t.score()).collect();
        let next = match GaussianProcess::fit(points, &y) {
            Some(gp) => {
                let best = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut pick = 0;
                let mut pick_ei = f64::NEG_INFINITY;
                for (i, c) in candidates.iter().enumerate() {
                    let (m, s) = gp.predict(&encode(space, c));
                    let ei = expected_improvement(m, s, best);
                    debug_assert!(ei >= 0.0);
                    if ei > pick_ei {
                        pick = i;
                        pick_ei = ei;
                    }
                }
                candidates[pick].clone()
            }
            None => candidates[0].clone(),
        };
        runner.run_batch(Phase::Gp, GraphTag::Original, data, &[next], ROUND_UNIT);
    }

    let mut summary = RunSummary::new("gp", true);
    summary.wall_secs = runner.wall_secs();
    summary.clock_secs = runner.now().as_secs_f64();
    let best = runner.log.best_where(|_| true).map(|t| t.index);
    Ok(TuneOutcome::finish(runner.log, summary, best))
}
