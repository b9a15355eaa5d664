//! DeepWalk-style embedding: truncated uniform random walks fed to a
//! skip-gram model trained with negative sampling.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;

use super::{check_dim, ComplexityClass, EmbedError, Embedder, EmbedderDescriptor, EmbedderKind, EmbeddingMatrix};
use crate::graph::Graph;
use crate::rng;
use crate::tune::{Configuration, Dim, HyperparameterSpace};

const NEGATIVES: usize = 5;
const START_LR: f64 = 0.025;
const MIN_LR_FRACTION: f64 = 1e-4;

pub struct DeepWalk {
    descriptor: EmbedderDescriptor,
}

/// Counters from one walk-generation pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WalkStats {
    pub walks: usize,
    /// Total nodes visited over all walks, start nodes included.
    pub steps: usize,
}

impl DeepWalk {
    pub fn new() -> Self {
        let space = HyperparameterSpace::new(vec![
            Dim::int("num_walks", 40, 100),
            Dim::int("walk_length", 20, 80),
            Dim::int("window", 5, 30),
            Dim::int("dim", 40, 256),
        ])
        .expect("static space is valid");
        Self {
            descriptor: EmbedderDescriptor {
                name: "deepwalk".into(),
                space,
                complexity_class: ComplexityClass::VLogV,
                kind: EmbedderKind::Native,
            },
        }
    }
}

impl Default for DeepWalk {
    fn default() -> Self {
        Self::new()
    }
}

/// `num_walks` rounds, each starting one walk from every node in a freshly
/// shuffled order. A walk holds up to `walk_length` nodes and ends early at a
/// node without neighbors.
pub fn generate_walks<R: Rng>(
    graph: &Graph,
    num_walks: usize,
    walk_length: usize,
    rng: &mut R,
) -> (Vec<Vec<usize>>, WalkStats) {
    let mut order: Vec<usize> = (0..graph.node_count()).collect();
    let mut walks = Vec::with_capacity(num_walks * order.len());
    let mut stats = WalkStats::default();
    for _ in 0..num_walks {
        order.shuffle(rng);
        for &start in &order {
            let mut walk = Vec::with_capacity(walk_length);
            walk.push(start);
            let mut at = start;
            while walk.len() < walk_length {
                let nbrs = graph.neighbors(at);
                if nbrs.is_empty() {
                    break;
                }
                at = nbrs[rng.gen_range(0..nbrs.len())].0;
                walk.push(at);
            }
            stats.walks += 1;
            stats.steps += walk.len();
            walks.push(walk);
        }
    }
    (walks, stats)
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// One pass of skip-gram with negative sampling over `walks`, returning the
/// input vectors. Negatives are drawn from the walk-frequency distribution
/// raised to 0.75; the step size decays linearly from 0.025.
fn train_skipgram<R: Rng>(
    node_count: usize,
    walks: &[Vec<usize>],
    window: usize,
    dim: usize,
    rng: &mut R,
) -> Vec<f64> {
    let mut input: Vec<f64> = (0..node_count * dim)
        .map(|_| (rng.gen::<f64>() - 0.5) / dim as f64)
        .collect();
    let mut output = vec![0.0; node_count * dim];

    let mut counts = vec![0usize; node_count];
    for w in walks {
        for &v in w {
            counts[v] += 1;
        }
    }
    let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
    let negatives = WeightedIndex::new(&weights).expect("every node starts at least one walk");

    let total: usize = walks.iter().map(Vec::len).sum();
    let mut processed = 0usize;
    let mut grad = vec![0.0; dim];
    for walk in walks {
        for (i, &center) in walk.iter().enumerate() {
            let lr = START_LR * (1.0 - processed as f64 / total as f64).max(MIN_LR_FRACTION);
            processed += 1;
            let lo = i.saturating_sub(window);
            let hi = (i + window + 1).min(walk.len());
            for (j, &context) in walk.iter().enumerate().take(hi).skip(lo) {
                if j == i {
                    continue;
                }
                grad.iter_mut().for_each(|g| *g = 0.0);
                let h = &input[center * dim..(center + 1) * dim];
                for k in 0..=NEGATIVES {
                    let (target, label) = if k == 0 {
                        (context, 1.0)
                    } else {
                        let t = negatives.sample(rng);
                        if t == context {
                            continue;
                        }
                        (t, 0.0)
                    };
                    let out = &mut output[target * dim..(target + 1) * dim];
                    let dot: f64 = h.iter().zip(out.iter()).map(|(a, b)| a * b).sum();
                    let g = (label - sigmoid(dot)) * lr;
                    for d in 0..dim {
                        grad[d] += g * out[d];
                        out[d] += g * h[d];
                    }
                }
                let h = &mut input[center * dim..(center + 1) * dim];
                for d in 0..dim {
                    h[d] += grad[d];
                }
            }
        }
    }
    input
}

impl Embedder for DeepWalk {
    fn descriptor(&self) -> &EmbedderDescriptor {
        &self.descriptor
    }

    fn embed(&self, graph: &Graph, config: &Configuration, seed: u64) -> Result<EmbeddingMatrix, EmbedError> {
        let dim = check_dim(config.int("dim")?)?;
        if graph.node_count() == 0 {
            return Err(EmbedError::EmptyGraph);
        }
        let num_walks = config.int("num_walks")?.max(1) as usize;
        let walk_length = config.int("walk_length")?.max(1) as usize;
        let window = config.int("window")?.max(1) as usize;
        let mut rng = rng::seeded(seed);
        let (walks, _) = generate_walks(graph, num_walks, walk_length, &mut rng);
        let values = train_skipgram(graph.node_count(), &walks, window, dim, &mut rng);
        EmbeddingMatrix::new(graph.node_count(), dim, values)
    }
}
