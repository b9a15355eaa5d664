//! Seeded random graph generators.

use rand::Rng;

use crate::graph::{Graph, LabelSet};
use crate::rng;

/// G(n, p) with unit weights.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = rng::seeded(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::unweighted(n, &edges)
}

/// Stochastic block model with unit weights. Each node is labeled with its
/// block index.
pub fn stochastic_block_model(block_sizes: &[usize], p_in: f64, p_out: f64, seed: u64) -> Graph {
    let n: usize = block_sizes.iter().sum();
    let block: Vec<usize> = block_sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &size)| std::iter::repeat_n(b, size))
        .collect();
    let mut rng = rng::seeded(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if block[u] == block[v] { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let labels = block
        .iter()
        .map(|&b| LabelSet::from([b as u32]))
        .collect();
    Graph::unweighted(n, &edges).with_labels(labels)
}
