use std::collections::HashSet;

use rand::seq::index;
use rand::Rng;

use super::{Edge, Graph, GraphError};
use crate::rng;

/// A link-prediction holdout: the residual training graph plus equally many
/// held-out edges and sampled non-edges.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSplit {
    pub train_graph: Graph,
    pub test_positive: Vec<Edge>,
    pub test_negative: Vec<(usize, usize)>,
    pub holdout_fraction: f64,
    pub seed: u64,
}

/// Holds out `round(fraction·|E|)` edges uniformly at random and samples the
/// same number of node pairs that are not edges of the original graph.
pub fn split_edges(graph: &Graph, holdout_fraction: f64, seed: u64) -> Result<EdgeSplit, GraphError> {
    if !(holdout_fraction > 0.0 && holdout_fraction < 1.0) {
        return Err(GraphError::InvalidFraction(holdout_fraction));
    }
    let m = graph.edge_count();
    let required = (1.0 / holdout_fraction).ceil() as usize;
    if m < required {
        return Err(GraphError::TooFewEdges { edges: m, required });
    }
    let k = (holdout_fraction * m as f64).round() as usize;
    let n = graph.node_count();
    let pairs = (n as u128) * (n as u128).saturating_sub(1) / 2;
    let available = pairs - m as u128;
    if available < k as u128 {
        return Err(GraphError::NotEnoughNonEdges { needed: k, available });
    }

    let mut rng = rng::seeded(seed);
    let mut held: Vec<usize> = index::sample(&mut rng, m, k).into_vec();
    held.sort_unstable();
    let mut is_held = vec![false; m];
    for &i in &held {
        is_held[i] = true;
    }
    let edges = graph.edges();
    let test_positive: Vec<Edge> = held.iter().map(|&i| edges[i]).collect();
    let train_edges: Vec<Edge> = edges
        .iter()
        .zip(&is_held)
        .filter(|(_, &h)| !h)
        .map(|(e, _)| *e)
        .collect();

    let test_negative = if available <= 4 * k as u128 {
        // dense graph: enumerate the non-edge pool and sample from it
        let mut pool = Vec::with_capacity(available as usize);
        for u in 0..n {
            for v in u + 1..n {
                if !graph.has_edge(u, v) {
                    pool.push((u, v));
                }
            }
        }
        let mut picks = index::sample(&mut rng, pool.len(), k).into_vec();
        picks.sort_unstable();
        picks.into_iter().map(|i| pool[i]).collect()
    } else {
        let mut seen = HashSet::with_capacity(k);
        let mut out = Vec::with_capacity(k);
        while out.len() < k {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a == b {
                continue;
            }
            let pair = (a.min(b), a.max(b));
            if graph.has_edge(pair.0, pair.1) || !seen.insert(pair) {
                continue;
            }
            out.push(pair);
        }
        out
    };

    Ok(EdgeSplit {
        train_graph: graph.with_edges_like(train_edges),
        test_positive,
        test_negative,
        holdout_fraction,
        seed,
    })
}
