//! Hierarchical graph synopses.
//!
//! Each level pairs nodes (star pass, then edge pass; or structural
//! equivalence plus attribute similarity for attributed graphs), collapses
//! every group into one node and re-wires edges by summing weights. Edges
//! inside a group disappear and their weight is recorded as `delta_w`, so
//! `W_parent = W' + ΔW` holds per level.
//!
//! Similarity to the original graph is the size ratio `α = |V'| / |V|`. A
//! chain keeps coarsening while `α` stays at or above the threshold and
//! selects the deepest member that still satisfies it.

mod extend;
mod lift;
mod matching;

use std::io::{BufRead, Write};

use rand::Rng;
use thiserror::Error;

use crate::graph::{Attributes, Graph, LabelSet};
use crate::rng;

pub use extend::{extend_synopsis, kl_divergence, ExtendedSynopsis};
pub use lift::lift_embeddings;
pub use matching::{
    cosine, edge_collapse, star_collapse, structural_equivalence_groups, Pairing,
};

pub const DEFAULT_TAU: f64 = 0.5;
pub const DEFAULT_COSINE_THRESHOLD: f64 = 0.9;
pub const DEFAULT_KL_SMOOTHING: f64 = 1.0;

#[derive(Debug, Error)]
pub enum CoarsenError {
    #[error("graph has {0} nodes; coarsening needs at least 2")]
    TooSmall(usize),
    #[error("no node pair can be collapsed; the graph is collapse-stable")]
    CollapseStable,
    #[error("threshold must lie in (0, 1), got {0}")]
    InvalidThreshold(f64),
    #[error("attributed coarsening requires node attributes")]
    MissingAttributes,
    #[error("smoothing must be positive, got {0}")]
    InvalidSmoothing(f64),
    #[error("projection references synopsis node {node} but only {rows} embedding rows exist")]
    DimensionMismatch { node: usize, rows: usize },
    #[error("line {line}: malformed projection entry")]
    MalformedProjection { line: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A coarsened graph plus the map from original nodes onto its nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Synopsis {
    pub graph: Graph,
    /// `projection[v]` is the synopsis node that absorbed original node `v`.
    pub projection: Vec<usize>,
    pub level: usize,
    /// `|V'| / |V|` against the original graph.
    pub alpha: f64,
    pub parent_node_count: usize,
    /// Weight of the parent's edges that became internal at this level.
    pub delta_w: f64,
}

impl Synopsis {
    /// The trivial synopsis: the graph itself, nothing collapsed.
    pub fn identity(graph: &Graph) -> Self {
        Self {
            graph: graph.clone(),
            projection: (0..graph.node_count()).collect(),
            level: 0,
            alpha: 1.0,
            parent_node_count: graph.node_count(),
            delta_w: 0.0,
        }
    }

    pub fn original_node_count(&self) -> usize {
        self.projection.len()
    }

    /// Number of original nodes absorbed by each synopsis node.
    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.graph.node_count()];
        for &s in &self.projection {
            sizes[s] += 1;
        }
        sizes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynopsisChain {
    pub members: Vec<Synopsis>,
    pub tau: f64,
    pub selected: usize,
}

impl SynopsisChain {
    pub fn selected(&self) -> &Synopsis {
        &self.members[self.selected]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ChainConfig {
    pub tau: f64,
    pub attributed: bool,
    pub cosine_threshold: f64,
    pub seed: u64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            tau: DEFAULT_TAU,
            attributed: false,
            cosine_threshold: DEFAULT_COSINE_THRESHOLD,
            seed: 0,
        }
    }
}

pub fn similarity(synopsis: &Synopsis, original: &Graph) -> f64 {
    synopsis.graph.node_count() as f64 / original.node_count() as f64
}

/// One unattributed coarsening level: star pass, edge pass, collapse.
/// `alpha` and `projection` are relative to `graph`.
pub fn coarsen_level(graph: &Graph, seed: u64) -> Result<Synopsis, CoarsenError> {
    let n = graph.node_count();
    if n < 2 {
        return Err(CoarsenError::TooSmall(n));
    }
    let star = star_collapse(graph);
    let matched: Vec<bool> = star.iter().map(Option::is_some).collect();
    let edge = edge_collapse(graph, &matched);
    let leaders = matching::pairing_to_leaders(&[&star, &edge], n);
    collapse(graph, &leaders, seed)
}

/// Attributed coarsening level: nodes with identical neighbor sets are
/// grouped first, then remaining adjacent nodes are paired when the cosine
/// similarity of their attribute vectors reaches `cosine_threshold`.
/// Collapsed attributes are member means.
pub fn equivalence_collapse(
    graph: &Graph,
    cosine_threshold: f64,
    seed: u64,
) -> Result<Synopsis, CoarsenError> {
    let n = graph.node_count();
    if n < 2 {
        return Err(CoarsenError::TooSmall(n));
    }
    let attrs = graph.attributes().ok_or(CoarsenError::MissingAttributes)?;
    let mut leaders = structural_equivalence_groups(graph);
    let mut grouped = vec![false; n];
    for u in 0..n {
        if leaders[u] != u {
            grouped[u] = true;
            grouped[leaders[u]] = true;
        }
    }
    for e in graph.edges() {
        if !grouped[e.u]
            && !grouped[e.v]
            && cosine(attrs.row(e.u), attrs.row(e.v)) >= cosine_threshold
        {
            grouped[e.u] = true;
            grouped[e.v] = true;
            leaders[e.v] = e.u;
        }
    }
    collapse(graph, &leaders, seed)
}

/// Collapses groups given by `leaders` (each node's smallest group member).
/// Synopsis ids follow ascending leader order.
fn collapse(graph: &Graph, leaders: &[usize], seed: u64) -> Result<Synopsis, CoarsenError> {
    let n = graph.node_count();
    let mut projection = vec![usize::MAX; n];
    let mut count = 0;
    for u in 0..n {
        if leaders[u] == u {
            projection[u] = count;
            count += 1;
        } else {
            debug_assert!(leaders[u] < u);
            projection[u] = projection[leaders[u]];
        }
    }
    if count == n {
        return Err(CoarsenError::CollapseStable);
    }

    let mut delta_w = 0.0;
    let mut coarse_edges = Vec::with_capacity(graph.edge_count());
    for e in graph.edges() {
        let (a, b) = (projection[e.u], projection[e.v]);
        if a == b {
            delta_w += e.w;
        } else {
            coarse_edges.push((a, b, e.w));
        }
    }
    let (mut coarse, _) =
        Graph::from_edges(count, coarse_edges).expect("projected ids are in range");

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (u, &s) in projection.iter().enumerate() {
        members[s].push(u);
    }

    if let Some(labels) = graph.labels() {
        let mut rng = rng::seeded(seed);
        let merged = members
            .iter()
            .map(|group| merge_labels(group, labels, &mut rng))
            .collect();
        coarse = coarse.with_labels(merged);
    }
    if let Some(attrs) = graph.attributes() {
        let dim = attrs.dim();
        let mut values = Vec::with_capacity(count * dim);
        for group in &members {
            let mut mean = vec![0.0; dim];
            for &u in group {
                for (m, x) in mean.iter_mut().zip(attrs.row(u)) {
                    *m += x;
                }
            }
            values.extend(mean.into_iter().map(|m| m / group.len() as f64));
        }
        coarse = coarse.with_attributes(Attributes::new(dim, values));
    }

    Ok(Synopsis {
        alpha: count as f64 / n as f64,
        graph: coarse,
        projection,
        level: 1,
        parent_node_count: n,
        delta_w,
    })
}

/// Identical member label sets are kept; otherwise the label set of a
/// randomly chosen labeled member is adopted.
fn merge_labels<R: Rng>(group: &[usize], labels: &[LabelSet], rng: &mut R) -> LabelSet {
    let first = &labels[group[0]];
    if group.iter().all(|&u| &labels[u] == first) {
        return first.clone();
    }
    let labeled: Vec<usize> = group
        .iter()
        .copied()
        .filter(|&u| !labels[u].is_empty())
        .collect();
    labels[labeled[rng.gen_range(0..labeled.len())]].clone()
}

pub fn build_chain(
    graph: &Graph,
    tau: f64,
    attributed: bool,
    seed: u64,
) -> Result<SynopsisChain, CoarsenError> {
    build_chain_with(
        graph,
        &ChainConfig {
            tau,
            attributed,
            seed,
            ..ChainConfig::default()
        },
    )
}

/// Coarsens level after level until `α < τ` or a level fails to shrink. If no
/// member reaches `τ`, level 1 is selected anyway.
pub fn build_chain_with(graph: &Graph, config: &ChainConfig) -> Result<SynopsisChain, CoarsenError> {
    let tau = config.tau;
    if !(tau > 0.0 && tau < 1.0) {
        return Err(CoarsenError::InvalidThreshold(tau));
    }
    let n = graph.node_count();
    if n < 2 {
        return Err(CoarsenError::TooSmall(n));
    }
    let mut members: Vec<Synopsis> = Vec::new();
    let mut current = graph.clone();
    let mut projection: Vec<usize> = (0..n).collect();
    for level in 1.. {
        let level_seed = rng::derive_seed(config.seed, rng::stream::COARSEN + 16 * level as u64);
        let step = if config.attributed {
            equivalence_collapse(&current, config.cosine_threshold, level_seed)
        } else {
            coarsen_level(&current, level_seed)
        };
        let step = match step {
            Ok(s) => s,
            Err(CoarsenError::CollapseStable) | Err(CoarsenError::TooSmall(_)) => break,
            Err(e) => return Err(e),
        };
        projection = projection.iter().map(|&s| step.projection[s]).collect();
        let alpha = step.graph.node_count() as f64 / n as f64;
        let synopsis = Synopsis {
            projection: projection.clone(),
            level,
            alpha,
            parent_node_count: current.node_count(),
            delta_w: step.delta_w,
            graph: step.graph,
        };
        current = synopsis.graph.clone();
        members.push(synopsis);
        if alpha < tau {
            break;
        }
    }
    if members.is_empty() {
        return Err(CoarsenError::CollapseStable);
    }
    let selected = members.iter().rposition(|s| s.alpha >= tau).unwrap_or(0);
    Ok(SynopsisChain {
        members,
        tau,
        selected,
    })
}

/// Sidecar projection format: `original_id synopsis_id` per line.
pub fn write_projection<W: Write>(projection: &[usize], mut out: W) -> std::io::Result<()> {
    for (v, s) in projection.iter().enumerate() {
        writeln!(out, "{v} {s}")?;
    }
    Ok(())
}

pub fn read_projection<R: BufRead>(source: R) -> Result<Vec<usize>, CoarsenError> {
    let mut pairs = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let bad = || CoarsenError::MalformedProjection { line: idx + 1 };
        let mut it = t.split_whitespace();
        let v: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let s: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        if it.next().is_some() {
            return Err(bad());
        }
        pairs.push((idx + 1, v, s));
    }
    let mut projection = vec![usize::MAX; pairs.len()];
    for (line, v, s) in pairs {
        if v >= projection.len() || projection[v] != usize::MAX {
            return Err(CoarsenError::MalformedProjection { line });
        }
        projection[v] = s;
    }
    Ok(projection)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::connected_components;

    #[test]
    fn path_of_four() {
        let g = Graph::unweighted(4, &[(0, 1), (1, 2), (2, 3)]);
        let s = coarsen_level(&g, 0).unwrap();
        assert_eq!(s.graph.node_count(), 3);
        assert_eq!(s.alpha, 0.75);
        assert_eq!(s.projection, vec![0, 1, 0, 2]);
        // (0,1) and (1,2) both map onto synopsis edge (0,1); (2,3) -> (0,2)
        assert_eq!(s.graph.edge_weight(0, 1), Some(2.0));
        assert_eq!(s.graph.edge_weight(0, 2), Some(1.0));
        assert_eq!(s.delta_w, 0.0);
    }

    #[test]
    fn two_disjoint_edges() {
        let g = Graph::unweighted(4, &[(0, 1), (2, 3)]);
        let s = coarsen_level(&g, 0).unwrap();
        assert_eq!(s.graph.node_count(), 2);
        assert_eq!(s.graph.edge_count(), 0);
        assert_eq!(s.delta_w, 2.0);
        assert_eq!(connected_components(&s.graph).0, 2);
    }

    #[test]
    fn identical_labels_are_kept() {
        let g = Graph::unweighted(2, &[(0, 1)])
            .with_labels(vec![LabelSet::from([4]), LabelSet::from([4])]);
        let s = coarsen_level(&g, 0).unwrap();
        assert_eq!(s.graph.labels().unwrap()[0], LabelSet::from([4]));
    }

    #[test]
    fn mixed_labels_come_from_a_member() {
        let g = Graph::unweighted(2, &[(0, 1)])
            .with_labels(vec![LabelSet::from([1, 2]), LabelSet::new()]);
        let s = coarsen_level(&g, 0).unwrap();
        assert_eq!(s.graph.labels().unwrap()[0], LabelSet::from([1, 2]));
        for seed in 0..20 {
            let g = Graph::unweighted(2, &[(0, 1)])
                .with_labels(vec![LabelSet::from([1]), LabelSet::from([2])]);
            let s = coarsen_level(&g, seed).unwrap();
            let l = &s.graph.labels().unwrap()[0];
            assert!(l == &LabelSet::from([1]) || l == &LabelSet::from([2]));
        }
    }

    #[test]
    fn collapse_stable_inputs() {
        assert!(matches!(coarsen_level(&Graph::unweighted(1, &[]), 0), Err(CoarsenError::TooSmall(1))));
        assert!(matches!(
            coarsen_level(&Graph::unweighted(3, &[]), 0),
            Err(CoarsenError::CollapseStable)
        ));
        assert!(matches!(build_chain(&Graph::unweighted(1, &[]), 0.5, false, 0), Err(CoarsenError::TooSmall(1))));
        assert!(matches!(build_chain(&Graph::unweighted(4, &[]), 0.5, false, 0), Err(CoarsenError::CollapseStable)));
        assert!(matches!(
            build_chain(&Graph::unweighted(2, &[(0, 1)]), 1.0, false, 0),
            Err(CoarsenError::InvalidThreshold(_))
        ));
    }

    #[test]
    fn equivalence_phase_one_groups_leaves() {
        let g = Graph::unweighted(3, &[(0, 1), (0, 2)]);
        let g = g.with_attributes(Attributes::new(2, vec![1.0, 0.0, 0.0, 1.0, 5.0, -3.0]));
        let s = equivalence_collapse(&g, 0.9, 0).unwrap();
        assert_eq!(s.projection, vec![0, 1, 1]);
        assert_eq!(s.graph.attributes().unwrap().row(1), &[2.5, -1.0]);
    }

    #[test]
    fn equivalence_phase_two_uses_cosine() {
        let orth = Graph::unweighted(2, &[(0, 1)])
            .with_attributes(Attributes::new(2, vec![1.0, 0.0, 0.0, 1.0]));
        assert!(matches!(
            equivalence_collapse(&orth, 0.5, 0),
            Err(CoarsenError::CollapseStable)
        ));
        let par = Graph::unweighted(2, &[(0, 1)])
            .with_attributes(Attributes::new(2, vec![1.0, 1.0, 2.0, 2.0]));
        let s = equivalence_collapse(&par, 0.9, 0).unwrap();
        assert_eq!(s.graph.node_count(), 1);
        assert_eq!(s.graph.attributes().unwrap().row(0), &[1.5, 1.5]);
        assert!(matches!(
            equivalence_collapse(&Graph::unweighted(2, &[(0, 1)]), 0.9, 0),
            Err(CoarsenError::MissingAttributes)
        ));
    }

    #[test]
    fn chain_stopping_rule() {
        let g = crate::synthetic::erdos_renyi(400, 0.02, 5);
        let chain = build_chain(&g, 0.5, false, 1).unwrap();
        let last = chain.members.last().unwrap();
        for (i, m) in chain.members.iter().enumerate() {
            assert_eq!(m.level, i + 1);
            if i + 1 < chain.members.len() {
                assert!(m.alpha >= 0.5);
            }
        }
        assert!(last.alpha < 0.5 || coarsen_level(&last.graph, 0).is_err());
        let sel = chain.selected();
        assert!(sel.alpha >= 0.5 || chain.selected == 0);
        for w in chain.members.windows(2) {
            assert!(w[1].alpha < w[0].alpha);
            assert!(w[1].graph.node_count() < w[0].graph.node_count());
        }
    }

    #[test]
    fn chain_projection_is_composed() {
        let g = crate::synthetic::erdos_renyi(300, 0.03, 2);
        let chain = build_chain(&g, 0.2, false, 4).unwrap();
        assert!(chain.members.len() >= 2);
        for m in &chain.members {
            assert_eq!(m.projection.len(), 300);
            let mut hit = vec![false; m.graph.node_count()];
            for &s in &m.projection {
                hit[s] = true;
            }
            assert!(hit.iter().all(|&h| h), "projection must be surjective");
            // every synopsis edge weight is the sum over its preimage edges
            let mut total = std::collections::HashMap::new();
            for e in g.edges() {
                let (a, b) = (m.projection[e.u], m.projection[e.v]);
                if a != b {
                    *total.entry((a.min(b), a.max(b))).or_insert(0.0) += e.w;
                }
            }
            assert_eq!(total.len(), m.graph.edge_count());
            for e in m.graph.edges() {
                assert_eq!(total[&(e.u, e.v)], e.w);
            }
        }
    }

    #[test]
    fn projection_round_trip() {
        let p = vec![0, 2, 1, 2, 0];
        let mut buf = Vec::new();
        write_projection(&p, &mut buf).unwrap();
        assert_eq!(read_projection(buf.as_slice()).unwrap(), p);
        assert!(read_projection("0 1\n0 2\n".as_bytes()).is_err());
    }
}
