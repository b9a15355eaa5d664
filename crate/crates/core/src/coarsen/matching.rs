//! Node grouping rules. All passes are greedy in ascending node id order so a
//! given graph always produces the same grouping.

use std::collections::HashMap;

use crate::graph::Graph;

/// Partner of each node in a matching, `None` for unmatched nodes.
pub type Pairing = Vec<Option<usize>>;

/// Pairs nodes that hang off the same intact hub.
///
/// Each unmatched node `u`, in ascending order, is paired with the lowest-id
/// unmatched node `v != u` that shares an unmatched neighbor with it.
pub fn star_collapse(graph: &Graph) -> Pairing {
    let n = graph.node_count();
    let mut partner: Pairing = vec![None; n];
    let mut matched = vec![false; n];
    // cursor[x]: every neighbor of x before this position is already matched
    let mut cursor = vec![0usize; n];

    for u in 0..n {
        if matched[u] {
            continue;
        }
        let mut best: Option<usize> = None;
        for &(hub, _) in graph.neighbors(u) {
            if matched[hub] {
                continue;
            }
            let list = graph.neighbors(hub);
            let c = &mut cursor[hub];
            while *c < list.len() && matched[list[*c].0] {
                *c += 1;
            }
            let candidate = list[*c..]
                .iter()
                .map(|&(y, _)| y)
                .find(|&y| y != u && !matched[y]);
            if let Some(y) = candidate {
                best = Some(best.map_or(y, |b| b.min(y)));
            }
        }
        if let Some(v) = best {
            partner[u] = Some(v);
            partner[v] = Some(u);
            matched[u] = true;
            matched[v] = true;
        }
    }
    partner
}

/// Pairs adjacent nodes over edges in ascending `(u, v)` order, skipping any
/// endpoint that is already matched (including by `already_matched`).
pub fn edge_collapse(graph: &Graph, already_matched: &[bool]) -> Pairing {
    let mut partner: Pairing = vec![None; graph.node_count()];
    let mut matched = already_matched.to_vec();
    for e in graph.edges() {
        if !matched[e.u] && !matched[e.v] {
            partner[e.u] = Some(e.v);
            partner[e.v] = Some(e.u);
            matched[e.u] = true;
            matched[e.v] = true;
        }
    }
    partner
}

/// Groups non-isolated nodes that have exactly the same neighbor set. Returns
/// the group leader (smallest member) of every node.
pub fn structural_equivalence_groups(graph: &Graph) -> Vec<usize> {
    let n = graph.node_count();
    let mut leader: Vec<usize> = (0..n).collect();
    let mut first_with: HashMap<Vec<usize>, usize> = HashMap::new();
    for (u, slot) in leader.iter_mut().enumerate() {
        if graph.degree(u) == 0 {
            continue;
        }
        let key: Vec<usize> = graph.neighbors(u).iter().map(|&(v, _)| v).collect();
        *slot = *first_with.entry(key).or_insert(u);
    }
    leader
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

pub(crate) fn pairing_to_leaders(pairings: &[&Pairing], n: usize) -> Vec<usize> {
    let mut leader: Vec<usize> = (0..n).collect();
    for pairing in pairings {
        for (u, p) in pairing.iter().enumerate() {
            if let Some(v) = *p {
                leader[u] = u.min(v);
            }
        }
    }
    leader
}
