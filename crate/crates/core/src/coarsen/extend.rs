//! Mirror-node extension of a synopsis and the KL diagnostic it enables.
//!
//! A synopsis node that absorbed `k` original nodes gets `k − 1` mirror nodes,
//! each attached by a unit-weight edge, so the extended graph has exactly as
//! many nodes as the original and `W'_x = W' + |V| − |V'|`.

use std::collections::HashMap;

use super::{CoarsenError, Synopsis};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedSynopsis {
    /// Synopsis nodes keep their ids; mirrors follow at `|V'|..|V|`.
    pub graph: Graph,
    /// `mirror_of[i]` is the collapsed node that mirror `|V'| + i` hangs off.
    pub mirror_of: Vec<usize>,
    pub extended_total_weight: f64,
    pub synopsis_node_count: usize,
    pub projection: Vec<usize>,
}

pub fn extend_synopsis(synopsis: &Synopsis, original: &Graph) -> ExtendedSynopsis {
    assert_eq!(synopsis.projection.len(), original.node_count());
    let base = synopsis.graph.node_count();
    let sizes = synopsis.group_sizes();
    let mut mirror_of = Vec::with_capacity(original.node_count() - base);
    for (c, &k) in sizes.iter().enumerate() {
        for _ in 1..k {
            mirror_of.push(c);
        }
    }
    let edges = synopsis
        .graph
        .edges()
        .iter()
        .map(|e| (e.u, e.v, e.w))
        .chain(
            mirror_of
                .iter()
                .enumerate()
                .map(|(i, &c)| (c, base + i, 1.0)),
        );
    let (graph, _) = Graph::from_edges(base + mirror_of.len(), edges).expect("ids in range");
    let extended_total_weight = graph.total_weight();
    ExtendedSynopsis {
        graph,
        mirror_of,
        extended_total_weight,
        synopsis_node_count: base,
        projection: synopsis.projection.clone(),
    }
}

/// `KL(G ‖ G'_x) = Σ p_ij ln(p_ij / q_ij)` over the original edges, with
/// `p_ij = w_ij / W`.
///
/// `q_ij` is the extended graph's share for edge `(i, j)`:
/// - endpoints in different synopsis nodes `a ≠ b`: the image edge weight
///   `w'_ab`, split among all original edges mapping onto `(a, b)` in
///   proportion to their weight;
/// - endpoints collapsed together into `c`: the `k_c − 1` unit mirror edges
///   of `c`, split among `c`'s internal edges in proportion to weight (one
///   internal edge of a pair collapse gets exactly `1 / W'_x`);
/// - image edge missing from the synopsis: `ε / W'_x`.
///
/// Shares never sum past one, so the result is non-negative.
pub fn kl_divergence(
    original: &Graph,
    extended: &ExtendedSynopsis,
    smoothing: f64,
) -> Result<f64, CoarsenError> {
    if !(smoothing > 0.0 && smoothing.is_finite()) {
        return Err(CoarsenError::InvalidSmoothing(smoothing));
    }
    let pi = &extended.projection;
    let w_total = original.total_weight();
    let wx = extended.extended_total_weight;
    let base = extended.synopsis_node_count;

    let mut preimage: HashMap<(usize, usize), f64> = HashMap::new();
    let mut internal = vec![0.0; base];
    let mut sizes = vec![0usize; base];
    for &s in pi {
        sizes[s] += 1;
    }
    for e in original.edges() {
        let (a, b) = (pi[e.u], pi[e.v]);
        if a == b {
            internal[a] += e.w;
        } else {
            *preimage.entry((a.min(b), a.max(b))).or_insert(0.0) += e.w;
        }
    }

    let mut kl = 0.0;
    for e in original.edges() {
        let p = e.w / w_total;
        let (a, b) = (pi[e.u], pi[e.v]);
        let q = if a == b {
            (sizes[a] - 1) as f64 * (e.w / internal[a]) / wx
        } else {
            let key = (a.min(b), a.max(b));
            match extended.graph.edge_weight(key.0, key.1) {
                Some(w_img) => w_img * (e.w / preimage[&key]) / wx,
                None => smoothing / wx,
            }
        };
        kl += p * (p / q).ln();
    }
    Ok(kl)
}
