//! Undirected weighted graphs with optional node labels and attributes.
//!
//! Node ids are dense `0..node_count`. Edges are stored once in canonical
//! `(u, v)` order with `u < v`; the adjacency lists see every edge from both
//! endpoints and are sorted by neighbor id.

mod components;
mod io;
mod split;

use std::collections::BTreeSet;

use thiserror::Error;

pub use components::connected_components;
pub use io::{
    attach_attributes, attach_labels, load_edge_list, write_attributes, write_edge_list,
    write_labels, IngestStats,
};
pub use split::{split_edges, EdgeSplit};

pub type LabelSet = BTreeSet<u32>;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: malformed input: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: edge weight must be positive and finite, got {weight}")]
    InvalidWeight { line: usize, weight: f64 },
    #[error("empty input: no edges or nodes found")]
    EmptyInput,
    #[error("line {line}: node `{node}` is out of range")]
    NodeOutOfRange { line: usize, node: String },
    #[error("line {line}: expected {expected} attribute values, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("node {node} has no attribute vector")]
    MissingAttributes { node: usize },
    #[error("holdout fraction must lie in (0, 1), got {0}")]
    InvalidFraction(f64),
    #[error("graph has {edges} edges, at least {required} are needed for this split")]
    TooFewEdges { edges: usize, required: usize },
    #[error("need {needed} negative pairs but only {available} non-edges exist")]
    NotEnoughNonEdges { needed: usize, available: u128 },
    #[error("edge ({u}, {v}) references a node outside 0..{node_count}")]
    InvalidEdge { u: usize, v: usize, node_count: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Dense per-node attribute vectors of a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Attributes {
    dim: usize,
    values: Vec<f64>,
}

impl Attributes {
    pub fn new(dim: usize, values: Vec<f64>) -> Self {
        assert!(dim == 0 || values.len().is_multiple_of(dim));
        Self { dim, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, node: usize) -> &[f64] {
        &self.values[node * self.dim..(node + 1) * self.dim]
    }

    pub fn len(&self) -> usize {
        self.values.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
    total_weight: f64,
    labels: Option<Vec<LabelSet>>,
    attributes: Option<Attributes>,
    node_names: Option<Vec<String>>,
}

/// Counters produced while normalizing a raw edge sequence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MergeStats {
    pub loops_dropped: usize,
    pub duplicates_merged: usize,
}

impl Graph {
    /// Builds a graph from raw undirected edges: self-loops are dropped and
    /// duplicates (in either orientation) merged by summing weights.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<(Self, MergeStats), GraphError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut stats = MergeStats::default();
        let mut raw = Vec::new();
        for (u, v, w) in edges {
            if u >= node_count || v >= node_count {
                return Err(GraphError::InvalidEdge { u, v, node_count });
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(GraphError::InvalidWeight { line: 0, weight: w });
            }
            if u == v {
                stats.loops_dropped += 1;
                continue;
            }
            raw.push(Edge {
                u: u.min(v),
                v: u.max(v),
                w,
            });
        }
        // stable: duplicates are summed in input order
        raw.sort_by_key(|e| (e.u, e.v));
        let mut merged: Vec<Edge> = Vec::with_capacity(raw.len());
        for e in raw {
            match merged.last_mut() {
                Some(last) if last.u == e.u && last.v == e.v => {
                    last.w += e.w;
                    stats.duplicates_merged += 1;
                }
                _ => merged.push(e),
            }
        }
        Ok((Self::from_canonical(node_count, merged), stats))
    }

    /// Assumes `edges` is sorted, loop-free, duplicate-free with `u < v`.
    pub(crate) fn from_canonical(node_count: usize, edges: Vec<Edge>) -> Self {
        let mut adjacency = vec![Vec::new(); node_count];
        for e in &edges {
            adjacency[e.u].push((e.v, e.w));
            adjacency[e.v].push((e.u, e.w));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(n, _)| n);
        }
        let total_weight = edges.iter().map(|e| e.w).sum();
        Self {
            node_count,
            edges,
            adjacency,
            total_weight,
            labels: None,
            attributes: None,
            node_names: None,
        }
    }

    /// Unit-weight graph from an edge list; panics on out-of-range ids.
    pub fn unweighted(node_count: usize, edges: &[(usize, usize)]) -> Self {
        Self::from_edges(node_count, edges.iter().map(|&(u, v)| (u, v, 1.0)))
            .expect("valid edge list")
            .0
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_count == 0
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    /// Sum of stored edge weights (W).
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn recompute_total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        let list = &self.adjacency[u];
        list.binary_search_by_key(&v, |&(n, _)| n)
            .ok()
            .map(|i| list[i].1)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_weight(u, v).is_some()
    }

    pub fn labels(&self) -> Option<&[LabelSet]> {
        self.labels.as_deref()
    }

    pub fn attributes(&self) -> Option<&Attributes> {
        self.attributes.as_ref()
    }

    pub fn node_names(&self) -> Option<&[String]> {
        self.node_names.as_deref()
    }

    /// Display name of a node: its interned token, or its dense id.
    pub fn node_name(&self, node: usize) -> String {
        match &self.node_names {
            Some(names) => names[node].clone(),
            None => node.to_string(),
        }
    }

    pub fn with_labels(mut self, labels: Vec<LabelSet>) -> Self {
        assert_eq!(labels.len(), self.node_count, "one label set per node");
        self.labels = Some(labels);
        self
    }

    pub fn with_attributes(mut self, attributes: Attributes) -> Self {
        assert_eq!(attributes.len(), self.node_count, "one vector per node");
        self.attributes = Some(attributes);
        self
    }

    pub(crate) fn with_node_names(mut self, names: Option<Vec<String>>) -> Self {
        if let Some(n) = &names {
            assert_eq!(n.len(), self.node_count);
        }
        self.node_names = names;
        self
    }

    /// Same nodes and node data, different edge set.
    pub(crate) fn with_edges_like(&self, edges: Vec<Edge>) -> Self {
        let mut g = Self::from_canonical(self.node_count, edges);
        g.labels = self.labels.clone();
        g.attributes = self.attributes.clone();
        g.node_names = self.node_names.clone();
        g
    }
}
