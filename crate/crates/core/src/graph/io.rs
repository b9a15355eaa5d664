//! Whitespace-separated text formats for edges, labels and attributes.
//!
//! Edge lines are `u v` or `u v w`. Node fields are either non-negative
//! integers (used directly as dense ids) or arbitrary tokens, which are
//! interned in order of first appearance. `#` lines are comments, with two
//! directives understood by the loader and emitted by the writer so that
//! isolated nodes and token names survive a round trip:
//!
//! ```text
//! # nodes <count>
//! # name <id> <token>
//! ```

use std::collections::HashMap;
use std::io::{BufRead, Write};

use log::warn;

use super::{Attributes, Graph, GraphError, LabelSet};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub lines_read: usize,
    pub edges_read: usize,
    pub loops_dropped: usize,
    pub duplicates_merged: usize,
}

struct RawEdge {
    u: String,
    v: String,
    w: f64,
}

enum Directive {
    Nodes(usize),
    Name(usize, String),
}

fn parse_directive(body: &str) -> Option<Directive> {
    let mut it = body.split_whitespace();
    match it.next()? {
        "nodes" => {
            let n = it.next()?.parse().ok()?;
            it.next().is_none().then_some(Directive::Nodes(n))
        }
        "name" => {
            let id = it.next()?.parse().ok()?;
            let tok = it.next()?.to_string();
            it.next().is_none().then_some(Directive::Name(id, tok))
        }
        _ => None,
    }
}

/// Reads an edge list. Directed input is symmetrized (with a warning), since
/// every downstream algorithm assumes undirected structure.
pub fn load_edge_list<R: BufRead>(
    source: R,
    directed: bool,
) -> Result<(Graph, IngestStats), GraphError> {
    let mut stats = IngestStats::default();
    let mut raw = Vec::new();
    let mut declared_nodes = 0usize;
    let mut declared_names: Vec<(usize, String)> = Vec::new();

    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        stats.lines_read += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(body) = trimmed.strip_prefix('#') {
            match parse_directive(body) {
                Some(Directive::Nodes(n)) => declared_nodes = declared_nodes.max(n),
                Some(Directive::Name(id, tok)) => declared_names.push((id, tok)),
                None => {}
            }
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let w = match fields.len() {
            2 => 1.0,
            3 => fields[2].parse::<f64>().map_err(|_| GraphError::Malformed {
                line: lineno,
                reason: format!("weight `{}` is not a number", fields[2]),
            })?,
            n => {
                return Err(GraphError::Malformed {
                    line: lineno,
                    reason: format!("expected 2 or 3 fields, found {n}"),
                })
            }
        };
        if !(w.is_finite() && w > 0.0) {
            return Err(GraphError::InvalidWeight {
                line: lineno,
                weight: w,
            });
        }
        raw.push(RawEdge {
            u: fields[0].to_string(),
            v: fields[1].to_string(),
            w,
        });
    }
    stats.edges_read = raw.len();
    if raw.is_empty() && declared_nodes == 0 && declared_names.is_empty() {
        return Err(GraphError::EmptyInput);
    }
    if directed {
        warn!("directed edge list symmetrized; reverse edges are merged by summing weights");
    }

    let numeric = declared_names.is_empty()
        && raw
            .iter()
            .all(|e| e.u.parse::<usize>().is_ok() && e.v.parse::<usize>().is_ok());

    let (node_count, ids, names) = if numeric {
        let ids: Vec<(usize, usize, f64)> = raw
            .iter()
            .map(|e| (e.u.parse().unwrap(), e.v.parse().unwrap(), e.w))
            .collect();
        let max_id = ids.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0);
        (max_id.max(declared_nodes), ids, None)
    } else {
        let mut interner: HashMap<String, usize> = HashMap::new();
        let mut names: Vec<String> = Vec::new();
        declared_names.sort_by_key(|(id, _)| *id);
        for (id, tok) in declared_names {
            if id != names.len() || interner.contains_key(&tok) {
                return Err(GraphError::Malformed {
                    line: 0,
                    reason: format!("name directive for id {id} is out of sequence or duplicated"),
                });
            }
            interner.insert(tok.clone(), id);
            names.push(tok);
        }
        let mut intern = |tok: &str| -> usize {
            if let Some(&id) = interner.get(tok) {
                return id;
            }
            let id = names.len();
            interner.insert(tok.to_string(), id);
            names.push(tok.to_string());
            id
        };
        let ids: Vec<(usize, usize, f64)> = raw
            .iter()
            .map(|e| (intern(&e.u), intern(&e.v), e.w))
            .collect();
        (names.len().max(declared_nodes), ids, Some(names))
    };
    if let Some(n) = &names {
        if n.len() != node_count {
            return Err(GraphError::Malformed {
                line: 0,
                reason: "node count directive disagrees with the named nodes".into(),
            });
        }
    }

    let (graph, merge) = Graph::from_edges(node_count, ids)?;
    stats.loops_dropped = merge.loops_dropped;
    stats.duplicates_merged = merge.duplicates_merged;
    Ok((graph.with_node_names(names), stats))
}

fn node_lookup(graph: &Graph) -> impl Fn(&str) -> Option<usize> + '_ {
    let map: Option<HashMap<&str, usize>> = graph
        .node_names()
        .map(|names| names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect());
    move |tok: &str| match &map {
        Some(m) => m.get(tok).copied(),
        None => tok
            .parse::<usize>()
            .ok()
            .filter(|&id| id < graph.node_count()),
    }
}

/// Adds `node label [label ...]` lines; repeated nodes accumulate labels.
pub fn attach_labels<R: BufRead>(graph: Graph, source: R) -> Result<Graph, GraphError> {
    let mut labels: Vec<LabelSet> = vec![LabelSet::new(); graph.node_count()];
    {
        let lookup = node_lookup(&graph);
        for (idx, line) in source.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split_whitespace();
            let node_tok = fields.next().unwrap_or_default();
            let node = lookup(node_tok).ok_or_else(|| GraphError::NodeOutOfRange {
                line: lineno,
                node: node_tok.to_string(),
            })?;
            let mut any = false;
            for tok in fields {
                let label = tok.parse::<u32>().map_err(|_| GraphError::Malformed {
                    line: lineno,
                    reason: format!("label `{tok}` is not a non-negative integer"),
                })?;
                labels[node].insert(label);
                any = true;
            }
            if !any {
                return Err(GraphError::Malformed {
                    line: lineno,
                    reason: "expected `node label`".into(),
                });
            }
        }
    }
    Ok(graph.with_labels(labels))
}

/// Adds `node f1 ... fk` lines. Every node must be covered with the same `k`.
pub fn attach_attributes<R: BufRead>(graph: Graph, source: R) -> Result<Graph, GraphError> {
    let n = graph.node_count();
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; n];
    let mut dim: Option<usize> = None;
    {
        let lookup = node_lookup(&graph);
        for (idx, line) in source.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split_whitespace();
            let node_tok = fields.next().unwrap_or_default();
            let node = lookup(node_tok).ok_or_else(|| GraphError::NodeOutOfRange {
                line: lineno,
                node: node_tok.to_string(),
            })?;
            let values = fields
                .map(|tok| {
                    tok.parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| GraphError::Malformed {
                            line: lineno,
                            reason: format!("attribute `{tok}` is not a finite number"),
                        })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            let expected = *dim.get_or_insert(values.len());
            if values.len() != expected || expected == 0 {
                return Err(GraphError::DimensionMismatch {
                    line: lineno,
                    expected,
                    found: values.len(),
                });
            }
            if rows[node].is_some() {
                return Err(GraphError::Malformed {
                    line: lineno,
                    reason: format!("node `{node_tok}` listed twice"),
                });
            }
            rows[node] = Some(values);
        }
    }
    let dim = dim.unwrap_or(0);
    let mut values = Vec::with_capacity(n * dim);
    for (node, row) in rows.into_iter().enumerate() {
        values.extend(row.ok_or(GraphError::MissingAttributes { node })?);
    }
    if n == 0 {
        return Ok(graph);
    }
    Ok(graph.with_attributes(Attributes::new(dim, values)))
}

/// Writes the edge list with `# nodes` / `# name` directives. Floats use the
/// shortest round-trip representation, so a reload is bit-exact.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# nodes {}", graph.node_count())?;
    if let Some(names) = graph.node_names() {
        for (i, name) in names.iter().enumerate() {
            writeln!(out, "# name {i} {name}")?;
        }
    }
    for e in graph.edges() {
        writeln!(out, "{} {} {}", graph.node_name(e.u), graph.node_name(e.v), e.w)?;
    }
    Ok(())
}

pub fn write_labels<W: Write>(graph: &Graph, mut out: W) -> std::io::Result<()> {
    if let Some(labels) = graph.labels() {
        for (node, set) in labels.iter().enumerate() {
            for label in set {
                writeln!(out, "{} {label}", graph.node_name(node))?;
            }
        }
    }
    Ok(())
}

pub fn write_attributes<W: Write>(graph: &Graph, mut out: W) -> std::io::Result<()> {
    if let Some(attrs) = graph.attributes() {
        for node in 0..graph.node_count() {
            write!(out, "{}", graph.node_name(node))?;
            for x in attrs.row(node) {
                write!(out, " {x}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}
