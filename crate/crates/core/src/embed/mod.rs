//! Embedders: a uniform trait over native implementations and external
//! plugins, each carrying its search space and complexity class.

mod deepwalk;
mod matrix;
mod plugin;
mod spectral;

use std::time::Duration;

use thiserror::Error;

pub use deepwalk::{DeepWalk, WalkStats};
pub use matrix::EmbeddingMatrix;
pub use plugin::{gcn_space, PluginEmbedder};
pub use spectral::{top_eigenpairs, EigenPairs, Spectral, DEFAULT_SPECTRAL_DIM};

use crate::graph::Graph;
use crate::tune::{Configuration, HyperparameterSpace, Ratio, SpaceError};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("embedding dimension must be at least 1, got {0}")]
    InvalidDim(i64),
    #[error("cannot embed an empty graph")]
    EmptyGraph,
    #[error("dimension {dim} exceeds node count {nodes}")]
    DimTooLarge { dim: usize, nodes: usize },
    #[error("eigen-solver did not converge after {iterations} restarts (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("configuration: {0}")]
    Config(#[from] SpaceError),
    #[error("failed to launch plugin `{command}`: {source}")]
    Spawn {
        command: String,
        source: std::io::Error,
    },
    #[error("plugin exited with {status}: {stderr}")]
    NonZeroExit { status: String, stderr: String },
    #[error("plugin timed out after {0:?}")]
    Timeout(Duration),
    #[error("plugin wrote no output file")]
    MissingOutput,
    #[error("embedding line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("embedding incomplete: expected {expected}, found {found}")]
    Incomplete { expected: usize, found: usize },
    #[error("embedding row for node {node} has a non-finite value")]
    NonFinite { node: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Selects the runtime-ratio formula between a synopsis and its original.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexityClass {
    /// `|V| log |V|` (random-walk methods).
    VLogV,
    /// `|E| + |V|` (sparse spectral methods).
    EPlusV,
    /// `|E|` (message passing, edge sampling).
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbedderKind {
    Native,
    Plugin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedderDescriptor {
    pub name: String,
    pub space: HyperparameterSpace,
    pub complexity_class: ComplexityClass,
    pub kind: EmbedderKind,
}

pub trait Embedder: Send + Sync {
    fn descriptor(&self) -> &EmbedderDescriptor;

    /// Embeds every node of `graph`. Native embedders are bit-deterministic
    /// in `(graph, config, seed)`.
    fn embed(
        &self,
        graph: &Graph,
        config: &Configuration,
        seed: u64,
    ) -> Result<EmbeddingMatrix, EmbedError>;
}

/// Expected runtime of the embedder on `synopsis` relative to `original`,
/// kept in `(0, 1]`.
pub fn runtime_ratio(class: ComplexityClass, original: &Graph, synopsis: &Graph) -> Ratio {
    let (n, n2) = (original.node_count() as u64, synopsis.node_count() as u64);
    let (m, m2) = (original.edge_count() as u64, synopsis.edge_count() as u64);
    let raw = match class {
        ComplexityClass::E if m > 0 => Ratio::new(m2, m),
        ComplexityClass::EPlusV | ComplexityClass::E => Ratio::new(m2 + n2, (m + n).max(1)),
        ComplexityClass::VLogV => {
            let f = |x: u64| if x > 1 { x as f64 * (x as f64).ln() } else { 0.0 };
            let denom = f(n);
            if denom > 0.0 {
                Ratio::approximate(f(n2) / denom)
            } else {
                Ratio::ONE
            }
        }
    };
    if raw.num == 0 {
        Ratio::new(1, 1 << 40)
    } else if raw.num > raw.den {
        Ratio::ONE
    } else {
        raw
    }
}

/// Looks up a native embedder by name (`deepwalk`, `spectral`/`arope`).
/// `spectral_dim` sets the fixed spectral embedding size.
pub fn native_embedder(name: &str, spectral_dim: usize) -> Option<Box<dyn Embedder>> {
    match name {
        "deepwalk" => Some(Box::new(DeepWalk::new())),
        "spectral" | "arope" => Some(Box::new(Spectral::new(spectral_dim))),
        _ => None,
    }
}

pub(crate) fn check_dim(dim: i64) -> Result<usize, EmbedError> {
    if dim < 1 {
        Err(EmbedError::InvalidDim(dim))
    } else {
        Ok(dim as usize)
    }
}
