//! Downstream scoring of embeddings: link-prediction AUC and
//! node-classification Micro-F1 / accuracy.

mod auc;
mod classify;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

pub use auc::auc;
pub use classify::{micro_f1, node_classification, train_logistic, LogisticModel, DEFAULT_TRAIN_FRACTION};

use crate::embed::EmbeddingMatrix;
use crate::graph::{EdgeSplit, LabelSet};

pub const DEFAULT_HOLDOUT_FRACTION: f64 = 0.2;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no positive test pairs")]
    EmptyPositives,
    #[error("no negative test pairs")]
    EmptyNegatives,
    #[error("embedding has {rows} rows but the graph has {nodes} nodes")]
    ShapeMismatch { rows: usize, nodes: usize },
    #[error("link prediction requires an edge split")]
    MissingSplit,
    #[error("classification requires node labels")]
    MissingLabels,
    #[error("no node carries a label")]
    NoLabels,
    #[error("only {0} labeled nodes; cannot form both a training and a test set")]
    TooFewLabeledNodes(usize),
    #[error("train fraction must lie in (0, 1), got {0}")]
    InvalidFraction(f64),
    #[error("unknown task `{0}` (expected link_prediction or classification)")]
    UnknownTask(String),
    #[error("unknown scorer `{0}` (expected inner or cosine)")]
    UnknownScorer(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    LinkPrediction,
    Classification,
}

impl FromStr for Task {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "link_prediction" | "lp" => Ok(Task::LinkPrediction),
            "classification" | "node_classification" | "nc" => Ok(Task::Classification),
            other => Err(EvalError::UnknownTask(other.to_string())),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::LinkPrediction => "link_prediction",
            Task::Classification => "classification",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "AUC")]
    Auc,
    MicroF1,
    Accuracy,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Auc => "AUC",
            Metric::MicroF1 => "MicroF1",
            Metric::Accuracy => "Accuracy",
        })
    }
}

/// Edge score used for link prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scorer {
    #[default]
    Inner,
    Cosine,
}

impl FromStr for Scorer {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inner" => Ok(Scorer::Inner),
            "cosine" => Ok(Scorer::Cosine),
            other => Err(EvalError::UnknownScorer(other.to_string())),
        }
    }
}

impl Scorer {
    pub fn score(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Scorer::Inner => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Scorer::Cosine => crate::coarsen::cosine(a, b),
        }
    }
}

/// Outcome of scoring one embedding on one task; `value` lies in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub task: Task,
    pub metric: Metric,
    pub value: f64,
    pub seed: u64,
    pub details: serde_json::Value,
}

pub fn link_prediction_auc(emb: &EmbeddingMatrix, split: &EdgeSplit, scorer: Scorer) -> Result<EvalResult, EvalError> {
    let nodes = split.train_graph.node_count();
    if emb.rows() != nodes {
        return Err(EvalError::ShapeMismatch {
            rows: emb.rows(),
            nodes,
        });
    }
    let pos: Vec<f64> = split
        .test_positive
        .iter()
        .map(|e| scorer.score(emb.row(e.u), emb.row(e.v)))
        .collect();
    let neg: Vec<f64> = split
        .test_negative
        .iter()
        .map(|&(u, v)| scorer.score(emb.row(u), emb.row(v)))
        .collect();
    let value = auc(&pos, &neg)?;
    Ok(EvalResult {
        task: Task::LinkPrediction,
        metric: Metric::Auc,
        value,
        seed: split.seed,
        details: json!({
            "positives": pos.len(),
            "negatives": neg.len(),
            "scorer": scorer,
        }),
    })
}

/// Inputs for [`evaluate`]; only those required by the task need be present.
#[derive(Debug, Clone, Copy)]
pub struct EvalInput<'a> {
    pub split: Option<&'a EdgeSplit>,
    pub labels: Option<&'a [LabelSet]>,
    pub train_fraction: f64,
    pub scorer: Scorer,
    /// `MicroF1` or `Accuracy`; ignored for link prediction.
    pub classification_metric: Metric,
}

impl Default for EvalInput<'_> {
    fn default() -> Self {
        Self {
            split: None,
            labels: None,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            scorer: Scorer::Inner,
            classification_metric: Metric::MicroF1,
        }
    }
}

pub fn evaluate(task: Task, input: &EvalInput<'_>, emb: &EmbeddingMatrix, seed: u64) -> Result<EvalResult, EvalError> {
    match task {
        Task::LinkPrediction => {
            let split = input.split.ok_or(EvalError::MissingSplit)?;
            link_prediction_auc(emb, split, input.scorer)
        }
        Task::Classification => {
            let labels = input.labels.ok_or(EvalError::MissingLabels)?;
            node_classification(emb, labels, input.train_fraction, seed, input.classification_metric)
        }
    }
}
