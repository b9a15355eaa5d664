//! Task data a tuner evaluates against, for either the original graph or a
//! synopsis.

use crate::embed::EmbeddingMatrix;
use crate::eval::{self, EvalError, EvalInput, EvalResult, Metric, Scorer, Task};
use crate::graph::{split_edges, EdgeSplit, Graph, GraphError, LabelSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskSettings {
    pub task: Task,
    pub holdout_fraction: f64,
    pub train_fraction: f64,
    pub scorer: Scorer,
    pub classification_metric: Metric,
}

impl TaskSettings {
    pub fn new(task: Task) -> Self {
        Self {
            task,
            holdout_fraction: eval::DEFAULT_HOLDOUT_FRACTION,
            train_fraction: eval::DEFAULT_TRAIN_FRACTION,
            scorer: Scorer::Inner,
            classification_metric: Metric::MicroF1,
        }
    }

    pub fn metric(&self) -> Metric {
        match self.task {
            Task::LinkPrediction => Metric::Auc,
            Task::Classification => self.classification_metric,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TaskDataError {
    #[error("cannot hold out test edges: {0}")]
    Split(#[from] GraphError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// The graph an embedder runs on plus whatever the task needs to score it.
/// For link prediction the embedder sees only the residual training graph.
#[derive(Debug, Clone)]
pub struct TaskData {
    pub graph: Graph,
    pub split: Option<EdgeSplit>,
    pub labels: Option<Vec<LabelSet>>,
    /// Seed of the classification train/test split, fixed for every trial.
    pub eval_seed: u64,
}

impl TaskData {
    pub fn prepare(graph: &Graph, settings: &TaskSettings, seed: u64) -> Result<Self, TaskDataError> {
        match settings.task {
            Task::LinkPrediction => {
                let split = split_edges(graph, settings.holdout_fraction, seed)?;
                Ok(Self {
                    graph: split.train_graph.clone(),
                    split: Some(split),
                    labels: None,
                    eval_seed: seed,
                })
            }
            Task::Classification => {
                let labels = graph.labels().ok_or(EvalError::MissingLabels)?.to_vec();
                if labels.iter().all(|l| l.is_empty()) {
                    return Err(EvalError::NoLabels.into());
                }
                Ok(Self {
                    graph: graph.clone(),
                    split: None,
                    labels: Some(labels),
                    eval_seed: seed,
                })
            }
        }
    }

    pub fn evaluate(&self, settings: &TaskSettings, emb: &EmbeddingMatrix) -> Result<EvalResult, EvalError> {
        let input = EvalInput {
            split: self.split.as_ref(),
            labels: self.labels.as_deref(),
            train_fraction: settings.train_fraction,
            scorer: settings.scorer,
            classification_metric: settings.classification_metric,
        };
        eval::evaluate(settings.task, &input, emb, self.eval_seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn link_prediction_embeds_the_residual_graph() {
        let g = crate::synthetic::erdos_renyi(50, 0.2, 1);
        let data = TaskData::prepare(&g, &TaskSettings::new(Task::LinkPrediction), 4).unwrap();
        let split = data.split.as_ref().unwrap();
        assert_eq!(data.graph.edge_count() + split.test_positive.len(), g.edge_count());
        for e in &split.test_positive {
            assert!(!data.graph.has_edge(e.u, e.v));
        }
    }

    #[test]
    fn classification_needs_labels() {
        let g = crate::synthetic::erdos_renyi(20, 0.2, 1);
        let settings = TaskSettings::new(Task::Classification);
        assert!(matches!(
            TaskData::prepare(&g, &settings, 0),
            Err(TaskDataError::Eval(EvalError::MissingLabels))
        ));
        let sbm = crate::synthetic::stochastic_block_model(&[10, 10], 0.5, 0.05, 0);
        assert!(TaskData::prepare(&sbm, &settings, 0).unwrap().labels.is_some());
    }
}
