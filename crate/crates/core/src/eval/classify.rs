//! One-vs-rest logistic regression on embeddings, scored by Micro-F1 (or
//! top-1 accuracy for single-label data).

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use serde_json::json;

use super::{EvalError, EvalResult, Metric, Task};
use crate::embed::EmbeddingMatrix;
use crate::graph::LabelSet;
use crate::rng;

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.2;
pub const L2_STRENGTH: f64 = 1.0;
pub const MAX_ITERATIONS: usize = 500;
pub const GRADIENT_TOLERANCE: f64 = 1e-6;

/// Sufficient decrease constant for the backtracking line search.
const ARMIJO: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Objective value before the first step and after every accepted step.
    pub losses: Vec<f64>,
}

impl LogisticModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.bias + x.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>()
    }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean log-loss plus `(λ / 2n)·‖w‖²` (bias unpenalized).
fn objective(x: &[f64], y: &[bool], dim: usize, w: &[f64], b: f64, lambda: f64) -> f64 {
    let n = y.len() as f64;
    let data: f64 = y
        .iter()
        .enumerate()
        .map(|(i, &yi)| {
            let z = b + x[i * dim..(i + 1) * dim].iter().zip(w).map(|(a, c)| a * c).sum::<f64>();
            softplus(z) - if yi { z } else { 0.0 }
        })
        .sum();
    data / n + lambda / (2.0 * n) * w.iter().map(|v| v * v).sum::<f64>()
}

/// Full-batch gradient descent with backtracking (Armijo) steps, so the
/// objective never increases. Stops at the gradient-norm tolerance, after
/// `max_iter` steps, or when no step length decreases the objective.
pub fn train_logistic(x: &[f64], y: &[bool], dim: usize, lambda: f64, max_iter: usize) -> LogisticModel {
    let n = y.len();
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut loss = objective(x, y, dim, &w, b, lambda);
    let mut losses = vec![loss];
    let mut step = 1.0;
    let mut gw = vec![0.0; dim];
    for _ in 0..max_iter {
        gw.iter_mut().for_each(|g| *g = 0.0);
        let mut gb = 0.0;
        for i in 0..n {
            let row = &x[i * dim..(i + 1) * dim];
            let z = b + row.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>();
            let r = sigmoid(z) - if y[i] { 1.0 } else { 0.0 };
            gb += r;
            gw.iter_mut().zip(row).for_each(|(g, a)| *g += r * a);
        }
        let nf = n as f64;
        gb /= nf;
        gw.iter_mut().zip(&w).for_each(|(g, wi)| *g = *g / nf + lambda / nf * wi);
        let gnorm2 = gb * gb + gw.iter().map(|g| g * g).sum::<f64>();
        if gnorm2.sqrt() < GRADIENT_TOLERANCE {
            break;
        }
        step *= 2.0;
        let mut accepted = false;
        for _ in 0..60 {
            let w_new: Vec<f64> = w.iter().zip(&gw).map(|(a, g)| a - step * g).collect();
            let b_new = b - step * gb;
            let new_loss = objective(x, y, dim, &w_new, b_new, lambda);
            if new_loss <= loss - ARMIJO * step * gnorm2 {
                w = w_new;
                b = b_new;
                loss = new_loss;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        losses.push(loss);
    }
    LogisticModel {
        weights: w,
        bias: b,
        losses,
    }
}

/// Micro-averaged F1 over pooled (node, label) decisions; 0 when nothing
/// is predicted and nothing is true.
pub fn micro_f1(predicted: &[LabelSet], truth: &[LabelSet]) -> f64 {
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (p, t) in predicted.iter().zip(truth) {
        let hit = p.intersection(t).count();
        tp += hit;
        fp += p.len() - hit;
        fn_ += t.len() - hit;
    }
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        0.0
    } else {
        2.0 * tp as f64 / denom as f64
    }
}

/// Splits labeled nodes into (train, test), stratified by each node's
/// smallest label: every stratum contributes `round(fraction·size)` nodes to
/// training, but at least one to each side when it has two or more members.
pub(crate) fn stratified_split(labels: &[LabelSet], fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut strata: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (v, set) in labels.iter().enumerate() {
        if let Some(&first) = set.iter().next() {
            strata.entry(first).or_default().push(v);
        }
    }
    let mut rng = rng::seeded(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for members in strata.values_mut() {
        members.shuffle(&mut rng);
        let size = members.len();
        let mut k = (fraction * size as f64).round() as usize;
        if size >= 2 {
            k = k.clamp(1, size - 1);
        }
        train.extend_from_slice(&members[..k]);
        test.extend_from_slice(&members[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

fn standardized(emb: &EmbeddingMatrix, train: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let d = emb.dim();
    let n = train.len() as f64;
    let mut mean = vec![0.0; d];
    for &v in train {
        mean.iter_mut().zip(emb.row(v)).for_each(|(m, x)| *m += x / n);
    }
    let mut sd = vec![0.0; d];
    for &v in train {
        sd.iter_mut()
            .zip(emb.row(v))
            .zip(&mean)
            .for_each(|((s, x), m)| *s += (x - m) * (x - m) / n);
    }
    sd.iter_mut().for_each(|s| *s = if *s > 0.0 { s.sqrt() } else { 1.0 });
    (mean, sd)
}

fn features(emb: &EmbeddingMatrix, nodes: &[usize], mean: &[f64], sd: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .flat_map(|&v| emb.row(v).iter().zip(mean).zip(sd).map(|((x, m), s)| (x - m) / s))
        .collect()
}

pub fn node_classification(
    emb: &EmbeddingMatrix,
    labels: &[LabelSet],
    train_fraction: f64,
    seed: u64,
    metric: Metric,
) -> Result<EvalResult, EvalError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(EvalError::InvalidFraction(train_fraction));
    }
    if emb.rows() != labels.len() {
        return Err(EvalError::ShapeMismatch {
            rows: emb.rows(),
            nodes: labels.len(),
        });
    }
    let universe: BTreeSet<u32> = labels.iter().flatten().copied().collect();
    if universe.is_empty() {
        return Err(EvalError::NoLabels);
    }
    let (train, test) = stratified_split(labels, train_fraction, seed);
    if train.is_empty() || test.is_empty() {
        return Err(EvalError::TooFewLabeledNodes(train.len() + test.len()));
    }
    let (mean, sd) = standardized(emb, &train);
    let x_train = features(emb, &train, &mean, &sd);
    let x_test = features(emb, &test, &mean, &sd);
    let d = emb.dim();

    let mut skipped = Vec::new();
    let mut scores: Vec<Vec<(f64, u32)>> = vec![Vec::with_capacity(universe.len()); test.len()];
    for &label in &universe {
        let y: Vec<bool> = train.iter().map(|&v| labels[v].contains(&label)).collect();
        if !y.iter().any(|&b| b) {
            skipped.push(label);
            continue;
        }
        let model = train_logistic(&x_train, &y, d, L2_STRENGTH, MAX_ITERATIONS);
        for (i, row) in x_test.chunks(d).enumerate() {
            scores[i].push((model.score(row), label));
        }
    }

    let truth: Vec<LabelSet> = test.iter().map(|&v| labels[v].clone()).collect();
    let predicted: Vec<LabelSet> = scores
        .iter_mut()
        .zip(&truth)
        .map(|(s, t)| {
            s.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            let k = match metric {
                Metric::Accuracy => 1,
                _ => t.len(),
            };
            s.iter().take(k).map(|&(_, l)| l).collect()
        })
        .collect();
    let value = match metric {
        Metric::Accuracy => {
            let hits = predicted.iter().zip(&truth).filter(|(p, t)| p.iter().any(|l| t.contains(l))).count();
            hits as f64 / truth.len() as f64
        }
        _ => micro_f1(&predicted, &truth),
    };
    Ok(EvalResult {
        task: Task::Classification,
        metric: if metric == Metric::Accuracy { Metric::Accuracy } else { Metric::MicroF1 },
        value,
        seed,
        details: json!({
            "train_nodes": train.len(),
            "test_nodes": test.len(),
            "labels": universe.len(),
            "skipped_labels": skipped,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn set(labels: &[u32]) -> LabelSet {
        labels.iter().copied().collect()
    }

    #[test]
    fn loss_never_increases() {
        let mut rng = rng::seeded(4);
        let (n, d) = (80, 5);
        let x: Vec<f64> = (0..n * d).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
        let y: Vec<bool> = (0..n).map(|i| x[i * d] + 0.3 * x[i * d + 1] > 0.1).collect();
        let m = train_logistic(&x, &y, d, 1.0, 500);
        assert!(m.losses.len() > 2);
        for pair in m.losses.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
    }

    #[test]
    fn one_hot_embeddings_classify_perfectly() {
        let classes = 3;
        let n = 60;
        let values: Vec<f64> = (0..n)
            .flat_map(|v| (0..classes).map(move |c| if v % classes == c { 1.0 } else { 0.0 }))
            .collect();
        let emb = EmbeddingMatrix::new(n, classes, values).unwrap();
        let labels: Vec<LabelSet> = (0..n).map(|v| set(&[(v % classes) as u32])).collect();
        let r = node_classification(&emb, &labels, 0.2, 1, Metric::MicroF1).unwrap();
        assert_eq!(r.value, 1.0);
        let acc = node_classification(&emb, &labels, 0.2, 1, Metric::Accuracy).unwrap();
        assert_eq!(acc.value, 1.0);
    }

    #[test]
    fn micro_f1_edge_cases() {
        let truth = vec![set(&[1]), set(&[2, 3])];
        assert_eq!(micro_f1(&[set(&[]), set(&[])], &truth), 0.0);
        assert_eq!(micro_f1(&truth, &truth), 1.0);
        // tp=1 fp=1 fn=2 -> 2/(2+1+2)
        assert!((micro_f1(&[set(&[1, 5]), set(&[])], &truth) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn split_is_stratified_and_seeded() {
        let labels: Vec<LabelSet> = (0..50)
            .map(|v| if v % 10 == 0 { set(&[]) } else { set(&[(v % 2) as u32, 7]) })
            .collect();
        let (train, test) = stratified_split(&labels, 0.2, 3);
        assert_eq!(train.len() + test.len(), 45);
        assert_eq!(train.iter().filter(|&&v| v % 2 == 0).count(), 4);
        assert_eq!(train.iter().filter(|&&v| v % 2 == 1).count(), 5);
        assert_eq!((train.clone(), test.clone()), stratified_split(&labels, 0.2, 3));
    }

    #[test]
    fn unseen_label_is_reported() {
        let emb = EmbeddingMatrix::new(4, 1, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        // label 9 sits alone in its stratum and lands in the test set
        let labels = vec![set(&[1]), set(&[1]), set(&[1]), set(&[9])];
        let r = node_classification(&emb, &labels, 0.4, 0, Metric::MicroF1).unwrap();
        assert_eq!(r.details["skipped_labels"], json!([9]));
    }

    #[test]
    fn label_input_order_does_not_matter() {
        let mut rng = rng::seeded(2);
        let emb = EmbeddingMatrix::new(40, 3, (0..120).map(|_| rng.gen()).collect()).unwrap();
        let a: Vec<LabelSet> = (0..40).map(|v| set(&[(v % 3) as u32, 5])).collect();
        let b: Vec<LabelSet> = (0..40).map(|v| set(&[5, (v % 3) as u32])).collect();
        let ra = node_classification(&emb, &a, 0.2, 8, Metric::MicroF1).unwrap();
        let rb = node_classification(&emb, &b, 0.2, 8, Metric::MicroF1).unwrap();
        assert_eq!(ra, rb);
    }
}
