//! The append-only record of every embedder run a tuner performs.
//!
//! Persisted as JSON lines, one trial per line:
//!
//! ```text
//! {"index":0,"phase":"timing","graph":"original","config":{...},"performance":0.91,
//!  "metric":"AUC","status":"ok","elapsed_secs":1.0,"at_secs":1.0,"seed":123}
//! ```
//!
//! `performance` is `null` for failed trials, which then carry an `error`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::space::Configuration;
use crate::eval::Metric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "timing")]
    Timing,
    #[serde(rename = "1-synopsis")]
    Synopsis,
    #[serde(rename = "1-original")]
    Original,
    #[serde(rename = "2-refine")]
    Refine,
    #[serde(rename = "random")]
    Random,
    #[serde(rename = "gp-init")]
    GpInit,
    #[serde(rename = "gp")]
    Gp,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Timing => "timing",
            Phase::Synopsis => "1-synopsis",
            Phase::Original => "1-original",
            Phase::Refine => "2-refine",
            Phase::Random => "random",
            Phase::GpInit => "gp-init",
            Phase::Gp => "gp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphTag {
    Original,
    Synopsis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    pub phase: Phase,
    pub graph: GraphTag,
    pub config: Configuration,
    pub performance: Option<f64>,
    pub metric: Metric,
    pub status: TrialStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Cost of this run: measured wall time, or charged time under a
    /// round-count budget.
    pub elapsed_secs: f64,
    /// Tuner clock when the run completed.
    pub at_secs: f64,
    pub seed: u64,
}

impl Trial {
    /// Performance for ranking; failed trials rank below everything.
    pub fn score(&self) -> f64 {
        self.performance.unwrap_or(f64::NEG_INFINITY)
    }

    pub fn succeeded(&self) -> bool {
        self.status == TrialStatus::Ok
    }
}

/// One row of the incumbent-versus-time curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub at_secs: f64,
    pub trial: usize,
    pub phase: Phase,
    pub performance: Option<f64>,
    /// Best original-graph performance so far.
    pub incumbent: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrialLog {
    trials: Vec<Trial>,
}

impl TrialLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a trial; indices must be consecutive and timestamps monotone.
    pub fn push(&mut self, trial: Trial) {
        assert_eq!(trial.index, self.trials.len(), "trial indices are consecutive");
        if let Some(last) = self.trials.last() {
            assert!(trial.at_secs >= last.at_secs, "trial timestamps are monotone");
        }
        self.trials.push(trial);
    }

    pub fn trials(&self) -> &[Trial] {
        &self.trials
    }

    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    pub fn last_at(&self) -> f64 {
        self.trials.last().map_or(0.0, |t| t.at_secs)
    }

    /// Earliest successful trial of maximal performance among those matching
    /// `filter`.
    pub fn best_where(&self, filter: impl Fn(&Trial) -> bool) -> Option<&Trial> {
        let mut best: Option<&Trial> = None;
        for t in self.trials.iter().filter(|t| t.succeeded() && filter(t)) {
            if best.is_none_or(|b| t.score() > b.score()) {
                best = Some(t);
            }
        }
        best
    }

    pub fn count_where(&self, filter: impl Fn(&Trial) -> bool) -> usize {
        self.trials.iter().filter(|t| filter(t)).count()
    }

    pub fn curve(&self) -> Vec<CurvePoint> {
        let mut incumbent: Option<f64> = None;
        self.trials
            .iter()
            .map(|t| {
                if t.graph == GraphTag::Original && t.succeeded() {
                    incumbent = Some(incumbent.map_or(t.score(), |b| b.max(t.score())));
                }
                CurvePoint {
                    at_secs: t.at_secs,
                    trial: t.index,
                    phase: t.phase,
                    performance: t.performance,
                    incumbent,
                }
            })
            .collect()
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for t in &self.trials {
            serde_json::to_writer(&mut out, t)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(source: R) -> Result<Self, serde_json::Error> {
        let mut log = Self::new();
        for line in source.lines() {
            let line = line.map_err(serde_json::Error::io)?;
            if line.trim().is_empty() {
                continue;
            }
            log.trials.push(serde_json::from_str(&line)?);
        }
        Ok(log)
    }
}
