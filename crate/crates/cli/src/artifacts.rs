//! Files written by the commands.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use jitune::tune::{TrialLog, TuneOutcome};
use serde::Serialize;

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// One row per trial: index, phase, graph, one column per hyperparameter,
/// then performance, metric, status, elapsed_secs, at_secs, seed, error.
pub fn write_trials_csv(path: &Path, log: &TrialLog) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let names: Vec<String> = log
        .trials()
        .first()
        .map(|t| t.config.entries().iter().map(|(k, _)| k.clone()).collect())
        .unwrap_or_default();
    let mut header = vec!["index".to_string(), "phase".into(), "graph".into()];
    header.extend(names.iter().cloned());
    header.extend(
        ["performance", "metric", "status", "elapsed_secs", "at_secs", "seed", "error"]
            .iter()
            .map(|s| s.to_string()),
    );
    w.write_record(&header)?;
    for t in log.trials() {
        let mut row = vec![
            t.index.to_string(),
            t.phase.as_str().to_string(),
            serde_json::to_value(t.graph)?.as_str().unwrap_or_default().to_string(),
        ];
        for name in &names {
            row.push(t.config.get(name).map(|v| v.to_string()).unwrap_or_default());
        }
        row.push(t.performance.map(|p| p.to_string()).unwrap_or_default());
        row.push(t.metric.to_string());
        row.push(if t.succeeded() { "ok" } else { "failed" }.to_string());
        row.push(t.elapsed_secs.to_string());
        row.push(t.at_secs.to_string());
        row.push(t.seed.to_string());
        row.push(t.error.clone().unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Incumbent-versus-time table, one row per completed trial.
pub fn write_curve_csv(path: &Path, log: &TrialLog) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["at_secs", "trial", "phase", "performance", "incumbent"])?;
    for p in log.curve() {
        w.write_record([
            p.at_secs.to_string(),
            p.trial.to_string(),
            p.phase.as_str().to_string(),
            p.performance.map(|x| x.to_string()).unwrap_or_default(),
            p.incumbent.map(|x| x.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_tune_artifacts(dir: &Path, outcome: &TuneOutcome, extra: serde_json::Value) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut jsonl = create(&dir.join("trials.jsonl"))?;
    outcome.log.write_jsonl(&mut jsonl)?;
    jsonl.flush()?;
    write_trials_csv(&dir.join("trials.csv"), &outcome.log)?;
    write_curve_csv(&dir.join("curve.csv"), &outcome.log)?;
    let mut summary = serde_json::to_value(&outcome.summary)?;
    if let (Some(map), serde_json::Value::Object(more)) = (summary.as_object_mut(), extra) {
        map.insert("best_performance".into(), serde_json::json!(outcome.best_performance));
        map.insert("best_trial".into(), serde_json::json!(outcome.best_trial));
        map.extend(more);
    }
    write_json(&dir.join("summary.json"), &summary)?;
    if let Some(best) = &outcome.best {
        write_json(&dir.join("best_config.json"), best)?;
    }
    Ok(())
}
