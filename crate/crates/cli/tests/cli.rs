use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jitune::graph::{write_edge_list, write_labels};
use jitune::synthetic::stochastic_block_model;

fn jitune(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jitune"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn fixture(dir: &Path) -> (String, String) {
    let g = stochastic_block_model(&[60, 60], 0.15, 0.01, 3);
    let edges = dir.join("g.edgelist");
    let labels = dir.join("g.labels");
    write_edge_list(&g, std::fs::File::create(&edges).unwrap()).unwrap();
    write_labels(&g, std::fs::File::create(&labels).unwrap()).unwrap();
    (edges.to_string_lossy().into(), labels.to_string_lossy().into())
}

fn path(p: PathBuf) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn tune_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, _) = fixture(dir.path());
    let out = dir.path().join("run");
    let res = jitune(&[
        "tune", "--edges", &edges, "--embedder", "spectral", "--budget-rounds", "8", "--seed", "1", "--out", &path(out.clone()),
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    for file in ["trials.jsonl", "trials.csv", "curve.csv", "summary.json", "best_config.json"] {
        assert!(out.join(file).is_file(), "missing {file}");
    }
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["clock"], "rounds");
    assert!(summary["best_performance"].as_f64().unwrap() > 0.5);
    let stdout: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert!(stdout["best_config"].is_object());
}

#[test]
fn classification_tune_with_labels() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, labels) = fixture(dir.path());
    let out = dir.path().join("nc");
    let res = jitune(&[
        "tune", "--edges", &edges, "--labels", &labels, "--embedder", "spectral", "--task", "classification",
        "--budget-rounds", "6", "--out", &path(out.clone()),
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let csv = std::fs::read_to_string(out.join("trials.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().contains("MicroF1") || csv.contains("micro"), "{csv}");
}

#[test]
fn missing_edge_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let res = jitune(&["tune", "--edges", "/no/such/graph.txt", "--budget-rounds", "4", "--out", &path(dir.path().join("x"))]);
    assert_eq!(res.status.code(), Some(1));
    let err = stderr(&res);
    assert!(err.contains("/no/such/graph.txt"), "{err}");
    let line: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(line["error"], "invalid");
}

#[test]
fn budget_flags_are_exclusive_and_required() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, _) = fixture(dir.path());
    let out = path(dir.path().join("x"));
    let none = jitune(&["tune", "--edges", &edges, "--out", &out]);
    assert_eq!(none.status.code(), Some(1));
    let both = jitune(&["tune", "--edges", &edges, "--budget-rounds", "4", "--budget-seconds", "2", "--out", &out]);
    assert_eq!(both.status.code(), Some(1));
    assert!(stderr(&both).contains("\"usage\""), "{}", stderr(&both));
}

#[test]
fn all_failed_trials_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, _) = fixture(dir.path());
    let res = jitune(&[
        "tune", "--edges", &edges, "--plugin-cmd", "/bin/false", "--budget-rounds", "4", "--out", &path(dir.path().join("f")),
    ]);
    assert_eq!(res.status.code(), Some(2), "{}", stderr(&res));
    assert!(stderr(&res).contains("all_trials_failed"));
    assert!(dir.path().join("f/trials.jsonl").is_file());
}

#[test]
fn coarsen_writes_levels() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, labels) = fixture(dir.path());
    let out = dir.path().join("chain");
    let res = jitune(&["coarsen", "--edges", &edges, "--labels", &labels, "--out", &path(out.clone())]);
    assert!(res.status.success(), "{}", stderr(&res));
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("level,nodes,edges,alpha,delta_w,kl\n"));
    let rows = summary.lines().count() - 1;
    assert!(rows >= 1);
    for level in 1..=rows {
        for ext in ["edgelist", "projection", "labels"] {
            assert!(out.join(format!("level_{level}.{ext}")).is_file(), "level {level} {ext}");
        }
    }
}

#[test]
fn eval_scores_an_embedding_file() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, _) = fixture(dir.path());
    let emb = dir.path().join("emb.txt");
    let rows: String = (0..120).map(|i| format!("{i} {} {}\n", (i / 60) as f64, 1.0 - (i / 60) as f64)).collect();
    std::fs::write(&emb, rows).unwrap();
    let res = jitune(&["eval", "--edges", &edges, "--embedding", &path(emb)]);
    assert!(res.status.success(), "{}", stderr(&res));
    let result: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(result["metric"], "AUC");
    // block-indicator scores tie on every same-block pair
    assert!(result["value"].as_f64().unwrap() > 0.65);
}

#[test]
fn eval_rejects_short_embedding() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, _) = fixture(dir.path());
    let emb = dir.path().join("emb.txt");
    std::fs::write(&emb, "0 1 2\n").unwrap();
    let res = jitune(&["eval", "--edges", &edges, "--embedding", &path(emb)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(stderr(&res).contains("emb.txt"));
}

#[test]
fn compare_table_has_one_row_per_method_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, _) = fixture(dir.path());
    let out = dir.path().join("cmp");
    let res = jitune(&[
        "compare", "--edges", &edges, "--embedder", "spectral", "--methods", "jitune,random,gp", "--budget-rounds", "8",
        "--seeds", "2", "--out", &path(out.clone()),
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let table = std::fs::read_to_string(out.join("compare.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "method,seed,performance,metric,wall_secs,rounds_used");
    assert_eq!(lines.len(), 1 + 3 * 2);
    for row in &lines[1..] {
        let fields: Vec<&str> = row.split(',').collect();
        assert!(fields[2].parse::<f64>().is_ok(), "{row}");
        assert!(fields[5].parse::<f64>().unwrap() <= 8.0, "{row}");
    }
}

#[test]
fn compare_needs_two_methods() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, _) = fixture(dir.path());
    let res = jitune(&["compare", "--edges", &edges, "--methods", "jitune", "--budget-rounds", "8", "--out", &path(dir.path().join("c"))]);
    assert_eq!(res.status.code(), Some(1));
    assert!(stderr(&res).contains("\"usage\""));
}
