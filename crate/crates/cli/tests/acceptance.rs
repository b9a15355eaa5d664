//! Acceptance suite: one check per criterion, each printed as a PASS/FAIL
//! line. Runs without the libtest harness so the lines always show up; the
//! process exits non-zero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use jitune::coarsen::{build_chain, extend_synopsis, kl_divergence, Synopsis};
use jitune::embed::{top_eigenpairs, ComplexityClass, EmbedError, Embedder, EmbeddingMatrix, PluginEmbedder, Spectral};
use jitune::eval::{auc, Task};
use jitune::graph::{connected_components, write_edge_list, Graph};
use jitune::rng::{derive_seed, seeded, stream};
use jitune::synthetic::{erdos_renyi, stochastic_block_model};
use jitune::tune::{
    compute_rounds, is_subspace, lhs_sample, trim_space, tune_jitune, tune_random, BudgetSpec, Configuration, Dim,
    DimKind, HyperparameterSpace, JituneOptions, Ratio, TaskData, TaskSettings, TrialStatus, Value,
};
use rand::Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);
type ErrorKind = fn(&EmbedError) -> bool;

macro_rules! check {
    ($cond:expr, $($fmt:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($fmt)+));
        }
    };
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("budget conservation", budget_conservation),
        ("coarsening invariants", coarsening_invariants),
        ("auc oracle equivalence", auc_oracle),
        ("lhs stratification", lhs_stratification),
        ("trimming", trimming),
        ("tuner effectiveness", tuner_effectiveness),
        ("stability", stability),
        ("embedder numerics", embedder_numerics),
        ("determinism", determinism),
        ("plugin protocol", plugin_protocol),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = format!("{}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|p| *p == id || name.contains(p.as_str())) {
            continue;
        }
        let started = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {id:>2} PASS  {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

fn lp_settings() -> TaskSettings {
    TaskSettings::new(Task::LinkPrediction)
}

fn sbm_1000(seed: u64) -> Graph {
    stochastic_block_model(&[500, 500], 0.05, 0.005, seed)
}

// 1 ---------------------------------------------------------------------

fn budget_conservation() -> Check {
    let mut rng = seeded(1);
    for case in 0..100 {
        let t = rng.gen_range(1_000u64..10_000_000_000);
        let total = t * rng.gen_range(2u64..500) + rng.gen_range(0..t);
        let den = rng.gen_range(1u64..100_000);
        let rho = Ratio::new(rng.gen_range(1..=den), den);
        let b = compute_rounds(Duration::from_nanos(total), Duration::from_nanos(t), rho)
            .map_err(|e| format!("case {case}: {e}"))?;
        // exact integer check, multiplied through by rho.den
        let (t, total, num, den) = (t as u128, total as u128, rho.num as u128, rho.den as u128);
        let fixed = (1 + (b.original_rounds / 2) as u128) * t * den;
        let syn = b.synopsis_rounds as u128 * t * num;
        check!(b.original_rounds as u128 == total / t, "case {case}: R wrong");
        check!(
            fixed + syn <= total * den && total * den < fixed + syn + t * num,
            "case {case}: identity violated"
        );
    }

    let graph = sbm_1000(11);
    let settings = lp_settings();
    let data = TaskData::prepare(&graph, &settings, 1).map_err(|e| e.to_string())?;
    let budget = Duration::from_secs(8);
    let started = Instant::now();
    let out = tune_jitune(&Spectral::new(16), &data, &settings, &JituneOptions::new(BudgetSpec::Duration(budget), 3))
        .map_err(|e| e.to_string())?;
    let took = started.elapsed();
    check!(took <= budget.mul_f64(1.3), "tune took {took:?} for a {budget:?} budget");
    check!(out.best.is_some(), "no incumbent");
    Ok(format!(
        "100 triples exact; {}-run wall tune used {:.2}s of {:.0}s",
        out.log.len(),
        took.as_secs_f64(),
        budget.as_secs_f64()
    ))
}

// 2 ---------------------------------------------------------------------

fn coarsening_invariants() -> Check {
    let mut rng = seeded(2);
    let mut levels = 0;
    for case in 0..50u64 {
        let n = rng.gen_range(100..=2000);
        let degree = rng.gen_range(2.0..8.0);
        let g = if case % 2 == 0 {
            erdos_renyi(n, degree / n as f64, case)
        } else {
            let half = n / 2;
            stochastic_block_model(&[half, n - half], 2.0 * degree * 0.9 / n as f64, 2.0 * degree * 0.1 / n as f64, case)
        };
        let components = connected_components(&g).0;
        let chain = build_chain(&g, 0.5, false, case).map_err(|e| format!("case {case}: {e}"))?;
        let mut parent_w = g.recompute_total_weight();
        for m in &chain.members {
            levels += 1;
            let w = m.graph.recompute_total_weight();
            check!(
                connected_components(&m.graph).0 == components,
                "case {case} level {}: component count changed",
                m.level
            );
            check!(parent_w == w + m.delta_w, "case {case} level {}: W != W' + dW", m.level);
            let ext = extend_synopsis(m, &g);
            let expected = w + (g.node_count() - m.graph.node_count()) as f64;
            check!(
                ext.extended_total_weight == expected && ext.graph.recompute_total_weight() == expected,
                "case {case} level {}: W'_x mismatch",
                m.level
            );
            parent_w = w;
        }
        let kl = kl_divergence(&g, &extend_synopsis(&Synopsis::identity(&g), &g), 1.0).map_err(|e| e.to_string())?;
        check!(kl.abs() <= 1e-12, "case {case}: identity KL = {kl}");
    }
    Ok(format!("50 graphs, {levels} levels"))
}

// 3 ---------------------------------------------------------------------

fn brute_force_auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut wins = 0.0;
    for p in pos {
        for n in neg {
            if p > n {
                wins += 1.0;
            } else if p == n {
                wins += 0.5;
            }
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

fn draw_score(rng: &mut impl Rng, tied: bool) -> f64 {
    if tied {
        rng.gen_range(0..6) as f64
    } else {
        rng.gen_range(-3.0..3.0)
    }
}

fn auc_oracle() -> Check {
    let mut rng = seeded(3);
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let np = rng.gen_range(1..80);
        let nn = rng.gen_range(1..80);
        let tied = case % 2 == 0;
        let pos: Vec<f64> = (0..np).map(|_| draw_score(&mut rng, tied)).collect();
        let neg: Vec<f64> = (0..nn).map(|_| draw_score(&mut rng, tied)).collect();
        let got = auc(&pos, &neg).map_err(|e| e.to_string())?;
        let diff = (got - brute_force_auc(&pos, &neg)).abs();
        worst = worst.max(diff);
        check!(diff <= 1e-12, "case {case}: |diff| = {diff:e}");
    }
    Ok(format!("1000 sets, max |diff| {worst:e}"))
}

// 4 ---------------------------------------------------------------------

fn lhs_stratification() -> Check {
    let space = HyperparameterSpace::new(vec![
        Dim::float("lin", -2.0, 7.5),
        Dim::log_float("log", 1e-5, 10.0),
        Dim::float("unit", 0.0, 1.0),
        Dim::categorical("cat", &["a", "b", "c"]),
        Dim::categorical("pair", &["x", "y"]),
    ])
    .map_err(|e| e.to_string())?;
    let mut samples = 0;
    for r in [2usize, 5, 17, 64] {
        for seed in 0..20 {
            let configs = lhs_sample(&space, r, seed).map_err(|e| e.to_string())?;
            check!(configs.len() == r, "r={r}: got {} samples", configs.len());
            samples += r;
            for dim in space.dims() {
                let values: Vec<&Value> = configs.iter().map(|c| c.get(&dim.name).unwrap()).collect();
                match &dim.kind {
                    DimKind::Numeric { .. } => {
                        let mut hits = vec![0usize; r];
                        for v in &values {
                            let t = dim.unit_position(v).unwrap();
                            hits[((t * r as f64) as usize).min(r - 1)] += 1;
                        }
                        check!(hits.iter().all(|&h| h == 1), "r={r} seed {seed} dim {}: strata {hits:?}", dim.name);
                    }
                    DimKind::Categorical { choices } => {
                        let counts: Vec<usize> = choices
                            .iter()
                            .map(|c| values.iter().filter(|v| v.to_string() == *c).count())
                            .collect();
                        let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
                        check!(hi - lo <= 1, "r={r} seed {seed} dim {}: counts {counts:?}", dim.name);
                    }
                }
            }
        }
    }
    Ok(format!("{samples} samples over r in {{2,5,17,64}} x 20 seeds"))
}

// 5 ---------------------------------------------------------------------

fn random_space(rng: &mut impl Rng) -> HyperparameterSpace {
    let mut dims = Vec::new();
    for i in 0..rng.gen_range(1..5) {
        let name = format!("d{i}");
        let dim = match rng.gen_range(0..4) {
            0 => {
                let lo = rng.gen_range(-100.0..100.0);
                Dim::float(&name, lo, lo + rng.gen_range(0.01..50.0))
            }
            1 => {
                let lo = 10f64.powf(rng.gen_range(-6.0..1.0));
                Dim::log_float(&name, lo, lo * 10f64.powf(rng.gen_range(0.5..6.0)))
            }
            2 => {
                let lo = rng.gen_range(-50..50);
                Dim::int(&name, lo, lo + rng.gen_range(200..2000))
            }
            _ => Dim::categorical(&name, &["p", "q", "r", "s"][..rng.gen_range(1..5)]),
        };
        dims.push(dim);
    }
    HyperparameterSpace::new(dims).expect("generated space is valid")
}

fn log_width(dim: &Dim) -> Option<f64> {
    match dim.kind {
        DimKind::Numeric { lo, hi, log_scale, .. } => Some(if log_scale { hi.ln() - lo.ln() } else { hi - lo }),
        DimKind::Categorical { .. } => None,
    }
}

fn trimming() -> Check {
    let mut rng = seeded(5);
    let mut worst = 0.0f64;
    for case in 0..200 {
        let space = random_space(&mut rng);
        let best = space.sample_uniform(&mut rng);
        let alpha = rng.gen_range(0.01..0.95);
        let trimmed = trim_space(&space, &best, alpha).map_err(|e| format!("case {case}: {e}"))?;
        check!(is_subspace(&trimmed, &space), "case {case}: not a subspace");
        check!(trimmed.contains(&best), "case {case}: best outside trimmed space");
        for (before, after) in space.dims().iter().zip(trimmed.dims()) {
            match (log_width(before), log_width(after)) {
                (Some(w), Some(w2)) => {
                    let err = (w2 - (1.0 - alpha) * w).abs() / w.max(1.0);
                    worst = worst.max(err);
                    check!(err <= 1e-12, "case {case} dim {}: width {w2} vs {}", before.name, (1.0 - alpha) * w);
                }
                (None, None) => {
                    if let DimKind::Categorical { choices } = &after.kind {
                        check!(
                            alpha < 0.5 || choices.len() == 1,
                            "case {case} dim {}: categorical not fixed",
                            before.name
                        );
                    }
                }
                _ => return Err(format!("case {case}: dim kind changed")),
            }
        }
    }
    Ok(format!("200 cases, max relative width error {worst:e}"))
}

// 6 ---------------------------------------------------------------------

fn tuner_effectiveness() -> Check {
    let graph = sbm_1000(6);
    let settings = lp_settings();
    let emb = Spectral::new(16);
    let (mut ours, mut theirs) = (Vec::new(), Vec::new());
    for seed in 0..10u64 {
        let data = TaskData::prepare(&graph, &settings, derive_seed(seed, stream::SPLIT)).map_err(|e| e.to_string())?;
        let j = tune_jitune(&emb, &data, &settings, &JituneOptions::new(BudgetSpec::Rounds(20), seed))
            .map_err(|e| e.to_string())?;
        let r = tune_random(&emb, &data, &settings, 20, seed, 1);
        ours.push(j.best_performance.ok_or("jitune found nothing")?);
        theirs.push(r.best_performance.ok_or("random found nothing")?);
    }
    let (mj, mr) = (median(ours), median(theirs));
    check!(mj >= mr - 0.01, "median AUC jitune {mj:.4} < random {mr:.4} - 0.01");
    Ok(format!("median AUC jitune {mj:.4}, random {mr:.4} (10 seeds, 20 rounds)"))
}

// 7 ---------------------------------------------------------------------

fn stability() -> Check {
    let graph = sbm_1000(7);
    let settings = lp_settings();
    let data = TaskData::prepare(&graph, &settings, 7).map_err(|e| e.to_string())?;
    let emb = Spectral::new(16);
    let mut finals = Vec::new();
    for seed in 0..5u64 {
        let mut opts = JituneOptions::new(BudgetSpec::Rounds(20), 100 + seed);
        opts.synopsis_only = true;
        let out = tune_jitune(&emb, &data, &settings, &opts).map_err(|e| e.to_string())?;
        finals.push(out.best_performance.ok_or("no final performance")?);
    }
    let mean = finals.iter().sum::<f64>() / finals.len() as f64;
    let sd = (finals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (finals.len() - 1) as f64).sqrt();
    check!(sd <= 0.01, "sd {sd:.5} over {finals:?}");
    Ok(format!("5 runs, mean {mean:.4}, sd {sd:.5}"))
}

// 8 ---------------------------------------------------------------------

fn weights(w: [f64; 3]) -> Configuration {
    Configuration::from_entries(vec![
        ("w1".into(), Value::Float(w[0])),
        ("w2".into(), Value::Float(w[1])),
        ("w3".into(), Value::Float(w[2])),
    ])
}

fn embedder_numerics() -> Check {
    let mut worst = 0.0f64;
    for case in 0..20u64 {
        let n = [60, 150, 300, 600][case as usize % 4];
        let g = if case % 2 == 0 {
            erdos_renyi(n, 6.0 / n as f64, case)
        } else {
            stochastic_block_model(&[n / 2, n - n / 2], 12.0 / n as f64, 1.0 / n as f64, case)
        };
        let pairs = top_eigenpairs(&g, 16, case).map_err(|e| e.to_string())?;
        for (lambda, x) in pairs.values.iter().zip(&pairs.vectors) {
            let mut r2 = 0.0;
            for u in 0..g.node_count() {
                let ax: f64 = g.neighbors(u).iter().map(|&(v, w)| w * x[v]).sum();
                r2 += (ax - lambda * x[u]).powi(2);
            }
            worst = worst.max(r2.sqrt());
        }
        check!(worst <= 1e-5, "case {case}: residual {worst:e}");
    }

    let single = top_eigenpairs(&Graph::unweighted(2, &[(0, 1)]), 1, 0).map_err(|e| e.to_string())?;
    check!((single.values[0] - 1.0).abs() <= 1e-6, "single edge lambda {}", single.values[0]);
    for &c in &single.vectors[0] {
        check!((c - 0.5f64.sqrt()).abs() <= 1e-6, "single edge vector {:?}", single.vectors[0]);
    }
    let tri = top_eigenpairs(&Graph::unweighted(3, &[(0, 1), (1, 2), (0, 2)]), 1, 0).map_err(|e| e.to_string())?;
    check!((tri.values[0] - 2.0).abs() <= 1e-6, "triangle lambda {}", tri.values[0]);
    for &c in &tri.vectors[0] {
        check!((c - 1.0 / 3f64.sqrt()).abs() <= 1e-6, "triangle vector {:?}", tri.vectors[0]);
    }

    let g = stochastic_block_model(&[150, 150], 0.08, 0.01, 8);
    let emb = Spectral::new(8);
    let run = |w: [f64; 3]| emb.embed(&g, &weights(w), 8).map_err(|e| e.to_string());
    let (a, b) = ([0.3, 1.1, 0.02], [1.7, 0.05, 0.9]);
    let ea = run(a)?;
    let eb = run(b)?;
    let esum = run([a[0] + b[0], a[1] + b[1], a[2] + b[2]])?;
    let escaled = run([2.5 * a[0], 2.5 * a[1], 2.5 * a[2]])?;
    let mut lin = 0.0f64;
    for i in 0..ea.values().len() {
        lin = lin.max((esum.values()[i] - ea.values()[i] - eb.values()[i]).abs());
        lin = lin.max((escaled.values()[i] - 2.5 * ea.values()[i]).abs());
    }
    check!(lin <= 1e-12, "linearity error {lin:e}");
    Ok(format!("max residual {worst:e}, linearity error {lin:e}"))
}

// 9 ---------------------------------------------------------------------

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_jitune"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(())
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let edges = dir.path().join("sbm.edgelist");
    let g = stochastic_block_model(&[150, 150], 0.08, 0.01, 9);
    write_edge_list(&g, std::fs::File::create(&edges).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let edges = edges.to_str().unwrap().to_string();
    let runs = [("a", "1"), ("b", "1"), ("c", "4")];
    for (name, workers) in runs {
        let out = dir.path().join(name);
        run_cli(&[
            "tune",
            "--edges",
            &edges,
            "--embedder",
            "spectral",
            "--budget-rounds",
            "16",
            "--seed",
            "17",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ])?;
    }
    let read = |run: &str, file: &str| std::fs::read(dir.path().join(run).join(file)).map_err(|e| format!("{run}/{file}: {e}"));
    let mut trials = 0;
    for file in ["best_config.json", "trials.jsonl", "trials.csv", "curve.csv"] {
        let reference = read("a", file)?;
        check!(!reference.is_empty(), "{file} is empty");
        for run in ["b", "c"] {
            check!(read(run, file)? == reference, "{file} differs between run a and run {run}");
        }
        if file == "trials.jsonl" {
            trials = reference.iter().filter(|&&b| b == b'\n').count();
        }
    }
    Ok(format!("{trials} trials byte-identical across 2 runs and workers 1/4"))
}

// 10 --------------------------------------------------------------------

fn script(dir: &Path, name: &str, body: &str) -> String {
    use std::os::unix::fs::PermissionsExt;
    let path = dir.join(name);
    std::fs::write(&path, format!("#!/bin/sh\nfor a; do out=$a; done\n{body}\n")).unwrap();
    std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
    path.to_string_lossy().into_owned()
}

fn plugin_protocol() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let space = HyperparameterSpace::new(vec![Dim::float("x", 0.0, 1.0)]).map_err(|e| e.to_string())?;
    let g = erdos_renyi(40, 0.15, 10);
    let plugin = |cmd: &str| PluginEmbedder::new("echo", cmd, space.clone(), ComplexityClass::E);

    // bit-exact round trip of awkward floats
    let mut rng = seeded(10);
    let mut text = String::new();
    for node in 0..g.node_count() {
        let a: f64 = rng.gen_range(-1e3..1e3);
        let b = 0.1 + 0.2 * node as f64;
        let c = f64::MIN_POSITIVE * (node + 1) as f64;
        text.push_str(&format!("{node} {a:e} {b} {c:e}\n"));
    }
    let fixed = dir.path().join("fixed.txt");
    std::fs::write(&fixed, &text).map_err(|e| e.to_string())?;
    let echo = script(dir.path(), "echo.sh", &format!("cp '{}' \"$out\"", fixed.display()));
    let got = plugin(&echo).embed(&g, &space.center(), 1).map_err(|e| e.to_string())?;
    let expected = EmbeddingMatrix::read_text(text.as_bytes(), g.node_count()).map_err(|e| e.to_string())?;
    check!(
        got.values().iter().zip(expected.values()).all(|(a, b)| a.to_bits() == b.to_bits()),
        "round trip is not bit-exact"
    );

    // the error taxonomy, one variant per misbehaviour
    let center = space.center();
    let cases: Vec<(&str, String, ErrorKind)> = vec![
        ("exit", script(dir.path(), "fail.sh", "echo boom >&2; exit 3"), |e| {
            matches!(e, EmbedError::NonZeroExit { stderr, .. } if stderr == "boom")
        }),
        ("missing", script(dir.path(), "silent.sh", "exit 0"), |e| matches!(e, EmbedError::MissingOutput)),
        ("malformed", script(dir.path(), "bad.sh", "printf '0 zz\\n' > \"$out\""), |e| {
            matches!(e, EmbedError::Malformed { .. })
        }),
        ("short", script(dir.path(), "short.sh", "printf '0 1\\n' > \"$out\""), |e| {
            matches!(e, EmbedError::Incomplete { .. })
        }),
        ("nan", script(dir.path(), "nan.sh", &format!("sed '1s/.*/0 NaN 1 1/' '{}' > \"$out\"", fixed.display())), |e| {
            matches!(e, EmbedError::NonFinite { .. })
        }),
        ("spawn", "/nonexistent/plugin".to_string(), |e| matches!(e, EmbedError::Spawn { .. })),
    ];
    for (name, cmd, expected) in &cases {
        match plugin(cmd).embed(&g, &center, 0) {
            Err(e) if expected(&e) => {}
            other => return Err(format!("{name}: unexpected {other:?}")),
        }
    }
    let slow = script(dir.path(), "slow.sh", "sleep 5");
    match plugin(&slow).with_timeout(Duration::from_millis(300)).embed(&g, &center, 0) {
        Err(EmbedError::Timeout(_)) => {}
        other => return Err(format!("timeout: unexpected {other:?}")),
    }

    // a plugin that fails on part of the space does not abort the tune
    let flaky = script(
        dir.path(),
        "flaky.sh",
        &format!(
            "x=$(sed -n 's/^x=//p' \"$(dirname \"$out\")/config.txt\")\n\
             if awk -v x=\"$x\" 'BEGIN {{ exit !(x > 0.5) }}'; then echo \"x=$x too large\" >&2; exit 2; fi\n\
             awk -v x=\"$x\" 'BEGIN {{ for (i = 0; i < {n}; i++) printf \"%d %.6f %d\\n\", i, x * (i % 7), i % 3 }}' > \"$out\"",
            n = g.node_count()
        ),
    );
    let settings = lp_settings();
    let data = TaskData::prepare(&g, &settings, 3).map_err(|e| e.to_string())?;
    let out = tune_random(&plugin(&flaky), &data, &settings, 12, 4, 2);
    let failed = out.log.trials().iter().filter(|t| t.status == TrialStatus::Failed).count();
    check!(out.log.len() == 12, "tune stopped after {} trials", out.log.len());
    check!(failed > 0 && failed < 12, "{failed} of 12 trials failed");
    check!(
        out.log
            .trials()
            .iter()
            .filter(|t| t.status == TrialStatus::Failed)
            .all(|t| t.error.as_deref().is_some_and(|e| e.contains("too large"))),
        "failed trials lack the plugin's stderr"
    );
    check!(out.best.is_some(), "no incumbent despite successful trials");
    Ok(format!("bit-exact echo, 7 error kinds, tune survived {failed}/12 failures"))
}
