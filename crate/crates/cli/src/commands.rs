use std::fmt;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;
use std::time::Duration;

use anyhow::{bail, ensure, Context, Result};
use jitune::coarsen::{build_chain_with, extend_synopsis, kl_divergence, write_projection, ChainConfig, DEFAULT_KL_SMOOTHING};
use jitune::embed::{gcn_space, native_embedder, ComplexityClass, Embedder, EmbeddingMatrix, PluginEmbedder};
use jitune::eval::{Metric, Scorer, Task};
use jitune::graph::{attach_attributes, attach_labels, load_edge_list, write_edge_list, write_labels, Graph};
use jitune::rng::{derive_seed, stream};
use jitune::tune::{
    tune_gp, tune_jitune, tune_random, BudgetSpec, HyperparameterSpace, JituneOptions, TaskData, TaskSettings,
    TuneOutcome, DEFAULT_GP_INIT,
};
use log::info;
use serde_json::json;

use crate::artifacts::{create, write_json, write_tune_artifacts};
use crate::{CoarsenArgs, Command, CompareArgs, EmbedderArgs, EvalArgs, GraphArgs, TaskArgs, TuneArgs};

/// Raised when a tuning run completes without a single successful trial.
#[derive(Debug)]
pub struct AllTrialsFailed {
    pub trials: usize,
}

impl fmt::Display for AllTrialsFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "all {} trials failed", self.trials)
    }
}

impl std::error::Error for AllTrialsFailed {}

/// Invalid flag combinations detected after parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Tune(args) => cmd_tune(&args),
        Command::Coarsen(args) => cmd_coarsen(&args),
        Command::Eval(args) => cmd_eval(&args),
        Command::Compare(args) => cmd_compare(&args),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("cannot read {}", path.display()))?,
    ))
}

fn load_graph(args: &GraphArgs) -> Result<Graph> {
    let (mut graph, stats) = load_edge_list(open(&args.edges)?, args.directed)
        .with_context(|| format!("in {}", args.edges.display()))?;
    info!(
        "loaded {} nodes, {} edges ({} self-loops dropped, {} duplicates merged)",
        graph.node_count(),
        graph.edge_count(),
        stats.loops_dropped,
        stats.duplicates_merged
    );
    if let Some(path) = &args.labels {
        graph = attach_labels(graph, open(path)?).with_context(|| format!("in {}", path.display()))?;
    }
    if let Some(path) = &args.attrs {
        graph = attach_attributes(graph, open(path)?).with_context(|| format!("in {}", path.display()))?;
    }
    Ok(graph)
}

fn task_settings(args: &TaskArgs) -> Result<TaskSettings> {
    let task: Task = args.task.parse()?;
    let mut settings = TaskSettings::new(task);
    ensure!(
        args.holdout > 0.0 && args.holdout < 1.0,
        "--holdout must lie in (0, 1), got {}",
        args.holdout
    );
    ensure!(
        args.train_fraction > 0.0 && args.train_fraction < 1.0,
        "--train-fraction must lie in (0, 1), got {}",
        args.train_fraction
    );
    settings.holdout_fraction = args.holdout;
    settings.train_fraction = args.train_fraction;
    settings.scorer = args.scorer.parse::<Scorer>()?;
    settings.classification_metric = match args.metric.as_str() {
        "micro_f1" | "microf1" => Metric::MicroF1,
        "accuracy" => Metric::Accuracy,
        other => bail!("unknown metric `{other}` (expected micro_f1 or accuracy)"),
    };
    Ok(settings)
}

fn build_embedder(args: &EmbedderArgs) -> Result<Box<dyn Embedder>> {
    if let Some(cmd) = &args.plugin_cmd {
        ensure!(!cmd.trim().is_empty(), "--plugin-cmd is empty");
        let space = match &args.space {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
                HyperparameterSpace::parse(&text).with_context(|| format!("in {}", path.display()))?
            }
            None => gcn_space(),
        };
        let class = match args.complexity.as_str() {
            "vlogv" => ComplexityClass::VLogV,
            "e_plus_v" => ComplexityClass::EPlusV,
            "e" => ComplexityClass::E,
            other => bail!("unknown complexity class `{other}` (expected vlogv, e_plus_v or e)"),
        };
        let mut plugin = PluginEmbedder::new("plugin", cmd, space, class);
        if let Some(secs) = args.plugin_timeout {
            ensure!(secs > 0.0 && secs.is_finite(), "--plugin-timeout must be positive");
            plugin = plugin.with_timeout(Duration::from_secs_f64(secs));
        }
        return Ok(Box::new(plugin));
    }
    ensure!(args.dim >= 1, "--dim must be at least 1");
    native_embedder(&args.embedder, args.dim)
        .with_context(|| format!("unknown embedder `{}` (expected deepwalk or spectral)", args.embedder))
}

fn check_tau(tau: f64) -> Result<()> {
    ensure!(tau > 0.0 && tau < 1.0, "--tau must lie in (0, 1), got {tau}");
    Ok(())
}

fn check_workers(workers: usize) -> Result<()> {
    ensure!(workers >= 1, "--workers must be at least 1");
    Ok(())
}

fn cmd_tune(args: &TuneArgs) -> Result<()> {
    check_tau(args.tau)?;
    check_workers(args.workers)?;
    let budget = match (args.budget.budget_seconds, args.budget.budget_rounds) {
        (Some(s), None) => {
            ensure!(s > 0.0 && s.is_finite(), "--budget-seconds must be positive");
            BudgetSpec::Duration(Duration::from_secs_f64(s))
        }
        (None, Some(r)) => BudgetSpec::Rounds(r),
        _ => return Err(UsageError("give exactly one of --budget-seconds and --budget-rounds".into()).into()),
    };
    let graph = load_graph(&args.graph)?;
    ensure!(
        !args.attributed || graph.attributes().is_some(),
        "--attributed requires --attrs"
    );
    let settings = task_settings(&args.task)?;
    let embedder = build_embedder(&args.embedder)?;
    let data = TaskData::prepare(&graph, &settings, derive_seed(args.seed, stream::SPLIT))?;
    let mut opts = JituneOptions::new(budget, args.seed);
    opts.tau = args.tau;
    opts.attributed = args.attributed;
    opts.workers = args.workers;
    opts.synopsis_only = args.synopsis_only;
    let outcome = tune_jitune(embedder.as_ref(), &data, &settings, &opts)?;
    let extra = json!({
        "embedder": embedder.descriptor().name,
        "task": settings.task,
        "seed": args.seed,
        "nodes": graph.node_count(),
        "edges": graph.edge_count(),
    });
    write_tune_artifacts(&args.out, &outcome, extra)?;
    finish_tune(&outcome)
}

fn finish_tune(outcome: &TuneOutcome) -> Result<()> {
    match &outcome.best {
        Some(best) => {
            println!(
                "{}",
                json!({ "best_config": best, "best_performance": outcome.best_performance })
            );
            Ok(())
        }
        None => Err(AllTrialsFailed {
            trials: outcome.log.len(),
        }
        .into()),
    }
}

fn cmd_coarsen(args: &CoarsenArgs) -> Result<()> {
    check_tau(args.tau)?;
    let graph = load_graph(&args.graph)?;
    ensure!(
        !args.attributed || graph.attributes().is_some(),
        "--attributed requires --attrs"
    );
    let config = ChainConfig {
        tau: args.tau,
        attributed: args.attributed,
        cosine_threshold: args.cosine_threshold,
        seed: args.seed,
    };
    let chain = build_chain_with(&graph, &config).context("coarsening failed")?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    let mut table = csv::Writer::from_writer(create(&args.out.join("summary.csv"))?);
    table.write_record(["level", "nodes", "edges", "alpha", "delta_w", "kl"])?;
    for m in &chain.members {
        let stem = format!("level_{}", m.level);
        let mut edges = create(&args.out.join(format!("{stem}.edgelist")))?;
        write_edge_list(&m.graph, &mut edges)?;
        edges.flush()?;
        let mut proj = create(&args.out.join(format!("{stem}.projection")))?;
        write_projection(&m.projection, &mut proj)?;
        proj.flush()?;
        if m.graph.labels().is_some() {
            let mut labels = create(&args.out.join(format!("{stem}.labels")))?;
            write_labels(&m.graph, &mut labels)?;
            labels.flush()?;
        }
        let kl = kl_divergence(&graph, &extend_synopsis(m, &graph), DEFAULT_KL_SMOOTHING)?;
        table.write_record([
            m.level.to_string(),
            m.graph.node_count().to_string(),
            m.graph.edge_count().to_string(),
            m.alpha.to_string(),
            m.delta_w.to_string(),
            kl.to_string(),
        ])?;
    }
    table.flush()?;
    let selected = chain.selected();
    let report = json!({
        "levels": chain.members.len(),
        "selected_level": selected.level,
        "selected_nodes": selected.graph.node_count(),
        "alpha": selected.alpha,
        "tau": chain.tau,
    });
    write_json(&args.out.join("chain.json"), &report)?;
    println!("{report}");
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let settings = task_settings(&args.task)?;
    let emb = EmbeddingMatrix::read_text(open(&args.embedding)?, graph.node_count())
        .with_context(|| format!("in {}", args.embedding.display()))?;
    let data = TaskData::prepare(&graph, &settings, args.seed)?;
    let result = data.evaluate(&settings, &emb)?;
    println!("{}", serde_json::to_string(&result)?);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Method {
    Jitune,
    Random,
    Gp,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Jitune => "jitune",
            Method::Random => "random",
            Method::Gp => "gp",
        }
    }
}

fn parse_methods(list: &str) -> Result<Vec<Method>> {
    let mut methods = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m = match name {
            "jitune" => Method::Jitune,
            "random" => Method::Random,
            "gp" => Method::Gp,
            other => return Err(UsageError(format!("unknown method `{other}` (expected jitune, random or gp)")).into()),
        };
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.len() < 2 {
        return Err(UsageError("--methods needs at least two distinct methods".into()).into());
    }
    Ok(methods)
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let methods = parse_methods(&args.methods)?;
    check_tau(args.tau)?;
    check_workers(args.workers)?;
    ensure!(args.seeds >= 1, "--seeds must be at least 1");
    let graph = load_graph(&args.graph)?;
    let settings = task_settings(&args.task)?;
    let embedder = build_embedder(&args.embedder)?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    let mut table = csv::Writer::from_writer(create(&args.out.join("compare.csv"))?);
    table.write_record(["method", "seed", "performance", "metric", "wall_secs", "rounds_used"])?;
    for seed in args.seed..args.seed + args.seeds {
        let data = TaskData::prepare(&graph, &settings, derive_seed(seed, stream::SPLIT))?;
        for &method in &methods {
            let outcome = match method {
                Method::Jitune => {
                    let mut opts = JituneOptions::new(BudgetSpec::Rounds(args.budget_rounds), seed);
                    opts.tau = args.tau;
                    opts.workers = args.workers;
                    tune_jitune(embedder.as_ref(), &data, &settings, &opts)?
                }
                Method::Random => tune_random(embedder.as_ref(), &data, &settings, args.budget_rounds, seed, args.workers),
                Method::Gp => tune_gp(embedder.as_ref(), &data, &settings, args.budget_rounds, DEFAULT_GP_INIT, seed)?,
            };
            write_tune_artifacts(
                &args.out.join(format!("{}_seed{seed}", method.name())),
                &outcome,
                json!({ "seed": seed }),
            )?;
            table.write_record([
                method.name().to_string(),
                seed.to_string(),
                outcome.best_performance.map(|p| p.to_string()).unwrap_or_default(),
                settings.metric().to_string(),
                format!("{:.6}", outcome.summary.wall_secs),
                outcome.summary.clock_secs.to_string(),
            ])?;
        }
    }
    table.flush()?;
    Ok(())
}
