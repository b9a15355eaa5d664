//! External embedders run as child processes.
//!
//! For every call a scratch directory receives `graph.edgelist` (plus
//! `graph.labels` / `graph.attrs` when the graph carries them) and
//! `config.txt` with one `key=value` line per hyperparameter and a final
//! `seed=<n>` line. The child is invoked as
//!
//! ```text
//! <cmd> [args...] --graph <dir>/graph.edgelist --config <dir>/config.txt --output <dir>/embedding.txt
//! ```
//!
//! and must exit 0 after writing one `node v1 ... vd` line per node. Scratch
//! directories live under `JITUNE_WORKDIR` when set, else the system temp dir,
//! and are removed afterwards.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::Duration;

use wait_timeout::ChildExt;

use super::{ComplexityClass, EmbedError, Embedder, EmbedderDescriptor, EmbedderKind, EmbeddingMatrix};
use crate::graph::{write_attributes, write_edge_list, write_labels, Graph};
use crate::tune::{Configuration, Dim, HyperparameterSpace};

/// Longest stderr excerpt carried in an error.
const STDERR_LIMIT: usize = 4096;

pub struct PluginEmbedder {
    descriptor: EmbedderDescriptor,
    program: String,
    args: Vec<String>,
    timeout: Option<Duration>,
    workdir: Option<PathBuf>,
}

/// Search space for a GCN-style plugin.
pub fn gcn_space() -> HyperparameterSpace {
    HyperparameterSpace::new(vec![
        Dim::int("epochs", 10, 300),
        Dim::int("hidden", 2, 64),
        Dim::log_float("learning_rate", 1e-4, 0.1),
        Dim::float("dropout", 0.1, 0.9),
        Dim::log_float("weight_decay", 1e-5, 1e-3),
        Dim::categorical("model", &["gcn", "gcn_cheby", "dense"]),
    ])
    .expect("static space is valid")
}

impl PluginEmbedder {
    /// `command` is split on whitespace into program and leading arguments.
    pub fn new(name: &str, command: &str, space: HyperparameterSpace, class: ComplexityClass) -> Self {
        let mut parts = command.split_whitespace().map(str::to_string);
        let program = parts.next().unwrap_or_default();
        Self {
            descriptor: EmbedderDescriptor {
                name: name.to_string(),
                space,
                complexity_class: class,
                kind: EmbedderKind::Plugin,
            },
            program,
            args: parts.collect(),
            timeout: None,
            workdir: std::env::var_os("JITUNE_WORKDIR").map(PathBuf::from),
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = Some(timeout);
        self
    }

    pub fn with_workdir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.workdir = Some(dir.into());
        self
    }

    fn command_line(&self) -> String {
        std::iter::once(self.program.as_str())
            .chain(self.args.iter().map(String::as_str))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn write_inputs(&self, dir: &Path, graph: &Graph, config: &Configuration, seed: u64) -> std::io::Result<()> {
        // plugins always see dense numeric ids, matching the output format
        let plain = graph.clone().with_node_names(None);
        write_edge_list(&plain, BufWriter::new(File::create(dir.join("graph.edgelist"))?))?;
        if plain.labels().is_some() {
            write_labels(&plain, BufWriter::new(File::create(dir.join("graph.labels"))?))?;
        }
        if plain.attributes().is_some() {
            write_attributes(&plain, BufWriter::new(File::create(dir.join("graph.attrs"))?))?;
        }
        let mut cfg = File::create(dir.join("config.txt"))?;
        cfg.write_all(config.to_key_values().as_bytes())?;
        writeln!(cfg, "seed={seed}")?;
        Ok(())
    }
}

fn read_excerpt(path: &Path) -> String {
    let mut text = String::new();
    if let Ok(f) = File::open(path) {
        let _ = f.take(STDERR_LIMIT as u64).read_to_string(&mut text);
    }
    text.trim_end().to_string()
}

impl Embedder for PluginEmbedder {
    fn descriptor(&self) -> &EmbedderDescriptor {
        &self.descriptor
    }

    fn embed(&self, graph: &Graph, config: &Configuration, seed: u64) -> Result<EmbeddingMatrix, EmbedError> {
        let scratch = match &self.workdir {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                tempfile::Builder::new().prefix("jitune-").tempdir_in(dir)?
            }
            None => tempfile::Builder::new().prefix("jitune-").tempdir()?,
        };
        let dir = scratch.path();
        self.write_inputs(dir, graph, config, seed)?;
        let output = dir.join("embedding.txt");
        let stderr_path = dir.join("stderr.txt");

        let mut child = Command::new(&self.program)
            .args(&self.args)
            .arg("--graph")
            .arg(dir.join("graph.edgelist"))
            .arg("--config")
            .arg(dir.join("config.txt"))
            .arg("--output")
            .arg(&output)
            .current_dir(dir)
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(File::create(&stderr_path)?)
            .spawn()
            .map_err(|source| EmbedError::Spawn {
                command: self.command_line(),
                source,
            })?;

        let status = match self.timeout {
            Some(limit) => match child.wait_timeout(limit)? {
                Some(status) => status,
                None => {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(EmbedError::Timeout(limit));
                }
            },
            None => child.wait()?,
        };
        if !status.success() {
            return Err(EmbedError::NonZeroExit {
                status: status.to_string(),
                stderr: read_excerpt(&stderr_path),
            });
        }
        let file = File::open(&output).map_err(|_| EmbedError::MissingOutput)?;
        EmbeddingMatrix::read_text(BufReader::new(file), graph.node_count())
    }
}
