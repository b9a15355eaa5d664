//! Time-budgeted hyperparameter tuning for network embedding algorithms.
//!
//! The tuner measures one run of the embedder on the input graph, coarsens the
//! graph into a chain of progressively smaller synopses, tunes on the smallest
//! synopsis that stays similar enough to the original, and then transfers the
//! result back through a trimmed search space and a refinement loop on the
//! original graph.
//!
//! Module map:
//!
//! - [`graph`]: graph storage, text formats, edge holdout splits, components.
//! - [`coarsen`]: star/edge matching, attributed grouping, synopsis chains,
//!   the mirror-node extension and its KL diagnostic.
//! - [`embed`]: the [`embed::Embedder`] trait, DeepWalk-style and AROPE-style
//!   native embedders, and the subprocess plugin client.
//! - [`eval`]: link-prediction AUC and node-classification Micro-F1.
//! - [`tune`]: search spaces, Latin hypercube sampling, budget arithmetic,
//!   trimming, the two-phase tuner and the random / GP baselines.
//! - [`synthetic`]: seeded random graph generators used by tests and demos.

pub mod coarsen;
pub mod embed;
pub mod eval;
pub mod graph;
pub mod rng;
pub mod synthetic;
pub mod tune;

pub use coarsen::{build_chain, Synopsis, SynopsisChain};
pub use embed::{EmbedError, Embedder, EmbeddingMatrix};
pub use eval::{EvalResult, Metric, Task};
pub use graph::{EdgeSplit, Graph};
pub use tune::{Configuration, HyperparameterSpace, TrialLog, TuningBudget};
