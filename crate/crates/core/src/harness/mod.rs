//! Seeded, replicated experiments and their exports.
//!
//! Replication `r` of an experiment draws every random number (tie-breaking
//! coins first, then the reward) from the stream `(master_seed, r)`, so
//! results do not depend on how replications are scheduled over workers.

pub mod config;
pub mod export;
pub mod run;
pub mod snapshot;

pub use config::ExperimentConfig;
pub use export::{write_bundle, write_play_trace_csv, write_regret_csv, write_summary_json};
pub use run::{run_experiment, run_single, CheckpointSummary, ReplicationResult, ResultBundle, SingleRun, Summary};
pub use snapshot::{export_tree_snapshot, SnapshotNode, TreeSnapshot};
