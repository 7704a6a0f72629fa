//! Tournament harness for the planning agents: expands an agents ×
//! games × levels × repetitions matrix into budget-metered episodes,
//! persists per-episode records, and renders ranking and significance
//! tables from them. The `rhea-bench` binary is a thin CLI over this
//! library; everything here is deterministic given a base seed.

pub mod config;
pub mod episode;
pub mod matrix;
pub mod persist;
pub mod report;

pub use config::RunSpec;
pub use episode::{derive_episode_seed, run_episode, EpisodeRecord};
pub use matrix::{run_matrix, sort_canonical, MatrixOutput};
pub use persist::{canonical_csv, read_results, write_results, OutputFormat};
pub use report::{render_report, summarize, ReportBundle};
