//! Experiment orchestration: configuration, episode runs, sweeps and
//! output files.
//!
//! Every CSV starts with a `# schema=v1` line. Each run directory carries a
//! `manifest.json` with the config hash, the crate version and a SHA-256
//! for every file written.

mod config;
mod episode;
mod experiment;
mod output;

pub use config::{load_config, parse_config, ExperimentConfig, SweepAxis, SweepSpec};
pub use episode::{run_episode, EpisodeMetrics};
pub use experiment::{
    episode_env, evaluate_policy, resolve_policy, run_experiment, run_sweep, run_training, ExperimentReport,
    ResolvedPolicy, SweepReport, SweepRow, TimestepRow,
};
pub use output::{
    empirical_cdf, export_cdf, read_cdf, read_csv, sha256_file, version_string, write_csv, CdfPoint, Manifest,
    ManifestEntry, SCHEMA_LINE,
};
