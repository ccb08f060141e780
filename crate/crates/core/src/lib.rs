//! Soft-handover simulation for O-RAN edge clouds with per-group functional
//! split (FS) selection.
//!
//! Mobile aerial users are served by clusters of access points (APs). When a
//! cluster spans the coordination areas of two edge clouds (ECs) the user is
//! *transitional* and its processing must be centralized far enough (FS 1-4)
//! for multi-connectivity to work across the CCA border. Each timestep a
//! central-cloud agent picks the FS for transitional users, then every EC
//! picks the FS for its own non-transitional users. The environment charges
//! compute (GOPS) and midhaul bandwidth for the choice, drops users when a
//! budget is exceeded, and scores users on delay-based service continuity.
//!
//! Modules:
//! - [`scenario`]: topology, mobility, SINR and clustering
//! - [`split_model`]: FS cost table and the GOPS / midhaul ledger
//! - [`qos`]: E2E delay, windowed reliability, continuity ratio, objective
//! - [`env`]: the two-turn environment
//! - [`optimizer`]: static, random and brute-force baselines
//! - [`hmarl`]: feed-forward policies, PPO with hand-written gradients, training
//! - [`harness`]: experiment config, runs, sweeps and CSV/JSON outputs

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod env;
pub mod error;
pub mod harness;
pub mod hmarl;
pub mod optimizer;
pub mod qos;
pub mod scenario;
pub mod split_model;

pub use env::{EnvConfig, HandoverEnv, HighObs, LowObs, StepOutcome};
pub use error::{Error, Result};
pub use split_model::{FsConfigTable, FsOption, GroupAssignment};
