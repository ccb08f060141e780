use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, SweepAxis};
use super::episode::{run_episode, EpisodeMetrics};
use super::output::{export_cdf, write_csv, Manifest};
use crate::env::{derive_seed, EnvConfig, StepOutcome};
use crate::error::{Error, Result};
use crate::hmarl::{train, Checkpoint, HmarlController, TrainOutcome};
use crate::optimizer::{BaselineController, BruteForce, Controller, OptimalController, PolicyKind};

/// A policy ready to be instantiated once per episode.
#[derive(Debug, Clone)]
pub enum ResolvedPolicy {
    Baseline(PolicyKind),
    Optimal(BruteForce),
    Hmarl(HmarlController),
}

impl ResolvedPolicy {
    pub fn label(&self) -> String {
        match self {
            ResolvedPolicy::Baseline(k) => k.to_string(),
            ResolvedPolicy::Optimal(_) => PolicyKind::BruteForceOptimal.to_string(),
            ResolvedPolicy::Hmarl(_) => PolicyKind::Learned.to_string(),
        }
    }

    /// `seed` drives the random baseline's choices.
    pub fn controller(&self, seed: u64) -> Result<Box<dyn Controller + Send>> {
        Ok(match self {
            ResolvedPolicy::Baseline(k) => Box::new(BaselineController::new(*k, seed)?),
            ResolvedPolicy::Optimal(s) => Box::new(OptimalController::new(*s)),
            ResolvedPolicy::Hmarl(h) => Box::new(h.clone()),
        })
    }
}

/// Environment of evaluation episode `episode` under experiment seed `seed`.
pub fn episode_env(base: &EnvConfig, seed: u64, episode: usize) -> EnvConfig {
    EnvConfig {
        seed: derive_seed(seed, episode as u64),
        ..base.clone()
    }
}

/// Turns the configured policy kind into something runnable. A learned
/// policy comes from `cfg.checkpoint` or, failing that, is trained now with
/// its checkpoints and curve written to `train_dir`.
pub fn resolve_policy(cfg: &ExperimentConfig, train_dir: &Path) -> Result<(ResolvedPolicy, Vec<PathBuf>)> {
    match cfg.policy {
        PolicyKind::Static(_) | PolicyKind::Random => Ok((ResolvedPolicy::Baseline(cfg.policy), Vec::new())),
        PolicyKind::BruteForceOptimal => Ok((ResolvedPolicy::Optimal(cfg.optimal), Vec::new())),
        PolicyKind::Learned => match &cfg.checkpoint {
            Some(path) => {
                let c = Checkpoint::load(path)?;
                log::info!("loaded policies from {} (iteration {})", path.display(), c.iteration);
                Ok((ResolvedPolicy::Hmarl(HmarlController::from_checkpoint(c)?), Vec::new()))
            }
            None => {
                log::info!("no checkpoint configured; training for {} iterations", cfg.train.iterations);
                let (out, files) = train_into(cfg, train_dir)?;
                Ok((ResolvedPolicy::Hmarl(HmarlController::new(out.high, out.low)?), files))
            }
        },
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimestepRow {
    pub seed: u64,
    pub episode: usize,
    pub t: usize,
    pub f_t: u8,
    /// F_nt per EC, `;`-separated.
    pub f_nt: String,
    pub n_transitional: usize,
    pub n_connected: usize,
    pub n_disconnected: usize,
    pub n_dropped: usize,
    pub gops_violation: bool,
    pub midhaul_violation: bool,
    /// Highest pre-drop EC GOPS over G_th.
    pub max_gops_utilization: f64,
    pub midhaul_total: f64,
    pub r_transitional: f64,
    pub r_non_transitional: f64,
    pub objective: f64,
    pub r_cc: f64,
}

impl TimestepRow {
    fn new(seed: u64, episode: usize, g_th: f64, o: &StepOutcome) -> Self {
        let max_gops = o.ledger_pre_drop.ecs.iter().map(|e| e.gops_total).fold(0.0, f64::max);
        Self {
            seed,
            episode,
            t: o.timestep,
            f_t: o.assignment.fs_transitional.index(),
            f_nt: o
                .assignment
                .fs_non_transitional
                .iter()
                .map(|f| f.index().to_string())
                .collect::<Vec<_>>()
                .join(";"),
            n_transitional: o.n_transitional,
            n_connected: o.n_connected,
            n_disconnected: o.n_disconnected,
            n_dropped: o.n_dropped(),
            gops_violation: o.violations.any_gops(),
            midhaul_violation: o.violations.midhaul_violation,
            max_gops_utilization: max_gops / g_th,
            midhaul_total: o.ledger_pre_drop.midhaul_total,
            r_transitional: o.r_transitional,
            r_non_transitional: o.r_non_transitional,
            objective: o.objective,
            r_cc: o.high_reward,
        }
    }
}

/// Every (seed, episode) pair of `cfg`, run in parallel and returned in
/// seed-major order.
pub fn evaluate_policy(
    env: &EnvConfig,
    seeds: &[u64],
    episodes: usize,
    policy: &ResolvedPolicy,
) -> Result<Vec<(EpisodeMetrics, Vec<StepOutcome>)>> {
    let jobs: Vec<(u64, usize)> = seeds.iter().flat_map(|&s| (0..episodes).map(move |e| (s, e))).collect();
    let label = policy.label();
    jobs.par_iter()
        .map(|&(seed, episode)| {
            let env = episode_env(env, seed, episode);
            let mut c = policy.controller(derive_seed(env.seed, 0xBA5E))?;
            let outcomes = run_episode(&env, c.as_mut())?;
            let mut m = EpisodeMetrics::from_outcomes(&label, &env, episode, &outcomes);
            m.seed = seed;
            log::debug!("{label} seed {seed} episode {episode}: objective {:.4}", m.mean_objective);
            Ok((m, outcomes))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub out_dir: PathBuf,
    pub metrics: Vec<EpisodeMetrics>,
    pub files: Vec<PathBuf>,
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `summary.csv`, `timeseries.csv`, the CDF files and
/// `manifest.json` for one evaluated policy.
fn write_run(
    cfg: &ExperimentConfig,
    command: &str,
    runs: &[(EpisodeMetrics, Vec<StepOutcome>)],
    mut files: Vec<PathBuf>,
) -> Result<ExperimentReport> {
    let dir = &cfg.output_dir;
    let metrics: Vec<EpisodeMetrics> = runs.iter().map(|(m, _)| m.clone()).collect();
    let summary = dir.join("summary.csv");
    write_csv(&summary, &metrics)?;
    files.push(summary);

    let mut rows = Vec::new();
    let mut dropped_pct = Vec::new();
    let mut objective = Vec::new();
    for (m, outcomes) in runs {
        for o in outcomes {
            rows.push(TimestepRow::new(m.seed, m.episode, cfg.env.g_th, o));
            dropped_pct.push(100.0 * o.n_dropped() as f64 / cfg.env.n_users.max(1) as f64);
            objective.push(o.objective);
        }
    }
    let ts = dir.join("timeseries.csv");
    write_csv(&ts, &rows)?;
    files.push(ts);
    files.push(export_cdf(dir, "dropped_pct", &dropped_pct)?);
    files.push(export_cdf(dir, "objective", &objective)?);

    let manifest = Manifest::build(dir, command, &cfg.hash(), &files)?;
    files.push(manifest.write(dir)?);
    Ok(ExperimentReport {
        out_dir: dir.clone(),
        metrics,
        files,
    })
}

/// Evaluates `cfg.policy` over `cfg.seeds` x `cfg.episodes` and writes the
/// output files into `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    create_dir(&cfg.output_dir)?;
    let (policy, files) = resolve_policy(cfg, &cfg.output_dir)?;
    log::info!(
        "simulating {} for {} seed(s) x {} episode(s)",
        policy.label(),
        cfg.seeds.len(),
        cfg.episodes
    );
    let runs = evaluate_policy(&cfg.env, &cfg.seeds, cfg.episodes, &policy)?;
    write_run(cfg, "simulate", &runs, files)
}

/// One row of `sweep.csv`: means over every evaluated episode at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub g_th: f64,
    pub policy: String,
    pub episodes: usize,
    pub mean_objective: f64,
    pub r_transitional: f64,
    pub r_non_transitional: f64,
    pub r_all: f64,
    pub gops_violation_ratio: f64,
    pub midhaul_violation_ratio: f64,
    pub dropped_ratio: f64,
    pub mean_r_cc: f64,
}

impl SweepRow {
    pub fn from_metrics(g_th: f64, policy: &str, m: &[EpisodeMetrics]) -> Self {
        let n = m.len().max(1) as f64;
        let mean = |f: fn(&EpisodeMetrics) -> f64| m.iter().map(f).sum::<f64>() / n;
        Self {
            g_th,
            policy: policy.to_string(),
            episodes: m.len(),
            mean_objective: mean(|x| x.mean_objective),
            r_transitional: mean(|x| x.r_transitional),
            r_non_transitional: mean(|x| x.r_non_transitional),
            r_all: mean(|x| x.r_all),
            gops_violation_ratio: mean(|x| x.gops_violation_ratio),
            midhaul_violation_ratio: mean(|x| x.midhaul_violation_ratio),
            dropped_ratio: mean(|x| x.dropped_ratio),
            mean_r_cc: mean(|x| x.mean_r_cc),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub points: Vec<ExperimentReport>,
    pub files: Vec<PathBuf>,
}

/// Runs the same, fixed policy at every value of `cfg.sweep`. Each point
/// gets its own directory `g_th_<value>` with a full set of run files; the
/// per-point means go to `sweep.csv`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::config("sweep", "is required for a sweep run"))?;
    create_dir(&cfg.output_dir)?;
    let (policy, mut files) = resolve_policy(cfg, &cfg.output_dir)?;
    let label = policy.label();
    let mut rows = Vec::with_capacity(spec.values.len());
    let mut points = Vec::with_capacity(spec.values.len());
    for &v in &spec.values {
        let mut point = cfg.clone();
        match spec.axis {
            SweepAxis::GTh => point.env.g_th = v,
        }
        point.output_dir = cfg.output_dir.join(format!("g_th_{v}"));
        point.sweep = None;
        create_dir(&point.output_dir)?;
        log::info!("sweep point g_th = {v}: {label}");
        let runs = evaluate_policy(&point.env, &point.seeds, point.episodes, &policy)?;
        let report = write_run(&point, "sweep", &runs, Vec::new())?;
        rows.push(SweepRow::from_metrics(v, &label, &report.metrics));
        files.extend(report.files.iter().cloned());
        points.push(report);
    }
    let sweep_csv = cfg.output_dir.join("sweep.csv");
    write_csv(&sweep_csv, &rows)?;
    files.push(sweep_csv);
    let manifest = Manifest::build(&cfg.output_dir, "sweep", &cfg.hash(), &files)?;
    files.push(manifest.write(&cfg.output_dir)?);
    Ok(SweepReport { rows, points, files })
}

fn train_into(cfg: &ExperimentConfig, dir: &Path) -> Result<(TrainOutcome, Vec<PathBuf>)> {
    create_dir(dir)?;
    let out = train(&cfg.env, &cfg.train, Some(dir))?;
    let curve = dir.join("training_curve.csv");
    write_csv(&curve, &out.curve)?;
    let mut files = out.checkpoints.clone();
    files.push(curve);
    Ok((out, files))
}

/// Trains both policy levels, writing `checkpoint_<iter>.bin`,
/// `training_curve.csv` and `manifest.json` into `cfg.output_dir`.
pub fn run_training(cfg: &ExperimentConfig) -> Result<(TrainOutcome, Vec<PathBuf>)> {
    cfg.validate()?;
    let (out, mut files) = train_into(cfg, &cfg.output_dir)?;
    let manifest = Manifest::build(&cfg.output_dir, "train", &cfg.hash(), &files)?;
    files.push(manifest.write(&cfg.output_dir)?);
    Ok((out, files))
}
