use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use oran_handover::harness::{
    load_config, run_experiment, run_sweep, run_training, ExperimentConfig, SweepAxis, SweepSpec,
};
use oran_handover::optimizer::PolicyKind;

#[derive(Parser)]
#[command(name = "handover-sim", version, about = "Functional-split selection during O-RAN soft handovers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a policy and write summary, timeseries and CDF files.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// hmarl | static:<f> | random | optimal
        #[arg(long)]
        policy: Option<PolicyKind>,
        #[arg(long)]
        episodes: Option<usize>,
        /// Comma-separated, e.g. 0,1,2
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trained policies for --policy hmarl.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Train the hierarchical policies.
    Train {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate one fixed policy across values of a parameter.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "g_th")]
        axis: String,
        /// Comma-separated, e.g. 14000,15000,16000
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        #[arg(long)]
        policy: Option<PolicyKind>,
        #[arg(long)]
        episodes: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
}

fn base_config(path: Option<&PathBuf>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => load_config(p).with_context(|| format!("loading {}", p.display())),
        None => Ok(ExperimentConfig::default()),
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SIM_LOG", "info")).init();
    match Cli::parse().command {
        Command::Simulate {
            config,
            policy,
            episodes,
            seeds,
            out,
            checkpoint,
        } => {
            let mut cfg = base_config(config.as_ref())?;
            cfg.policy = policy.unwrap_or(cfg.policy);
            cfg.episodes = episodes.unwrap_or(cfg.episodes);
            cfg.seeds = seeds.unwrap_or(cfg.seeds);
            cfg.output_dir = out.unwrap_or(cfg.output_dir);
            cfg.checkpoint = checkpoint.or(cfg.checkpoint);
            cfg.validate()?;
            let report = run_experiment(&cfg)?;
            let n = report.metrics.len() as f64;
            let mean = |f: fn(&oran_handover::harness::EpisodeMetrics) -> f64| report.metrics.iter().map(f).sum::<f64>() / n;
            println!(
                "{}: {} episodes, objective {:.4}, gops violations {:.3}, dropped {:.4}",
                cfg.policy,
                report.metrics.len(),
                mean(|m| m.mean_objective),
                mean(|m| m.gops_violation_ratio),
                mean(|m| m.dropped_ratio)
            );
            println!("wrote {} files to {}", report.files.len(), report.out_dir.display());
        }
        Command::Train { config, iters, out, seed } => {
            let mut cfg = base_config(config.as_ref())?;
            cfg.train.iterations = iters.unwrap_or(cfg.train.iterations);
            cfg.train.seed = seed.unwrap_or(cfg.train.seed);
            cfg.output_dir = out.unwrap_or(cfg.output_dir);
            cfg.validate()?;
            let (outcome, files) = run_training(&cfg)?;
            if let Some(last) = outcome.curve.last() {
                println!(
                    "iteration {}: episode r_cc {:.2}, objective {:.4}",
                    last.iteration, last.episode_r_cc, last.mean_objective
                );
            }
            println!("wrote {} files to {}", files.len(), cfg.output_dir.display());
        }
        Command::Sweep {
            config,
            axis,
            values,
            policy,
            episodes,
            seeds,
            out,
            checkpoint,
        } => {
            let mut cfg = base_config(config.as_ref())?;
            let axis: SweepAxis = axis.parse()?;
            let values = match (values, cfg.sweep.take()) {
                (Some(v), _) => v,
                (None, Some(s)) if s.axis == axis => s.values,
                _ => bail!("no sweep values: pass --values or set `sweep` in the config"),
            };
            cfg.sweep = Some(SweepSpec { axis, values });
            cfg.policy = policy.unwrap_or(cfg.policy);
            cfg.episodes = episodes.unwrap_or(cfg.episodes);
            cfg.seeds = seeds.unwrap_or(cfg.seeds);
            cfg.output_dir = out.unwrap_or(cfg.output_dir);
            cfg.checkpoint = checkpoint.or(cfg.checkpoint);
            cfg.validate()?;
            let report = run_sweep(&cfg)?;
            for r in &report.rows {
                println!(
                    "g_th {:>8}: objective {:.4}, R(T) {:.3}, R(U\\T) {:.3}, gops violations {:.3}",
                    r.g_th, r.mean_objective, r.r_transitional, r.r_non_transitional, r.gops_violation_ratio
                );
            }
        }
    }
    Ok(())
}
