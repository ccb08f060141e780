use serde::{Deserialize, Serialize};

use crate::env::{EnvConfig, HandoverEnv, StepOutcome};
use crate::error::Result;
use crate::optimizer::Controller;

/// Per-episode summary row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    pub policy: String,
    pub g_th: f64,
    pub seed: u64,
    pub episode: usize,
    pub steps: usize,
    pub gops_violation_steps: usize,
    pub midhaul_violation_steps: usize,
    /// Share of timesteps with any EC over G_th (before drops).
    pub gops_violation_ratio: f64,
    pub midhaul_violation_ratio: f64,
    /// Dropped user-timesteps over all user-timesteps.
    pub dropped_ratio: f64,
    /// Episode means of R(T), R(U∖T) and R(U).
    pub r_transitional: f64,
    pub r_non_transitional: f64,
    pub r_all: f64,
    pub mean_objective: f64,
    pub mean_r_cc: f64,
}

impl EpisodeMetrics {
    pub fn from_outcomes(policy: &str, cfg: &EnvConfig, episode: usize, outcomes: &[StepOutcome]) -> Self {
        let steps = outcomes.len();
        let n = steps.max(1) as f64;
        let mean = |f: &dyn Fn(&StepOutcome) -> f64| outcomes.iter().map(f).sum::<f64>() / n;
        let gops_violation_steps = outcomes.iter().filter(|o| o.violations.any_gops()).count();
        let midhaul_violation_steps = outcomes.iter().filter(|o| o.violations.midhaul_violation).count();
        let dropped: usize = outcomes.iter().map(StepOutcome::n_dropped).sum();
        let user_steps = (cfg.n_users * steps).max(1) as f64;
        Self {
            policy: policy.to_string(),
            g_th: cfg.g_th,
            seed: cfg.seed,
            episode,
            steps,
            gops_violation_steps,
            midhaul_violation_steps,
            gops_violation_ratio: gops_violation_steps as f64 / n,
            midhaul_violation_ratio: midhaul_violation_steps as f64 / n,
            dropped_ratio: dropped as f64 / user_steps,
            r_transitional: mean(&|o| o.r_transitional),
            r_non_transitional: mean(&|o| o.r_non_transitional),
            r_all: mean(&|o| o.r_all),
            mean_objective: mean(&|o| o.objective),
            mean_r_cc: mean(&|o| o.high_reward),
        }
    }
}

/// Runs one full episode with `controller` on a fresh environment.
pub fn run_episode<C: Controller + ?Sized>(cfg: &EnvConfig, controller: &mut C) -> Result<Vec<StepOutcome>> {
    let (mut env, mut obs) = HandoverEnv::reset(cfg.clone())?;
    let mut outcomes = Vec::with_capacity(cfg.episode_len);
    loop {
        let a_cc = controller.high(&env, &obs)?;
        let low_obs = env.step_high(a_cc)?;
        let actions = controller.low(&env, &low_obs)?;
        let out = env.step_low(&actions)?;
        let done = out.done;
        outcomes.push(out);
        if done {
            break;
        }
        obs = env.high_obs();
    }
    Ok(outcomes)
}
