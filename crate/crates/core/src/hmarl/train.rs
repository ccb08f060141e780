use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::aggregate::aggregate_shared_policy;
use super::checkpoint::Checkpoint;
use super::dist::sample_action;
use super::net::PolicyParams;
use super::ppo::{ppo_update, Adam, LossStats, PpoConfig, Trajectory};
use super::{high_features, low_features};
use crate::env::{derive_seed, EnvConfig, HandoverEnv, HIGH_OBS_DIM, LOW_OBS_DIM};
use crate::error::{Error, Result};
use crate::split_model::{N_FS_OPTIONS, N_MC_CAPABLE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub iterations: usize,
    /// Full episodes collected before each PPO update.
    pub episodes_per_iter: usize,
    /// Width of both hidden layers.
    pub hidden: usize,
    /// Seeds weight init, action sampling, minibatch shuffles and the
    /// environment seeds of training episodes.
    pub seed: u64,
    pub high: PpoConfig,
    pub low: PpoConfig,
    /// Write `checkpoint_<iter>.bin` every this many iterations; 0 writes
    /// only the final one.
    pub checkpoint_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            iterations: 200,
            episodes_per_iter: 1,
            hidden: 64,
            seed: 0,
            high: PpoConfig::high_level(),
            low: PpoConfig::low_level(),
            checkpoint_every: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::config("train.iterations", "must be at least 1"));
        }
        if self.episodes_per_iter == 0 {
            return Err(Error::config("train.episodes_per_iter", "must be at least 1"));
        }
        if self.hidden == 0 {
            return Err(Error::config("train.hidden", "must be at least 1"));
        }
        self.high.validate("train.high")?;
        self.low.validate("train.low")
    }
}

/// One row of the learning curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub iteration: usize,
    /// Undiscounted per-episode sum of r_CC, averaged over the batch.
    pub episode_r_cc: f64,
    /// Per-episode sum of r_e, averaged over ECs and episodes.
    pub episode_r_low: f64,
    pub mean_objective: f64,
    pub gops_violation_ratio: f64,
    pub high_policy_loss: f64,
    pub high_entropy: f64,
    pub low_policy_loss: f64,
    pub low_entropy: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub high: PolicyParams,
    /// The shared low-level policy after the last aggregation.
    pub low: PolicyParams,
    pub curve: Vec<CurvePoint>,
    pub checkpoints: Vec<PathBuf>,
}

struct Rollout {
    high: Trajectory,
    low: Vec<Trajectory>,
    r_cc: f64,
    r_low: f64,
    objective: f64,
    gops_violations: usize,
    steps: usize,
}

/// Plays one episode with stochastic actions. Every timestep yields exactly
/// one high action and one low action per EC; r_CC goes to the high
/// trajectory and each r_e to its EC's trajectory.
fn rollout<R: Rng + ?Sized>(
    env_cfg: EnvConfig,
    high: &PolicyParams,
    low: &PolicyParams,
    rng: &mut R,
) -> Result<Rollout> {
    let (mut env, mut obs) = HandoverEnv::reset(env_cfg)?;
    let n_ecs = env.n_ecs();
    let mut out = Rollout {
        high: Trajectory::default(),
        low: vec![Trajectory::default(); n_ecs],
        r_cc: 0.0,
        r_low: 0.0,
        objective: 0.0,
        gops_violations: 0,
        steps: 0,
    };
    loop {
        let hf = high_features(&env, &obs);
        let hc = high.forward(&hf)?;
        let (ha, h_logp) = sample_action(&hc.probs, rng);
        let low_obs = env.step_high(ha as u8 + 1)?;
        let mut pending = Vec::with_capacity(n_ecs);
        let mut actions = Vec::with_capacity(n_ecs);
        for lo in &low_obs {
            let lf = low_features(&env, lo);
            let lc = low.forward(&lf)?;
            let (la, l_logp) = sample_action(&lc.probs, rng);
            actions.push(la as u8 + 1);
            pending.push((lf, la, l_logp, lc.value));
        }
        let step = env.step_low(&actions)?;
        out.high.push(hf, ha, h_logp, hc.value, step.high_reward, step.done);
        for (e, (lf, la, l_logp, v)) in pending.into_iter().enumerate() {
            out.low[e].push(lf, la, l_logp, v, step.low_rewards[e], step.done);
        }
        out.r_cc += step.high_reward;
        out.r_low += step.low_rewards.iter().sum::<f64>() / n_ecs as f64;
        out.objective += step.objective;
        out.gops_violations += usize::from(step.violations.any_gops());
        out.steps += 1;
        if step.done {
            return Ok(out);
        }
        obs = env.high_obs();
    }
}

fn checkpoint_path(dir: &Path, iteration: usize) -> PathBuf {
    dir.join(format!("checkpoint_{iteration}.bin"))
}

/// Trains the central-cloud policy and the shared EC policy with PPO.
///
/// Every iteration collects `episodes_per_iter` episodes, updates the high
/// policy on r_CC, and lets each EC update its own copy of the low policy
/// on its own r_e before the copies are averaged back into one shared set.
/// When `checkpoint_dir` is set, checkpoints are written there; if an
/// update diverges the last finite parameters are saved before the error is
/// returned.
pub fn train(env_cfg: &EnvConfig, cfg: &TrainConfig, checkpoint_dir: Option<&Path>) -> Result<TrainOutcome> {
    env_cfg.validate()?;
    cfg.validate()?;
    let n_ecs = env_cfg.n_ecs();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 0x7EA1));
    let mut high = PolicyParams::init(HIGH_OBS_DIM, cfg.hidden, N_MC_CAPABLE, &mut rng)?;
    let mut low = PolicyParams::init(LOW_OBS_DIM, cfg.hidden, N_FS_OPTIONS, &mut rng)?;
    let mut high_adam = Adam::new(high.len());
    let mut low_adams = vec![Adam::new(low.len()); n_ecs];
    let mut curve = Vec::with_capacity(cfg.iterations);
    let mut checkpoints = Vec::new();

    let save = |iteration: usize, high: &PolicyParams, low: &PolicyParams, list: &mut Vec<PathBuf>| -> Result<()> {
        if let Some(dir) = checkpoint_dir {
            let path = checkpoint_path(dir, iteration);
            Checkpoint {
                iteration: iteration as u64,
                high: high.clone(),
                low: low.clone(),
            }
            .save(&path)?;
            list.push(path);
        }
        Ok(())
    };

    for iter in 0..cfg.iterations {
        let mut high_trajs = Vec::with_capacity(cfg.episodes_per_iter);
        let mut low_trajs: Vec<Vec<Trajectory>> = vec![Vec::new(); n_ecs];
        let (mut r_cc, mut r_low, mut objective, mut viol, mut steps) = (0.0, 0.0, 0.0, 0usize, 0usize);
        for ep in 0..cfg.episodes_per_iter {
            let episode_seed = derive_seed(cfg.seed, (iter * cfg.episodes_per_iter + ep) as u64 + 1);
            let env = EnvConfig {
                seed: episode_seed,
                ..env_cfg.clone()
            };
            let mut ro = rollout(env, &high, &low, &mut rng)?;
            ro.high.finish(0.0, cfg.high.gamma, cfg.high.gae_lambda);
            high_trajs.push(ro.high);
            for (e, mut t) in ro.low.into_iter().enumerate() {
                t.finish(0.0, cfg.low.gamma, cfg.low.gae_lambda);
                low_trajs[e].push(t);
            }
            r_cc += ro.r_cc;
            r_low += ro.r_low;
            objective += ro.objective;
            viol += ro.gops_violations;
            steps += ro.steps;
        }

        let updated = (|| -> Result<(PolicyParams, LossStats, PolicyParams, LossStats)> {
            let mut new_high = high.clone();
            let hs = ppo_update(&mut new_high, &mut high_adam, &high_trajs, &cfg.high, &mut rng)?;
            let mut copies = Vec::with_capacity(n_ecs);
            let mut ls = LossStats::default();
            for (e, trajs) in low_trajs.iter().enumerate() {
                let mut copy = low.clone();
                let s = ppo_update(&mut copy, &mut low_adams[e], trajs, &cfg.low, &mut rng)?;
                ls.policy_loss += s.policy_loss / n_ecs as f64;
                ls.entropy += s.entropy / n_ecs as f64;
                ls.value_loss += s.value_loss / n_ecs as f64;
                copies.push(copy);
            }
            Ok((new_high, hs, aggregate_shared_policy(&copies)?, ls))
        })();
        let (new_high, hs, new_low, ls) = match updated {
            Ok(x) => x,
            Err(e) => {
                save(iter, &high, &low, &mut checkpoints)?;
                log::error!("training diverged at iteration {iter}: {e}");
                return Err(e);
            }
        };
        high = new_high;
        low = new_low;

        let k = cfg.episodes_per_iter as f64;
        let point = CurvePoint {
            iteration: iter,
            episode_r_cc: r_cc / k,
            episode_r_low: r_low / k,
            mean_objective: objective / steps.max(1) as f64,
            gops_violation_ratio: viol as f64 / steps.max(1) as f64,
            high_policy_loss: hs.policy_loss,
            high_entropy: hs.entropy,
            low_policy_loss: ls.policy_loss,
            low_entropy: ls.entropy,
        };
        log::info!(
            "iter {iter}: r_cc/ep {:.2}, objective {:.3}, gops violations {:.3}, entropy high {:.3} low {:.3}",
            point.episode_r_cc,
            point.mean_objective,
            point.gops_violation_ratio,
            point.high_entropy,
            point.low_entropy
        );
        curve.push(point);
        let last = iter + 1 == cfg.iterations;
        if last || (cfg.checkpoint_every > 0 && (iter + 1) % cfg.checkpoint_every == 0) {
            save(iter + 1, &high, &low, &mut checkpoints)?;
        }
    }
    Ok(TrainOutcome {
        high,
        low,
        curve,
        checkpoints,
    })
}
