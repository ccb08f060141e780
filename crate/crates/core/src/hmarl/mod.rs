//! Hierarchical PPO: one central-cloud policy choosing F_t and one EC
//! policy, shared by every EC, choosing F_nt.
//!
//! Networks are plain flat parameter vectors with hand-written
//! backpropagation ([`net`]); [`ppo`] holds the clipped-surrogate loss,
//! GAE and Adam; [`train`] runs the turn-based rollout/update loop.

mod aggregate;
pub mod checkpoint;
pub mod dist;
pub mod net;
pub mod ppo;
mod train;

pub use aggregate::aggregate_shared_policy;
pub use checkpoint::Checkpoint;
pub use dist::{act_greedy, argmax, sample_action};
pub use net::{forward_policy, PolicyParams};
pub use ppo::{ppo_update, Adam, LossStats, PpoConfig, Trajectory};
pub use train::{train, CurvePoint, TrainConfig, TrainOutcome};

use crate::env::{HandoverEnv, HighObs, LowObs, HIGH_OBS_DIM, LOW_OBS_DIM};
use crate::error::{Error, Result};
use crate::optimizer::Controller;
use crate::split_model::{N_FS_OPTIONS, N_MC_CAPABLE};

/// Scaled feature vector the central-cloud policy sees.
pub fn high_features(env: &HandoverEnv, obs: &HighObs) -> Vec<f64> {
    obs.to_features(&env.config().obs_scales).to_vec()
}

/// Scaled feature vector an EC policy sees.
pub fn low_features(env: &HandoverEnv, obs: &LowObs) -> Vec<f64> {
    let cfg = env.config();
    obs.to_features(&cfg.obs_scales, cfg.g_th, cfg.m_th(), env.n_ecs()).to_vec()
}

/// Trained policies acting greedily, for evaluation.
#[derive(Debug, Clone)]
pub struct HmarlController {
    pub high: PolicyParams,
    pub low: PolicyParams,
}

impl HmarlController {
    pub fn new(high: PolicyParams, low: PolicyParams) -> Result<Self> {
        if (high.obs_dim(), high.n_actions()) != (HIGH_OBS_DIM, N_MC_CAPABLE) {
            return Err(Error::Contract(format!(
                "high policy must map {HIGH_OBS_DIM} features to {N_MC_CAPABLE} actions, got {} -> {}",
                high.obs_dim(),
                high.n_actions()
            )));
        }
        if (low.obs_dim(), low.n_actions()) != (LOW_OBS_DIM, N_FS_OPTIONS) {
            return Err(Error::Contract(format!(
                "low policy must map {LOW_OBS_DIM} features to {N_FS_OPTIONS} actions, got {} -> {}",
                low.obs_dim(),
                low.n_actions()
            )));
        }
        Ok(Self { high, low })
    }

    pub fn from_checkpoint(c: Checkpoint) -> Result<Self> {
        Self::new(c.high, c.low)
    }
}

impl Controller for HmarlController {
    fn high(&mut self, env: &HandoverEnv, obs: &HighObs) -> Result<u8> {
        Ok(act_greedy(&self.high, &high_features(env, obs))? as u8 + 1)
    }

    fn low(&mut self, env: &HandoverEnv, obs: &[LowObs]) -> Result<Vec<u8>> {
        obs.iter()
            .map(|o| Ok(act_greedy(&self.low, &low_features(env, o))? as u8 + 1))
            .collect()
    }
}
