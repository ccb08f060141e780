use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dist::entropy;
use super::net::PolicyParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PpoConfig {
    /// Surrogate clip range ε.
    pub clip: f64,
    pub entropy_coef: f64,
    /// Weight of the squared value error.
    pub value_coef: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub minibatch_size: usize,
    /// Discount γ for this level.
    pub gamma: f64,
    pub gae_lambda: f64,
    /// Global gradient-norm cap; 0 disables clipping.
    pub max_grad_norm: f64,
}

impl Default for PpoConfig {
    fn default() -> Self {
        Self {
            clip: 0.2,
            entropy_coef: 0.01,
            value_coef: 0.5,
            learning_rate: 3e-4,
            epochs: 4,
            minibatch_size: 64,
            gamma: 0.99,
            gae_lambda: 0.95,
            max_grad_norm: 0.5,
        }
    }
}

impl PpoConfig {
    pub fn high_level() -> Self {
        Self::default()
    }

    pub fn low_level() -> Self {
        Self {
            gamma: 0.80,
            ..Self::default()
        }
    }

    /// `prefix` names the config section in error messages.
    pub fn validate(&self, prefix: &str) -> Result<()> {
        let f = |name: &str| format!("{prefix}.{name}");
        if !(self.clip > 0.0 && self.clip < 1.0) {
            return Err(Error::config(f("clip"), "must lie in (0, 1)"));
        }
        if !(self.entropy_coef >= 0.0) {
            return Err(Error::config(f("entropy_coef"), "must be non-negative"));
        }
        if !(self.value_coef >= 0.0) {
            return Err(Error::config(f("value_coef"), "must be non-negative"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config(f("learning_rate"), "must be positive"));
        }
        if self.epochs == 0 {
            return Err(Error::config(f("epochs"), "must be at least 1"));
        }
        if self.minibatch_size == 0 {
            return Err(Error::config(f("minibatch_size"), "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::config(f("gamma"), "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.gae_lambda) {
            return Err(Error::config(f("gae_lambda"), "must lie in [0, 1]"));
        }
        if !(self.max_grad_norm >= 0.0) {
            return Err(Error::config(f("max_grad_norm"), "must be non-negative"));
        }
        Ok(())
    }
}

/// One agent's rollout. Advantages and returns are filled by [`Trajectory::finish`].
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub obs: Vec<Vec<f64>>,
    pub actions: Vec<usize>,
    pub log_probs: Vec<f64>,
    pub values: Vec<f64>,
    pub rewards: Vec<f64>,
    pub dones: Vec<bool>,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
}

impl Trajectory {
    pub fn push(&mut self, obs: Vec<f64>, action: usize, log_prob: f64, value: f64, reward: f64, done: bool) {
        self.obs.push(obs);
        self.actions.push(action);
        self.log_probs.push(log_prob);
        self.values.push(value);
        self.rewards.push(reward);
        self.dones.push(done);
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }

    /// Computes GAE advantages and returns with this level's γ and λ.
    /// `last_value` bootstraps a trajectory cut before a terminal step.
    pub fn finish(&mut self, last_value: f64, gamma: f64, lambda: f64) {
        let (adv, ret) = compute_gae(&self.rewards, &self.values, &self.dones, last_value, gamma, lambda);
        self.advantages = adv;
        self.returns = ret;
    }
}

/// Generalized advantage estimation. `dones[t]` marks the last step of an
/// episode, after which nothing is bootstrapped.
pub fn compute_gae(
    rewards: &[f64],
    values: &[f64],
    dones: &[bool],
    last_value: f64,
    gamma: f64,
    lambda: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n = rewards.len();
    let mut adv = vec![0.0; n];
    let mut next_adv = 0.0;
    let mut next_value = last_value;
    for t in (0..n).rev() {
        let live = if dones[t] { 0.0 } else { 1.0 };
        let delta = rewards[t] + gamma * next_value * live - values[t];
        next_adv = delta + gamma * lambda * live * next_adv;
        adv[t] = next_adv;
        next_value = values[t];
    }
    let ret = adv.iter().zip(values).map(|(a, v)| a + v).collect();
    (adv, ret)
}

/// One training example as seen by the loss.
#[derive(Debug, Clone)]
pub struct Sample {
    pub obs: Vec<f64>,
    pub action: usize,
    pub old_log_prob: f64,
    pub advantage: f64,
    pub ret: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LossStats {
    /// Mean negated clipped surrogate.
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
}

impl LossStats {
    /// The scalar actually minimized.
    pub fn total(&self, cfg: &PpoConfig) -> f64 {
        self.policy_loss + cfg.value_coef * self.value_loss - cfg.entropy_coef * self.entropy
    }
}

/// The clipped surrogate term `min(r A, clip(r, 1-ε, 1+ε) A)`.
pub fn clipped_surrogate(ratio: f64, advantage: f64, clip: f64) -> f64 {
    (ratio * advantage).min(ratio.clamp(1.0 - clip, 1.0 + clip) * advantage)
}

/// Mean PPO loss over `batch` and its gradient w.r.t. every parameter:
/// `-min(rA, clip(r)A) + value_coef (V - R)^2 - entropy_coef H`.
pub fn ppo_loss_and_grad(params: &PolicyParams, batch: &[Sample], cfg: &PpoConfig) -> Result<(LossStats, Vec<f64>)> {
    if batch.is_empty() {
        return Err(Error::EmptyInput("PPO batch"));
    }
    let n = batch.len() as f64;
    let mut grad = vec![0.0; params.len()];
    let mut stats = LossStats::default();
    let mut d_logits = vec![0.0; params.n_actions()];
    for s in batch {
        let c = params.forward(&s.obs)?;
        let p = &c.probs;
        if s.action >= p.len() {
            return Err(Error::Contract(format!("action {} outside head of size {}", s.action, p.len())));
        }
        let log_p = p[s.action].ln();
        let ratio = (log_p - s.old_log_prob).exp();
        let a = s.advantage;
        let unclipped = ratio * a;
        let surrogate = clipped_surrogate(ratio, a, cfg.clip);
        let h = entropy(p);
        let err = c.value - s.ret;

        stats.policy_loss -= surrogate / n;
        stats.value_loss += err * err / n;
        stats.entropy += h / n;
        stats.approx_kl += (s.old_log_prob - log_p) / n;
        if (ratio - 1.0).abs() > cfg.clip {
            stats.clip_fraction += 1.0 / n;
        }

        // the unclipped branch carries the gradient whenever min() selects it
        let pg = if unclipped <= surrogate { -a * ratio } else { 0.0 };
        for (j, d) in d_logits.iter_mut().enumerate() {
            let onehot = if j == s.action { 1.0 } else { 0.0 };
            let mut g = pg * (onehot - p[j]);
            if p[j] > 0.0 {
                g += cfg.entropy_coef * p[j] * (p[j].ln() + h);
            }
            *d = g / n;
        }
        let d_value = 2.0 * cfg.value_coef * err / n;
        params.backward(&c, &d_logits, d_value, &mut grad);
    }
    Ok((stats, grad))
}

/// Adam with bias correction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(n_params: usize) -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
        }
    }

    /// Descends along `grad`.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            params[i] -= lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + self.eps);
        }
    }
}

/// Rescales `grad` so its L2 norm is at most `max_norm`. Returns the norm
/// before clipping.
pub fn clip_grad_norm(grad: &mut [f64], max_norm: f64) -> f64 {
    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    if max_norm > 0.0 && norm > max_norm {
        let s = max_norm / norm;
        grad.iter_mut().for_each(|g| *g *= s);
    }
    norm
}

/// Flattens finished trajectories into samples with advantages normalized
/// over the whole batch.
pub fn collect_samples(trajectories: &[Trajectory]) -> Result<Vec<Sample>> {
    let mut out = Vec::new();
    for t in trajectories {
        if t.advantages.len() != t.len() {
            return Err(Error::Contract("trajectory advantages not computed".into()));
        }
        for i in 0..t.len() {
            out.push(Sample {
                obs: t.obs[i].clone(),
                action: t.actions[i],
                old_log_prob: t.log_probs[i],
                advantage: t.advantages[i],
                ret: t.returns[i],
            });
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyInput("trajectories"));
    }
    let n = out.len() as f64;
    let mean = out.iter().map(|s| s.advantage).sum::<f64>() / n;
    let var = out.iter().map(|s| (s.advantage - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt().max(1e-8);
    for s in &mut out {
        s.advantage = (s.advantage - mean) / std;
    }
    Ok(out)
}

/// Runs `cfg.epochs` passes of shuffled minibatch Adam steps over the
/// trajectories. Returns loss statistics averaged over minibatches.
pub fn ppo_update<R: Rng + ?Sized>(
    params: &mut PolicyParams,
    adam: &mut Adam,
    trajectories: &[Trajectory],
    cfg: &PpoConfig,
    rng: &mut R,
) -> Result<LossStats> {
    let mut samples = collect_samples(trajectories)?;
    let mut acc = LossStats::default();
    let mut batches = 0usize;
    for epoch in 0..cfg.epochs {
        samples.shuffle(rng);
        for chunk in samples.chunks(cfg.minibatch_size) {
            let (stats, mut grad) = ppo_loss_and_grad(params, chunk, cfg)?;
            let total = stats.total(cfg);
            let norm = clip_grad_norm(&mut grad, cfg.max_grad_norm);
            if !total.is_finite() || !norm.is_finite() {
                return Err(Error::Training(format!(
                    "non-finite loss in epoch {epoch}: total {total}, policy {}, value {}, entropy {}, grad norm {norm}",
                    stats.policy_loss, stats.value_loss, stats.entropy
                )));
            }
            adam.step(params.as_mut_slice(), &grad, cfg.learning_rate);
            acc.policy_loss += stats.policy_loss;
            acc.value_loss += stats.value_loss;
            acc.entropy += stats.entropy;
            acc.approx_kl += stats.approx_kl;
            acc.clip_fraction += stats.clip_fraction;
            batches += 1;
        }
    }
    if !params.is_finite() {
        return Err(Error::Training("parameters became non-finite after update".into()));
    }
    let k = batches as f64;
    Ok(LossStats {
        policy_loss: acc.policy_loss / k,
        value_loss: acc.value_loss / k,
        entropy: acc.entropy / k,
        approx_kl: acc.approx_kl / k,
        clip_fraction: acc.clip_fraction / k,
    })
}
