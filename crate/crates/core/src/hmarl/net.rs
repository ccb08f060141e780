use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two tanh hidden layers feeding a softmax policy head and a scalar value
/// head. All weights live in one flat vector so optimizers, aggregation and
/// checkpoints can treat the network as a plain parameter array.
///
/// Layout (row-major, `out x in`): `W1 b1 W2 b2 Wp bp wv bv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    obs_dim: usize,
    hidden: usize,
    n_actions: usize,
    data: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Offsets {
    w1: usize,
    b1: usize,
    w2: usize,
    b2: usize,
    wp: usize,
    bp: usize,
    wv: usize,
    bv: usize,
    len: usize,
}

fn offsets(obs_dim: usize, hidden: usize, n_actions: usize) -> Offsets {
    let w1 = 0;
    let b1 = w1 + hidden * obs_dim;
    let w2 = b1 + hidden;
    let b2 = w2 + hidden * hidden;
    let wp = b2 + hidden;
    let bp = wp + n_actions * hidden;
    let wv = bp + n_actions;
    let bv = wv + hidden;
    Offsets {
        w1,
        b1,
        w2,
        b2,
        wp,
        bp,
        wv,
        bv,
        len: bv + 1,
    }
}

/// Intermediate activations kept for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub obs: Vec<f64>,
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    pub logits: Vec<f64>,
    pub probs: Vec<f64>,
    pub value: f64,
}

impl PolicyParams {
    /// All-zero network: uniform policy, zero value.
    pub fn zeros(obs_dim: usize, hidden: usize, n_actions: usize) -> Result<Self> {
        if obs_dim == 0 || hidden == 0 || n_actions < 2 {
            return Err(Error::Contract(format!(
                "network needs obs_dim > 0, hidden > 0 and >= 2 actions, got {obs_dim}/{hidden}/{n_actions}"
            )));
        }
        let len = offsets(obs_dim, hidden, n_actions).len;
        Ok(Self {
            obs_dim,
            hidden,
            n_actions,
            data: vec![0.0; len],
        })
    }

    /// Glorot-uniform hidden layers, a near-zero policy head (so the
    /// initial policy is close to uniform) and zero biases.
    pub fn init<R: Rng + ?Sized>(obs_dim: usize, hidden: usize, n_actions: usize, rng: &mut R) -> Result<Self> {
        let mut p = Self::zeros(obs_dim, hidden, n_actions)?;
        let o = p.offsets();
        let mut fill = |data: &mut [f64], fan_in: usize, fan_out: usize, gain: f64| {
            let a = gain * (6.0 / (fan_in + fan_out) as f64).sqrt();
            for w in data {
                *w = rng.gen_range(-a..a);
            }
        };
        fill(&mut p.data[o.w1..o.b1], obs_dim, hidden, 1.0);
        fill(&mut p.data[o.w2..o.b2], hidden, hidden, 1.0);
        fill(&mut p.data[o.wp..o.bp], hidden, n_actions, 0.01);
        fill(&mut p.data[o.wv..o.bv], hidden, 1, 1.0);
        Ok(p)
    }

    /// Rebuilds a network from a flat parameter vector.
    pub fn from_flat(obs_dim: usize, hidden: usize, n_actions: usize, data: Vec<f64>) -> Result<Self> {
        let mut p = Self::zeros(obs_dim, hidden, n_actions)?;
        if data.len() != p.data.len() {
            return Err(Error::Contract(format!(
                "expected {} parameters for shape {obs_dim}x{hidden}x{n_actions}, got {}",
                p.data.len(),
                data.len()
            )));
        }
        p.data = data;
        Ok(p)
    }

    fn offsets(&self) -> Offsets {
        offsets(self.obs_dim, self.hidden, self.n_actions)
    }

    pub fn obs_dim(&self) -> usize {
        self.obs_dim
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        (self.obs_dim, self.hidden, self.n_actions) == (other.obs_dim, other.hidden, other.n_actions)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn forward(&self, obs: &[f64]) -> Result<ForwardCache> {
        if obs.len() != self.obs_dim {
            return Err(Error::Contract(format!(
                "observation has {} entries, network expects {}",
                obs.len(),
                self.obs_dim
            )));
        }
        let o = self.offsets();
        let d = &self.data;
        let h1 = dense_tanh(&d[o.w1..o.b1], &d[o.b1..o.w2], obs);
        let h2 = dense_tanh(&d[o.w2..o.b2], &d[o.b2..o.wp], &h1);
        let logits = dense(&d[o.wp..o.bp], &d[o.bp..o.wv], &h2);
        let value = dot(&d[o.wv..o.bv], &h2) + d[o.bv];
        let probs = softmax(&logits);
        Ok(ForwardCache {
            obs: obs.to_vec(),
            h1,
            h2,
            logits,
            probs,
            value,
        })
    }

    /// Accumulates into `grad` the parameter gradient of a scalar loss whose
    /// partial derivatives w.r.t. the logits and the value are given.
    pub fn backward(&self, cache: &ForwardCache, d_logits: &[f64], d_value: f64, grad: &mut [f64]) {
        let o = self.offsets();
        let (h, a) = (self.hidden, self.n_actions);
        let d = &self.data;
        debug_assert_eq!(grad.len(), d.len());
        debug_assert_eq!(d_logits.len(), a);

        let mut d_h2 = vec![0.0; h];
        for i in 0..a {
            let g = d_logits[i];
            if g == 0.0 {
                continue;
            }
            let row = o.wp + i * h;
            for j in 0..h {
                grad[row + j] += g * cache.h2[j];
                d_h2[j] += g * d[row + j];
            }
            grad[o.bp + i] += g;
        }
        for j in 0..h {
            grad[o.wv + j] += d_value * cache.h2[j];
            d_h2[j] += d_value * d[o.wv + j];
        }
        grad[o.bv] += d_value;

        let d_z2: Vec<f64> = d_h2.iter().zip(&cache.h2).map(|(g, y)| g * (1.0 - y * y)).collect();
        let mut d_h1 = vec![0.0; h];
        for i in 0..h {
            let row = o.w2 + i * h;
            for j in 0..h {
                grad[row + j] += d_z2[i] * cache.h1[j];
                d_h1[j] += d_z2[i] * d[row + j];
            }
            grad[o.b2 + i] += d_z2[i];
        }

        let n = self.obs_dim;
        for i in 0..h {
            let d_z1 = d_h1[i] * (1.0 - cache.h1[i] * cache.h1[i]);
            let row = o.w1 + i * n;
            for j in 0..n {
                grad[row + j] += d_z1 * cache.obs[j];
            }
            grad[o.b1 + i] += d_z1;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dense(w: &[f64], b: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    b.iter().enumerate().map(|(i, bi)| bi + dot(&w[i * n..(i + 1) * n], x)).collect()
}

fn dense_tanh(w: &[f64], b: &[f64], x: &[f64]) -> Vec<f64> {
    let mut y = dense(w, b, x);
    for v in &mut y {
        *v = v.tanh();
    }
    y
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|z| (z - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// Action distribution and value estimate for one observation.
pub fn forward_policy(params: &PolicyParams, obs: &[f64]) -> Result<(Vec<f64>, f64)> {
    let c = params.forward(obs)?;
    Ok((c.probs, c.value))
}
