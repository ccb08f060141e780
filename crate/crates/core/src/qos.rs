//! End-to-end delay, windowed reliability, service continuity and the
//! weighted continuity objective.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{NetworkTopology, UserState, UserStatus};
use crate::split_model::{FsConfigTable, FsOption, GroupAssignment, ResourceLedger};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceSpec {
    pub id: usize,
    /// D_th^k, ms.
    pub delay_threshold_ms: f64,
    /// ε^k.
    pub outage_threshold: f64,
}

impl Default for ServiceSpec {
    fn default() -> Self {
        Self {
            id: 0,
            delay_threshold_ms: 12.0,
            outage_threshold: 1e-5,
        }
    }
}

impl ServiceSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.delay_threshold_ms > 0.0) {
            return Err(Error::config("services.delay_threshold_ms", "must be positive"));
        }
        if !(self.outage_threshold > 0.0 && self.outage_threshold < 1.0) {
            return Err(Error::config("services.outage_threshold", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DelayParams {
    /// λ: slope of processing slowdown once utilization passes `load_knee`.
    pub load_slope: f64,
    /// u_0: utilization (G_tot / G_th) at which slowdown starts.
    pub load_knee: f64,
    /// r_t: midhaul path stretch for transitional users routed via the CC.
    pub transitional_route_factor: f64,
    pub hw_overhead_ms: f64,
    /// W: reliability estimation window in timesteps.
    pub reliability_window: usize,
}

impl Default for DelayParams {
    fn default() -> Self {
        Self {
            load_slope: 1.0,
            load_knee: 0.85,
            transitional_route_factor: 1.5,
            hw_overhead_ms: 1.0,
            reliability_window: 50,
        }
    }
}

impl DelayParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.load_slope >= 0.0) {
            return Err(Error::config("delay.load_slope", "must be non-negative"));
        }
        if !(self.load_knee >= 0.0) {
            return Err(Error::config("delay.load_knee", "must be non-negative"));
        }
        if !(self.transitional_route_factor >= 1.0) {
            return Err(Error::config("delay.transitional_route_factor", "must be at least 1"));
        }
        if !(self.hw_overhead_ms >= 0.0) {
            return Err(Error::config("delay.hw_overhead_ms", "must be non-negative"));
        }
        if self.reliability_window == 0 {
            return Err(Error::config("delay.reliability_window", "must be at least 1"));
        }
        Ok(())
    }

    pub fn load_factor(&self, utilization: f64) -> f64 {
        1.0 + self.load_slope * (utilization - self.load_knee).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayBreakdown {
    pub tx_delay: f64,
    pub proc_delay: f64,
    pub hw_overhead: f64,
    pub total: f64,
}

/// Pluggable E2E delay model.
pub trait DelayModel {
    fn delay(&self, fs: FsOption, transitional: bool, utilization: f64, table: &FsConfigTable) -> DelayBreakdown;
}

/// Linear composition: midhaul transmission (stretched for transitional
/// users), PF processing (slowed by EC load) and a fixed hardware overhead.
impl DelayModel for DelayParams {
    fn delay(&self, fs: FsOption, transitional: bool, utilization: f64, table: &FsConfigTable) -> DelayBreakdown {
        let row = table.row(fs);
        let route = if transitional { self.transitional_route_factor } else { 1.0 };
        let tx_delay = row.tx_delay_midhaul * route;
        let proc_delay = (row.proc_delay_ec + row.proc_delay_cc) * self.load_factor(utilization);
        DelayBreakdown {
            tx_delay,
            proc_delay,
            hw_overhead: self.hw_overhead_ms,
            total: tx_delay + proc_delay + self.hw_overhead_ms,
        }
    }
}

/// Delay of one connected user under `assignment`. Transitional users see
/// the most loaded of the ECs that serve them.
pub fn e2e_delay<M: DelayModel>(
    user: &UserState,
    assignment: &GroupAssignment,
    ledger: &ResourceLedger,
    topology: &NetworkTopology,
    table: &FsConfigTable,
    model: &M,
    g_th: f64,
) -> Result<DelayBreakdown> {
    if user.status != UserStatus::Connected {
        return Err(Error::NoDelay {
            user_id: user.id,
            status: user.status.as_str(),
        });
    }
    let ecs = crate::scenario::cluster_ecs(&user.cluster, topology)?;
    let utilization = ecs
        .iter()
        .map(|&e| ledger.gops_total(e) / g_th)
        .fold(0.0, f64::max);
    let fs = if user.transitional {
        assignment.fs_transitional
    } else {
        assignment.fs_nt(ecs[0])
    };
    Ok(model.delay(fs, user.transitional, utilization, table))
}

/// One timestep of a user's service record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DelaySample {
    Delay(f64),
    /// Dropped or disconnected for the timestep.
    Outage,
}

impl DelaySample {
    pub fn is_outage(&self, spec: &ServiceSpec) -> bool {
        match *self {
            DelaySample::Delay(d) => d > spec.delay_threshold_ms,
            DelaySample::Outage => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityEstimate {
    pub window_size: usize,
    pub outage_count: usize,
    /// ε_u
    pub epsilon_hat: f64,
    /// ρ_u = 1 − ε_u
    pub rho: f64,
}

/// The last `capacity` timesteps of a user's delays.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityWindow {
    capacity: usize,
    samples: VecDeque<DelaySample>,
}

impl ReliabilityWindow {
    pub fn new(capacity: usize) -> Self {
        let capacity = capacity.max(1);
        Self {
            capacity,
            samples: VecDeque::with_capacity(capacity),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = &DelaySample> {
        self.samples.iter()
    }

    pub fn push(&mut self, sample: DelaySample) {
        if self.samples.len() == self.capacity {
            self.samples.pop_front();
        }
        self.samples.push_back(sample);
    }

    pub fn estimate(&self, spec: &ServiceSpec) -> ReliabilityEstimate {
        let window_size = self.samples.len();
        let outage_count = self.samples.iter().filter(|s| s.is_outage(spec)).count();
        let epsilon_hat = if window_size == 0 {
            0.0
        } else {
            outage_count as f64 / window_size as f64
        };
        ReliabilityEstimate {
            window_size,
            outage_count,
            epsilon_hat,
            rho: 1.0 - epsilon_hat,
        }
    }
}

impl ReliabilityWindow {
    /// The estimate `push(sample)` would produce, without pushing.
    pub fn estimate_with(&self, sample: DelaySample, spec: &ServiceSpec) -> ReliabilityEstimate {
        let current = self.samples.iter().filter(|s| s.is_outage(spec)).count();
        let evicted = self.samples.len() == self.capacity
            && self.samples.front().is_some_and(|s| s.is_outage(spec));
        let outage_count = current - usize::from(evicted) + usize::from(sample.is_outage(spec));
        let window_size = (self.samples.len() + 1).min(self.capacity);
        let epsilon_hat = outage_count as f64 / window_size as f64;
        ReliabilityEstimate {
            window_size,
            outage_count,
            epsilon_hat,
            rho: 1.0 - epsilon_hat,
        }
    }
}

pub fn record_and_estimate_reliability(
    window: &mut ReliabilityWindow,
    sample: DelaySample,
    spec: &ServiceSpec,
) -> ReliabilityEstimate {
    window.push(sample);
    window.estimate(spec)
}

/// R(Ω) over `(ε_u, ε^k)` pairs: share of users with ε_u strictly below
/// their service's threshold. An empty set scores 1.
pub fn continuity_ratio<I>(users: I) -> f64
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let (mut n, mut ok) = (0usize, 0usize);
    for (eps_u, eps_k) in users {
        n += 1;
        if eps_u < eps_k {
            ok += 1;
        }
    }
    if n == 0 {
        1.0
    } else {
        ok as f64 / n as f64
    }
}

/// ω_nt·R(U∖T) + ω_t·R(T)
pub fn objective_value(r_nt: f64, r_t: f64, w_nt: f64, w_t: f64) -> f64 {
    w_nt * r_nt + w_t * r_t
}
