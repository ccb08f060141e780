use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qos::{DelayParams, ServiceSpec};
use crate::scenario::{RadioParams, RandomWaypoint, TopologyConfig};
use crate::split_model::FsConfigTable;

/// Divisors applied to observation fields before they reach a policy.
/// `None` for the resource scales means "the active threshold", so the
/// policy sees utilization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObsScales {
    pub users: f64,
    pub delay_ms: f64,
    pub ap_load: f64,
    pub gops: Option<f64>,
    pub midhaul_ec: Option<f64>,
    pub midhaul_total: Option<f64>,
    pub action: f64,
}

impl Default for ObsScales {
    fn default() -> Self {
        Self {
            users: 50.0,
            delay_ms: 12.0,
            ap_load: 10.0,
            gops: None,
            midhaul_ec: None,
            midhaul_total: None,
            action: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvConfig {
    pub n_users: usize,
    pub episode_len: usize,
    /// Seconds per timestep.
    pub dt_s: f64,
    pub seed: u64,
    /// Users take service `id % services.len()`.
    pub services: Vec<ServiceSpec>,
    /// G_th per EC, GOPS.
    pub g_th: f64,
    /// M_th for the shared midhaul, Mbps. Defaults to 30000 per EC.
    pub m_th: Option<f64>,
    pub k_min: usize,
    pub topology: TopologyConfig,
    pub mobility: RandomWaypoint,
    pub radio: RadioParams,
    pub fs_table: FsConfigTable,
    pub delay: DelayParams,
    /// ω_nt
    pub weight_non_transitional: f64,
    /// ω_t
    pub weight_transitional: f64,
    /// ω_dc: reward penalty per dropped user.
    pub drop_penalty: f64,
    pub share_cell_pfs: bool,
    pub obs_scales: ObsScales,
}

pub const MIDHAUL_PER_EC_MBPS: f64 = 30_000.0;

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            n_users: 50,
            episode_len: 300,
            dt_s: 1.0,
            seed: 0,
            services: vec![ServiceSpec::default()],
            g_th: 16_000.0,
            m_th: None,
            k_min: 2,
            topology: TopologyConfig::default(),
            mobility: RandomWaypoint::default(),
            radio: RadioParams::default(),
            fs_table: FsConfigTable::default(),
            delay: DelayParams::default(),
            weight_non_transitional: 0.5,
            weight_transitional: 0.5,
            drop_penalty: 0.1,
            share_cell_pfs: false,
            obs_scales: ObsScales::default(),
        }
    }
}

impl EnvConfig {
    pub fn n_ecs(&self) -> usize {
        self.topology.n_ecs
    }

    pub fn m_th(&self) -> f64 {
        self.m_th
            .unwrap_or(MIDHAUL_PER_EC_MBPS * self.topology.n_ecs as f64)
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(field: &str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(field, format!("must be positive, got {v}")))
            }
        }
        if self.episode_len == 0 {
            return Err(Error::config("env.episode_len", "must be at least 1"));
        }
        positive("env.dt_s", self.dt_s)?;
        positive("env.g_th", self.g_th)?;
        positive("env.m_th", self.m_th())?;
        if self.services.is_empty() {
            return Err(Error::config("env.services", "needs at least one service"));
        }
        for s in &self.services {
            s.validate()?;
        }
        if self.k_min < 2 {
            return Err(Error::config("env.k_min", "must be at least 2"));
        }
        if self.topology.n_ecs * self.topology.aps_per_ec < self.k_min {
            return Err(Error::config(
                "env.topology",
                format!("has fewer APs than k_min = {}", self.k_min),
            ));
        }
        positive("env.mobility.v_min", self.mobility.v_min)?;
        if self.mobility.v_max < self.mobility.v_min {
            return Err(Error::config("env.mobility.v_max", "must be >= v_min"));
        }
        self.delay.validate()?;
        if !(self.weight_non_transitional >= 0.0 && self.weight_transitional >= 0.0) {
            return Err(Error::config("env.weight_*", "objective weights must be non-negative"));
        }
        if !(self.drop_penalty >= 0.0) {
            return Err(Error::config("env.drop_penalty", "must be non-negative"));
        }
        let s = &self.obs_scales;
        for (field, v) in [
            ("env.obs_scales.users", Some(s.users)),
            ("env.obs_scales.delay_ms", Some(s.delay_ms)),
            ("env.obs_scales.ap_load", Some(s.ap_load)),
            ("env.obs_scales.gops", s.gops),
            ("env.obs_scales.midhaul_ec", s.midhaul_ec),
            ("env.obs_scales.midhaul_total", s.midhaul_total),
            ("env.obs_scales.action", Some(s.action)),
        ] {
            if let Some(v) = v {
                positive(field, v)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_training_table() {
        let c = EnvConfig::default();
        assert_eq!(c.n_users, 50);
        assert_eq!(c.n_ecs(), 2);
        assert_eq!(c.episode_len, 300);
        assert_eq!(c.services[0].delay_threshold_ms, 12.0);
        assert_eq!(c.services[0].outage_threshold, 1e-5);
        assert_eq!(c.g_th, 16_000.0);
        assert_eq!(c.m_th(), 60_000.0);
        c.validate().unwrap();
    }

    #[test]
    fn invalid_fields_are_named() {
        let c = EnvConfig { g_th: 0.0, ..Default::default() };
        let err = c.validate().unwrap_err().to_string();
        assert!(err.contains("env.g_th"), "{err}");
        let c = EnvConfig { k_min: 9, ..Default::default() };
        assert!(c.validate().is_err());
    }
}
