use serde::{Deserialize, Serialize};

use super::config::ObsScales;

pub const HIGH_OBS_DIM: usize = 3;
pub const LOW_OBS_DIM: usize = 7;

/// What the central-cloud agent sees before its turn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HighObs {
    /// |T|
    pub n_transitional: usize,
    /// D^{k,t}_min, ms.
    pub d_min: f64,
    /// Mean users per AP over APs that serve a transitional user.
    pub mean_load_transitional: f64,
}

impl HighObs {
    pub fn to_features(&self, s: &ObsScales) -> [f64; HIGH_OBS_DIM] {
        [
            self.n_transitional as f64 / s.users,
            self.d_min / s.delay_ms,
            self.mean_load_transitional / s.ap_load,
        ]
    }
}

/// What EC agent `ec` sees, after the central cloud has announced `a_cc`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowObs {
    pub ec: usize,
    /// |U^{e,t}|
    pub n_users_ec: usize,
    pub d_min: f64,
    /// E[|B^e|]: user-AP connections in the CCA per AP.
    pub mean_ap_load: f64,
    /// G^{e,t}_tot under F_t = a_cc and the EC's previous F_nt.
    pub gops_tot: f64,
    /// M^{e,t}
    pub midhaul_ec: f64,
    /// M^t_tot
    pub midhaul_tot: f64,
    /// High-level action (FS index 1..=4).
    pub a_cc: u8,
}

impl LowObs {
    /// `g_th`, `m_th` and `n_ecs` fill in resource scales left unset.
    pub fn to_features(&self, s: &ObsScales, g_th: f64, m_th: f64, n_ecs: usize) -> [f64; LOW_OBS_DIM] {
        [
            self.n_users_ec as f64 / s.users,
            self.d_min / s.delay_ms,
            self.mean_ap_load / s.ap_load,
            self.gops_tot / s.gops.unwrap_or(g_th),
            self.midhaul_ec / s.midhaul_ec.unwrap_or(m_th / n_ecs.max(1) as f64),
            self.midhaul_tot / s.midhaul_total.unwrap_or(m_th),
            self.a_cc as f64 / s.action,
        ]
    }
}
