use serde::{Deserialize, Serialize};

use super::{AccessPoint, Point};

/// Log-distance path loss and a flat noise floor. Altitude is folded into
/// the constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioParams {
    /// Path loss at the reference distance, dB.
    pub pl0_db: f64,
    pub d0_m: f64,
    pub exponent: f64,
    pub noise_dbm: f64,
    /// Aggregate interference power in mW; zero means SINR = SNR.
    pub interference_mw: f64,
    pub sinr_threshold_db: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            pl0_db: 40.0,
            d0_m: 1.0,
            exponent: 3.0,
            noise_dbm: -90.0,
            interference_mw: 0.0,
            sinr_threshold_db: -6.0,
        }
    }
}

impl RadioParams {
    pub fn path_loss_db(&self, distance_m: f64) -> f64 {
        let d = distance_m.max(self.d0_m);
        self.pl0_db + 10.0 * self.exponent * (d / self.d0_m).log10()
    }

    fn noise_plus_interference_dbm(&self) -> f64 {
        if self.interference_mw > 0.0 {
            10.0 * (10f64.powf(self.noise_dbm / 10.0) + self.interference_mw).log10()
        } else {
            self.noise_dbm
        }
    }
}

/// SINR in dB of the downlink from `ap` to a user at `position`.
pub fn compute_sinr(position: &Point, ap: &AccessPoint, params: &RadioParams) -> f64 {
    let d = position.distance(&ap.position);
    ap.tx_power_dbm - params.path_loss_db(d) - params.noise_plus_interference_dbm()
}
