use serde::{Deserialize, Serialize};

use super::Point;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(width: f64, height: f64) -> Self {
        Self {
            min: Point::new(0.0, 0.0),
            max: Point::new(width, height),
        }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn clamp(&self, p: Point) -> Point {
        Point::new(
            p.x.clamp(self.min.x, self.max.x),
            p.y.clamp(self.min.y, self.max.y),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccessPoint {
    pub id: usize,
    pub position: Point,
    pub ec_id: usize,
    pub tx_power_dbm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeCloud {
    pub id: usize,
    pub ap_ids: Vec<usize>,
}

/// APs grouped into coordination areas, one per EC, plus the single central
/// cloud that every EC reaches over the shared midhaul.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkTopology {
    pub ecs: Vec<EdgeCloud>,
    /// Indexed by AP id.
    pub aps: Vec<AccessPoint>,
    pub area: Rect,
}

impl NetworkTopology {
    pub fn n_ecs(&self) -> usize {
        self.ecs.len()
    }

    pub fn n_aps(&self) -> usize {
        self.aps.len()
    }

    pub fn ap(&self, id: usize) -> Result<&AccessPoint> {
        self.aps
            .get(id)
            .ok_or_else(|| Error::Topology(format!("unknown AP id {id}")))
    }

    pub fn ec_of(&self, ap_id: usize) -> Result<usize> {
        self.ap(ap_id).map(|ap| ap.ec_id)
    }

    /// |B^e|
    pub fn aps_in_ec(&self, ec: usize) -> usize {
        self.ecs.get(ec).map_or(0, |e| e.ap_ids.len())
    }

    /// Checks the EC/AP partition and that every AP lies inside the area.
    pub fn validate(&self) -> Result<()> {
        let mut owner = vec![None; self.aps.len()];
        for (idx, ap) in self.aps.iter().enumerate() {
            if ap.id != idx {
                return Err(Error::Topology(format!("AP at index {idx} has id {}", ap.id)));
            }
            if !ap.position.x.is_finite() || !ap.position.y.is_finite() {
                return Err(Error::Topology(format!("AP {idx} has a non-finite position")));
            }
            if !self.area.contains(&ap.position) {
                return Err(Error::Topology(format!("AP {idx} lies outside the area")));
            }
            if ap.ec_id >= self.ecs.len() {
                return Err(Error::Topology(format!("AP {idx} references missing EC {}", ap.ec_id)));
            }
        }
        for ec in &self.ecs {
            for &ap in &ec.ap_ids {
                let slot = owner
                    .get_mut(ap)
                    .ok_or_else(|| Error::Topology(format!("EC {} lists unknown AP {ap}", ec.id)))?;
                if slot.is_some() {
                    return Err(Error::Topology(format!("AP {ap} belongs to more than one EC")));
                }
                if self.aps[ap].ec_id != ec.id {
                    return Err(Error::Topology(format!("AP {ap} ec_id disagrees with EC {}", ec.id)));
                }
                *slot = Some(ec.id);
            }
        }
        if let Some(orphan) = owner.iter().position(Option::is_none) {
            return Err(Error::Topology(format!("AP {orphan} belongs to no EC")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopologyConfig {
    pub n_ecs: usize,
    pub aps_per_ec: usize,
    pub area_width_m: f64,
    pub area_height_m: f64,
    pub tx_power_dbm: f64,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        Self {
            n_ecs: 2,
            aps_per_ec: 4,
            area_width_m: 1000.0,
            area_height_m: 500.0,
            tx_power_dbm: 30.0,
        }
    }
}

/// Tiles the area into one vertical strip per EC (left to right by EC id)
/// and places each EC's APs on a regular grid at the cell centres of its
/// strip.
pub fn build_topology(cfg: &TopologyConfig) -> Result<NetworkTopology> {
    if cfg.n_ecs == 0 {
        return Err(Error::config("topology.n_ecs", "must be at least 1"));
    }
    if cfg.aps_per_ec == 0 {
        return Err(Error::config("topology.aps_per_ec", "must be at least 1"));
    }
    if !(cfg.area_width_m > 0.0) || !cfg.area_width_m.is_finite() {
        return Err(Error::config("topology.area_width_m", "must be positive"));
    }
    if !(cfg.area_height_m > 0.0) || !cfg.area_height_m.is_finite() {
        return Err(Error::config("topology.area_height_m", "must be positive"));
    }

    let area = Rect::new(cfg.area_width_m, cfg.area_height_m);
    let strip_w = cfg.area_width_m / cfg.n_ecs as f64;
    let h = cfg.area_height_m;
    let n = cfg.aps_per_ec;
    let cols = ((n as f64 * strip_w / h).sqrt().ceil() as usize).clamp(1, n);
    let rows = n.div_ceil(cols);

    let mut aps = Vec::with_capacity(cfg.n_ecs * n);
    let mut ecs = Vec::with_capacity(cfg.n_ecs);
    for e in 0..cfg.n_ecs {
        let x0 = e as f64 * strip_w;
        let mut ap_ids = Vec::with_capacity(n);
        for k in 0..n {
            let (r, c) = (k / cols, k % cols);
            let id = aps.len();
            aps.push(AccessPoint {
                id,
                position: Point::new(
                    x0 + (c as f64 + 0.5) * strip_w / cols as f64,
                    (r as f64 + 0.5) * h / rows as f64,
                ),
                ec_id: e,
                tx_power_dbm: cfg.tx_power_dbm,
            });
            ap_ids.push(id);
        }
        ecs.push(EdgeCloud { id: e, ap_ids });
    }

    let topo = NetworkTopology { ecs, aps, area };
    topo.validate()?;
    Ok(topo)
}
