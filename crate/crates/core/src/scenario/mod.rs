//! Network layout, user movement, radio quality and multi-connectivity
//! clustering.

mod cluster;
mod mobility;
mod radio;
mod topology;

pub use cluster::{classify_transitional, cluster_ecs, form_clusters, ClusterAssignment};
pub use mobility::{step_mobility, MobilityModel, RandomWaypoint};
pub use radio::{compute_sinr, RadioParams};
pub use topology::{build_topology, AccessPoint, EdgeCloud, NetworkTopology, Rect, TopologyConfig};

use serde::{Deserialize, Serialize};

use crate::qos::ReliabilityWindow;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserStatus {
    Connected,
    Disconnected,
    Dropped,
}

impl UserStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            UserStatus::Connected => "connected",
            UserStatus::Disconnected => "disconnected",
            UserStatus::Dropped => "dropped",
        }
    }
}

/// A mobile user together with its serving cluster and delay record.
#[derive(Debug, Clone, PartialEq)]
pub struct UserState {
    pub id: usize,
    pub position: Point,
    pub waypoint: Point,
    pub speed: f64,
    pub service_id: usize,
    /// Serving AP ids, nearest first.
    pub cluster: Vec<usize>,
    pub transitional: bool,
    pub status: UserStatus,
    pub delay_history: ReliabilityWindow,
}

impl UserState {
    pub fn new(id: usize, position: Point, waypoint: Point, speed: f64, window: usize) -> Self {
        Self {
            id,
            position,
            waypoint,
            speed,
            service_id: 0,
            cluster: Vec::new(),
            transitional: false,
            status: UserStatus::Connected,
            delay_history: ReliabilityWindow::new(window),
        }
    }

    pub fn is_connected(&self) -> bool {
        self.status == UserStatus::Connected
    }
}
