use std::collections::BTreeSet;

use super::{NetworkTopology, Point, UserState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    pub user_id: usize,
    /// Nearest first.
    pub ap_ids: Vec<usize>,
    /// The new cluster shares no AP with the previous one.
    pub complete_reconfiguration: bool,
}

/// The `k` nearest APs to `position`, ties broken by lower AP id.
pub(crate) fn nearest_aps(position: &Point, topology: &NetworkTopology, k: usize) -> Vec<usize> {
    let mut ranked: Vec<(f64, usize)> = topology
        .aps
        .iter()
        .map(|ap| (position.distance(&ap.position), ap.id))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    ranked.into_iter().take(k).map(|(_, id)| id).collect()
}

/// Greedy user-centric clustering: every user is served by its `k_min`
/// nearest APs. A user with an empty previous cluster (first timestep) is
/// never flagged as completely reconfigured.
pub fn form_clusters(
    users: &[UserState],
    topology: &NetworkTopology,
    k_min: usize,
) -> Result<Vec<ClusterAssignment>> {
    if k_min < 2 {
        return Err(Error::config("scenario.k_min", "must be at least 2"));
    }
    if topology.n_aps() < k_min {
        return Err(Error::config(
            "scenario.k_min",
            format!("needs {k_min} APs but topology has {}", topology.n_aps()),
        ));
    }
    Ok(users
        .iter()
        .map(|u| {
            let ap_ids = nearest_aps(&u.position, topology, k_min);
            let complete_reconfiguration =
                !u.cluster.is_empty() && !ap_ids.iter().any(|a| u.cluster.contains(a));
            ClusterAssignment {
                user_id: u.id,
                ap_ids,
                complete_reconfiguration,
            }
        })
        .collect())
}

/// Distinct ECs that own the APs of `cluster`, ascending.
pub fn cluster_ecs(cluster: &[usize], topology: &NetworkTopology) -> Result<Vec<usize>> {
    let set: BTreeSet<usize> = cluster
        .iter()
        .map(|&ap| topology.ec_of(ap))
        .collect::<Result<_>>()?;
    Ok(set.into_iter().collect())
}

/// A cluster is transitional when its APs belong to two or more CCAs.
pub fn classify_transitional(cluster: &[usize], topology: &NetworkTopology) -> Result<bool> {
    if cluster.is_empty() {
        return Err(Error::Topology("empty cluster".into()));
    }
    Ok(cluster_ecs(cluster, topology)?.len() >= 2)
}
