use serde::{Deserialize, Serialize};

use super::{FsConfigTable, FsOption, GroupAssignment};
use crate::scenario::NetworkTopology;

/// Users of one EC by group. A transitional user appears in the counts of
/// every EC whose APs serve it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GroupCounts {
    pub transitional: usize,
    pub non_transitional: usize,
}

impl GroupCounts {
    pub fn total(&self) -> usize {
        self.transitional + self.non_transitional
    }
}

/// G^{e,t}_x: cell PFs for every AP of the EC plus user PFs for every user
/// of the group.
pub fn gops_for_group(fs: FsOption, n_aps: usize, n_users: usize, table: &FsConfigTable) -> f64 {
    n_aps as f64 * table.g_b(fs) + n_users as f64 * table.g_u(fs)
}

/// G^{e,t}_tot summed over both groups. With `share_cell_pfs` the cell PFs
/// are charged once at the heavier of the two splits instead of once per
/// group.
pub fn gops_total(
    fs_t: FsOption,
    fs_nt: FsOption,
    n_aps: usize,
    counts: GroupCounts,
    table: &FsConfigTable,
    share_cell_pfs: bool,
) -> f64 {
    if share_cell_pfs {
        n_aps as f64 * table.g_b(fs_t).max(table.g_b(fs_nt))
            + counts.transitional as f64 * table.g_u(fs_t)
            + counts.non_transitional as f64 * table.g_u(fs_nt)
    } else {
        gops_for_group(fs_t, n_aps, counts.transitional, table)
            + gops_for_group(fs_nt, n_aps, counts.non_transitional, table)
    }
}

/// M^{e,t}_x. Scales with APs, not users.
pub fn midhaul_for_group(fs: FsOption, n_aps: usize, table: &FsConfigTable) -> f64 {
    n_aps as f64 * table.midhaul(fs)
}

/// M^t_tot over every EC and both groups.
pub fn midhaul_total(assignment: &GroupAssignment, topology: &NetworkTopology, table: &FsConfigTable) -> f64 {
    topology
        .ecs
        .iter()
        .map(|ec| {
            let n = ec.ap_ids.len();
            midhaul_for_group(assignment.fs_transitional, n, table)
                + midhaul_for_group(assignment.fs_nt(ec.id), n, table)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EcUsage {
    pub gops_transitional: f64,
    pub gops_non_transitional: f64,
    pub gops_total: f64,
    pub midhaul_transitional: f64,
    pub midhaul_non_transitional: f64,
    /// False when the EC serves nobody and deploys no PFs.
    pub active: bool,
}

impl EcUsage {
    pub fn midhaul(&self) -> f64 {
        self.midhaul_transitional + self.midhaul_non_transitional
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ViolationReport {
    pub gops_violation: Vec<bool>,
    pub midhaul_violation: bool,
}

impl ViolationReport {
    pub fn any_gops(&self) -> bool {
        self.gops_violation.iter().any(|&v| v)
    }

    pub fn any(&self) -> bool {
        self.any_gops() || self.midhaul_violation
    }
}

/// Per-EC and network resource usage for one assignment at one timestep.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ResourceLedger {
    pub ecs: Vec<EcUsage>,
    pub midhaul_total: f64,
}

impl ResourceLedger {
    /// Charges every EC per the group formulas. With `idle_empty_ecs` an EC
    /// whose counts are all zero deploys nothing and is charged zero.
    pub fn compute(
        assignment: &GroupAssignment,
        topology: &NetworkTopology,
        counts: &[GroupCounts],
        table: &FsConfigTable,
        share_cell_pfs: bool,
        idle_empty_ecs: bool,
    ) -> Self {
        let ecs: Vec<EcUsage> = topology
            .ecs
            .iter()
            .map(|ec| {
                let c = counts.get(ec.id).copied().unwrap_or_default();
                if idle_empty_ecs && c.total() == 0 {
                    return EcUsage::default();
                }
                let n = ec.ap_ids.len();
                let (ft, fnt) = (assignment.fs_transitional, assignment.fs_nt(ec.id));
                let (g_t, g_nt) = if share_cell_pfs {
                    // split the shared cell term proportionally for reporting
                    let total = gops_total(ft, fnt, n, c, table, true);
                    let g_t = c.transitional as f64 * table.g_u(ft);
                    (g_t, total - g_t)
                } else {
                    (
                        gops_for_group(ft, n, c.transitional, table),
                        gops_for_group(fnt, n, c.non_transitional, table),
                    )
                };
                EcUsage {
                    gops_transitional: g_t,
                    gops_non_transitional: g_nt,
                    gops_total: g_t + g_nt,
                    midhaul_transitional: midhaul_for_group(ft, n, table),
                    midhaul_non_transitional: midhaul_for_group(fnt, n, table),
                    active: true,
                }
            })
            .collect();
        let midhaul_total = ecs.iter().map(EcUsage::midhaul).sum();
        Self { ecs, midhaul_total }
    }

    pub fn gops_total(&self, ec: usize) -> f64 {
        self.ecs[ec].gops_total
    }

    pub fn midhaul_ec(&self, ec: usize) -> f64 {
        self.ecs[ec].midhaul()
    }
}

/// Feasible means `<=` the threshold; strictly above is a violation.
pub fn check_constraints(ledger: &ResourceLedger, g_th: f64, m_th: f64) -> ViolationReport {
    ViolationReport {
        gops_violation: ledger.ecs.iter().map(|e| e.gops_total > g_th).collect(),
        midhaul_violation: ledger.midhaul_total > m_th,
    }
}
