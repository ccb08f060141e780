use rand::Rng;

use crate::scenario::NetworkTopology;
use crate::split_model::{FsConfigTable, GroupAssignment, GroupCounts, ResourceLedger};

/// Who is served where this timestep.
#[derive(Debug, Clone, Copy)]
pub struct Membership<'a> {
    /// ECs whose APs serve each user.
    pub user_ecs: &'a [Vec<usize>],
    pub transitional: &'a [bool],
}

impl Membership<'_> {
    pub fn counts(&self, served: &[bool], n_ecs: usize) -> Vec<GroupCounts> {
        let mut counts = vec![GroupCounts::default(); n_ecs];
        for (u, ecs) in self.user_ecs.iter().enumerate() {
            if !served[u] {
                continue;
            }
            for &e in ecs {
                if self.transitional[u] {
                    counts[e].transitional += 1;
                } else {
                    counts[e].non_transitional += 1;
                }
            }
        }
        counts
    }

    fn served_at(&self, served: &[bool], ec: usize) -> Vec<usize> {
        (0..served.len())
            .filter(|&u| served[u] && self.user_ecs[u].contains(&ec))
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub g_th: f64,
    pub m_th: f64,
    pub share_cell_pfs: bool,
}

impl Budget {
    pub fn ledger(
        &self,
        assignment: &GroupAssignment,
        topology: &NetworkTopology,
        table: &FsConfigTable,
        counts: &[GroupCounts],
    ) -> ResourceLedger {
        ResourceLedger::compute(assignment, topology, counts, table, self.share_cell_pfs, true)
    }
}

/// Drops served users until every EC is within `g_th` and the midhaul is
/// within `m_th`, or nobody is left. GOPS overruns are cleared EC by EC in
/// id order, removing uniformly random users of the offending EC; midhaul
/// overruns remove random users round-robin across ECs (an EC that ends up
/// serving nobody releases its midhaul share). Clears `served[u]` for every
/// dropped user and returns the dropped ids in drop order.
pub fn drop_to_feasibility<R: Rng + ?Sized>(
    assignment: &GroupAssignment,
    topology: &NetworkTopology,
    table: &FsConfigTable,
    members: Membership<'_>,
    served: &mut [bool],
    budget: Budget,
    rng: &mut R,
) -> Vec<usize> {
    let n_ecs = topology.n_ecs();
    let mut dropped = Vec::new();
    let mut drop_one = |ec: usize, served: &mut [bool], rng: &mut R| -> bool {
        let pool = members.served_at(served, ec);
        if pool.is_empty() {
            return false;
        }
        let u = pool[rng.gen_range(0..pool.len())];
        served[u] = false;
        dropped.push(u);
        true
    };

    for ec in 0..n_ecs {
        loop {
            let ledger = budget.ledger(assignment, topology, table, &members.counts(served, n_ecs));
            if ledger.gops_total(ec) <= budget.g_th || !drop_one(ec, served, rng) {
                break;
            }
        }
    }

    let mut cursor = 0;
    loop {
        let ledger = budget.ledger(assignment, topology, table, &members.counts(served, n_ecs));
        if ledger.midhaul_total <= budget.m_th {
            break;
        }
        let next = (0..n_ecs)
            .map(|k| (cursor + k) % n_ecs)
            .find(|&e| !members.served_at(served, e).is_empty());
        match next {
            Some(ec) => {
                drop_one(ec, served, rng);
                cursor = (ec + 1) % n_ecs;
            }
            None => break,
        }
    }
    dropped
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::scenario::{build_topology, TopologyConfig};
    use crate::split_model::{FsCostRow, FsOption};

    fn single_ec() -> NetworkTopology {
        build_topology(&TopologyConfig { n_ecs: 1, aps_per_ec: 4, ..Default::default() }).unwrap()
    }

    fn table_gu12() -> FsConfigTable {
        let rows: Vec<FsCostRow> = FsConfigTable::default()
            .rows()
            .iter()
            .map(|r| FsCostRow {
                cell_gops_per_ap: 80.0,
                user_gops_per_user: 12.0,
                midhaul_per_ap: 0.0,
                ..*r
            })
            .collect();
        FsConfigTable::new(&rows).unwrap()
    }

    fn run(n_users: usize, g_th: f64, seed: u64) -> Vec<usize> {
        let topo = single_ec();
        let table = table_gu12();
        let a = GroupAssignment::uniform(FsOption::new(3).unwrap(), 1).unwrap();
        let user_ecs = vec![vec![0usize]; n_users];
        let transitional = vec![false; n_users];
        let mut served = vec![true; n_users];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members = Membership { user_ecs: &user_ecs, transitional: &transitional };
        let budget = Budget { g_th, m_th: 1e9, share_cell_pfs: false };
        let d = drop_to_feasibility(&a, &topo, &table, members, &mut served, budget, &mut rng);
        let ledger = budget.ledger(&a, &topo, &table, &members.counts(&served, 1));
        assert!(ledger.gops_total(0) <= g_th || served.iter().all(|s| !s));
        d
    }

    #[test]
    fn within_budget_drops_nobody() {
        assert!(run(10, 1e6, 1).is_empty());
    }

    #[test]
    fn overshoot_of_20_with_gu_12_drops_two() {
        // 8 cell terms of 80 GOPS + 30 users × 12 = 1000; budget 980
        let d = run(30, 980.0, 2);
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn drops_replay_under_seed() {
        assert_eq!(run(30, 800.0, 9), run(30, 800.0, 9));
    }

    #[test]
    fn unfixable_budget_drops_everyone() {
        // cell terms alone exceed the budget
        assert_eq!(run(5, 100.0, 3).len(), 5);
    }

    #[test]
    fn midhaul_overrun_empties_ecs_round_robin() {
        let topo = build_topology(&TopologyConfig::default()).unwrap();
        let table = FsConfigTable::default();
        let a = GroupAssignment::uniform(FsOption::new(1).unwrap(), 2).unwrap();
        let user_ecs: Vec<Vec<usize>> = (0..6).map(|u| vec![u % 2]).collect();
        let transitional = vec![false; 6];
        let mut served = vec![true; 6];
        let members = Membership { user_ecs: &user_ecs, transitional: &transitional };
        // each EC needs 48000 Mbps at FS 1; 60000 only fits one
        let budget = Budget { g_th: 1e9, m_th: 60000.0, share_cell_pfs: false };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = drop_to_feasibility(&a, &topo, &table, members, &mut served, budget, &mut rng);
        // alternating drops: the EC 0 queue empties first after 5 drops
        assert_eq!(d.len(), 5);
        assert_eq!(d.iter().filter(|&&u| u % 2 == 0).count(), 3);
        let ledger = budget.ledger(&a, &topo, &table, &members.counts(&served, 2));
        assert!(ledger.midhaul_total <= 60000.0);
    }
}
