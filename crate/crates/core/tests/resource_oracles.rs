mod common;

use common::{random_table, rel_close};
use oran_handover::optimizer::enumerate_configs;
use oran_handover::scenario::{build_topology, NetworkTopology, TopologyConfig};
use oran_handover::split_model::{
    gops_for_group, gops_total, midhaul_for_group, midhaul_total, GroupCounts, ResourceLedger,
};
use oran_handover::{FsConfigTable, FsOption, GroupAssignment};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Oracles charge one AP or one user at a time.
fn oracle_group_gops(table: &FsConfigTable, fs: FsOption, aps: usize, users: usize) -> f64 {
    let row = table.row(fs);
    let mut g = 0.0;
    for _ in 0..aps {
        g += row.cell_gops_per_ap;
    }
    for _ in 0..users {
        g += row.user_gops_per_user;
    }
    g
}

fn oracle_midhaul_total(table: &FsConfigTable, a: &GroupAssignment, topo: &NetworkTopology) -> f64 {
    let mut m = 0.0;
    for ec in &topo.ecs {
        for _ in &ec.ap_ids {
            m += table.row(a.fs_transitional).midhaul_per_ap;
            m += table.row(a.fs_nt(ec.id)).midhaul_per_ap;
        }
    }
    m
}

#[test]
fn formulas_match_direct_summation_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..1000 {
        let table = random_table(&mut rng);
        let topo = build_topology(&TopologyConfig {
            n_ecs: rng.gen_range(1..=4),
            aps_per_ec: rng.gen_range(1..=6),
            ..TopologyConfig::default()
        })
        .unwrap();
        let ft = FsOption::new(rng.gen_range(1..=4)).unwrap();
        let fnt: Vec<FsOption> = (0..topo.n_ecs()).map(|_| FsOption::new(rng.gen_range(1..=7)).unwrap()).collect();
        let a = GroupAssignment::new(ft, fnt).unwrap();
        let counts: Vec<GroupCounts> = (0..topo.n_ecs())
            .map(|_| GroupCounts {
                transitional: rng.gen_range(1..40),
                non_transitional: rng.gen_range(1..80),
            })
            .collect();
        let ledger = ResourceLedger::compute(&a, &topo, &counts, &table, false, true);
        for ec in &topo.ecs {
            let n = ec.ap_ids.len();
            let c = counts[ec.id];
            let g_t = oracle_group_gops(&table, ft, n, c.transitional);
            let g_nt = oracle_group_gops(&table, a.fs_nt(ec.id), n, c.non_transitional);
            assert!(rel_close(gops_for_group(ft, n, c.transitional, &table), g_t, 1e-12), "case {case}");
            assert!(rel_close(gops_total(ft, a.fs_nt(ec.id), n, c, &table, false), g_t + g_nt, 1e-12), "case {case}");
            assert!(rel_close(ledger.gops_total(ec.id), g_t + g_nt, 1e-12), "case {case}");
            let m_ec = n as f64 * (table.midhaul(ft) + table.midhaul(a.fs_nt(ec.id)));
            assert!(rel_close(ledger.midhaul_ec(ec.id), m_ec, 1e-12), "case {case}");
            assert!(rel_close(midhaul_for_group(ft, n, &table), n as f64 * table.midhaul(ft), 1e-12));
        }
        let m = oracle_midhaul_total(&table, &a, &topo);
        assert!(rel_close(midhaul_total(&a, &topo, &table), m, 1e-12), "case {case}");
        assert!(rel_close(ledger.midhaul_total, m, 1e-12), "case {case}");
    }
}

#[test]
fn shared_cell_functions_are_charged_once_at_the_heavier_split() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let table = random_table(&mut rng);
        let ft = FsOption::new(rng.gen_range(1..=4)).unwrap();
        let fnt = FsOption::new(rng.gen_range(1..=7)).unwrap();
        let n = rng.gen_range(1..8);
        let c = GroupCounts { transitional: rng.gen_range(0..20), non_transitional: rng.gen_range(0..40) };
        let mut oracle = 0.0;
        for _ in 0..n {
            oracle += table.g_b(ft).max(table.g_b(fnt));
        }
        for _ in 0..c.transitional {
            oracle += table.g_u(ft);
        }
        for _ in 0..c.non_transitional {
            oracle += table.g_u(fnt);
        }
        assert!(rel_close(gops_total(ft, fnt, n, c, &table, true), oracle, 1e-12));
    }
}

#[test]
fn default_table_tradeoff_is_exhaustively_monotone() {
    let table = FsConfigTable::default();
    for n_aps in 1..=8 {
        for users in 0..=60 {
            for i in 1..=7u8 {
                for j in i..=7u8 {
                    let (a, b) = (FsOption::new(i).unwrap(), FsOption::new(j).unwrap());
                    assert!(gops_for_group(a, n_aps, users, &table) <= gops_for_group(b, n_aps, users, &table));
                    assert!(midhaul_for_group(a, n_aps, &table) >= midhaul_for_group(b, n_aps, &table));
                }
            }
        }
    }
}

#[test]
fn midhaul_does_not_depend_on_user_counts() {
    let topo = build_topology(&TopologyConfig::default()).unwrap();
    let table = FsConfigTable::default();
    let loads = [(1, 1), (5, 30), (40, 2), (25, 25)];
    for a in enumerate_configs(topo.n_ecs()) {
        let reference = midhaul_total(&a, &topo, &table);
        for (t, nt) in loads {
            let counts = vec![GroupCounts { transitional: t, non_transitional: nt }; topo.n_ecs()];
            let l = ResourceLedger::compute(&a, &topo, &counts, &table, false, true);
            assert_eq!(l.midhaul_total, reference, "{a}");
        }
    }
}

proptest! {
    #[test]
    fn group_gops_is_affine_in_users(n_aps in 1usize..10, users in 0usize..100, fs in 1u8..=7) {
        let table = FsConfigTable::default();
        let fs = FsOption::new(fs).unwrap();
        let g0 = gops_for_group(fs, n_aps, 0, &table);
        let g = gops_for_group(fs, n_aps, users, &table);
        prop_assert!(rel_close(g - g0, users as f64 * table.g_u(fs), 1e-12));
    }

    #[test]
    fn ledger_total_is_sum_of_groups(t in 0usize..50, nt in 0usize..50, ft in 1u8..=4, fnt in 1u8..=7) {
        let topo = build_topology(&TopologyConfig::default()).unwrap();
        let table = FsConfigTable::default();
        let a = GroupAssignment::new(FsOption::new(ft).unwrap(), vec![FsOption::new(fnt).unwrap(); 2]).unwrap();
        let counts = vec![GroupCounts { transitional: t, non_transitional: nt }; 2];
        let l = ResourceLedger::compute(&a, &topo, &counts, &table, false, true);
        for e in &l.ecs {
            prop_assert_eq!(e.gops_total, e.gops_transitional + e.gops_non_transitional);
        }
    }
}
