//! What each functional split costs one EC: compute grows and midhaul
//! shrinks as more processing moves out of the central cloud.

use oran_handover::split_model::{
    check_constraints, gops_for_group, midhaul_for_group, FsConfigTable, GroupAssignment, GroupCounts, ResourceLedger,
};
use oran_handover::scenario::{build_topology, TopologyConfig};
use oran_handover::{FsOption, Result};

pub struct Row {
    pub fs: u8,
    pub gops: f64,
    pub midhaul: f64,
}

/// Costs of running `users` non-transitional users on one EC under every
/// FS, plus a two-EC feasibility check at `g_th`.
pub fn run(users: usize, g_th: f64) -> Result<Vec<Row>> {
    let table = FsConfigTable::default();
    let topo = build_topology(&TopologyConfig::default())?;
    let n_aps = topo.aps_in_ec(0);

    println!("one EC, {n_aps} APs, {users} users");
    println!("FS  GOPS      midhaul (Mbps)");
    let mut rows = Vec::new();
    for fs in FsOption::all() {
        let gops = gops_for_group(fs, n_aps, users, &table);
        let midhaul = midhaul_for_group(fs, n_aps, &table);
        println!("{:>2}  {gops:8.0}  {midhaul:8.0}", fs.index());
        rows.push(Row { fs: fs.index(), gops, midhaul });
    }

    let per_ec = vec![GroupCounts { transitional: 6, non_transitional: users }; topo.n_ecs()];
    for (ft, fnt) in [(3, 3), (4, 3), (4, 4)] {
        let a = GroupAssignment::new(FsOption::new(ft)?, vec![FsOption::new(fnt)?; topo.n_ecs()])?;
        let ledger = ResourceLedger::compute(&a, &topo, &per_ec, &table, false, true);
        let v = check_constraints(&ledger, g_th, 60_000.0);
        println!(
            "{a}: EC0 {:.0} GOPS, midhaul {:.0} Mbps, over budget: {}",
            ledger.gops_total(0),
            ledger.midhaul_total,
            v.any()
        );
    }
    Ok(rows)
}

fn main() -> Result<()> {
    run(25, 16_000.0).map(|_| ())
}
