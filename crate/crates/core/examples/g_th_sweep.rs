//! Scalability sweep: one fixed policy evaluated at several per-EC GOPS
//! budgets, with all run files written under a temporary directory.

use oran_handover::harness::{run_sweep, ExperimentConfig, SweepAxis, SweepRow, SweepSpec};
use oran_handover::optimizer::PolicyKind;
use oran_handover::Result;

pub fn run(values: &[f64], episodes: usize) -> Result<Vec<SweepRow>> {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut rows = Vec::new();
    for policy in [PolicyKind::Static(3), PolicyKind::Static(4)] {
        let cfg = ExperimentConfig {
            policy,
            episodes,
            seeds: vec![0, 1],
            output_dir: dir.path().join(policy.to_string().replace(':', "")),
            sweep: Some(SweepSpec { axis: SweepAxis::GTh, values: values.to_vec() }),
            ..ExperimentConfig::default()
        };
        let report = run_sweep(&cfg)?;
        for r in &report.rows {
            println!(
                "{:9} g_th {:>6}  objective {:.3}  R(T) {:.3}  gops violations {:.3}",
                r.policy, r.g_th, r.mean_objective, r.r_transitional, r.gops_violation_ratio
            );
        }
        rows.extend(report.rows);
    }
    Ok(rows)
}

fn main() -> Result<()> {
    run(&[14_000.0, 15_000.0, 16_000.0, 17_000.0, 18_000.0], 2).map(|_| ())
}
