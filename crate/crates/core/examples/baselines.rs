//! Static and random FS baselines on the desk-scale scenario.

use oran_handover::harness::{evaluate_policy, ResolvedPolicy, SweepRow};
use oran_handover::optimizer::PolicyKind;
use oran_handover::{EnvConfig, Result};

pub fn run(seeds: &[u64], episodes: usize, episode_len: usize) -> Result<Vec<SweepRow>> {
    let env = EnvConfig { episode_len, ..EnvConfig::default() };
    let mut rows = Vec::new();
    println!("policy     objective  R(T)   R(U\\T)  gops-viol  dropped");
    for kind in [PolicyKind::Static(3), PolicyKind::Static(4), PolicyKind::Random] {
        let runs = evaluate_policy(&env, seeds, episodes, &ResolvedPolicy::Baseline(kind))?;
        let metrics: Vec<_> = runs.into_iter().map(|(m, _)| m).collect();
        let r = SweepRow::from_metrics(env.g_th, &kind.to_string(), &metrics);
        println!(
            "{:10} {:9.3}  {:.3}  {:.3}   {:.3}      {:.4}",
            r.policy, r.mean_objective, r.r_transitional, r.r_non_transitional, r.gops_violation_ratio, r.dropped_ratio
        );
        rows.push(r);
    }
    Ok(rows)
}

fn main() -> Result<()> {
    run(&[0, 1, 2], 4, 300).map(|_| ())
}
