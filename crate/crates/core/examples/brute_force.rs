//! Exhaustive search over all 196 assignments for a single timestep.

use oran_handover::optimizer::{enumerate_configs, BruteForce};
use oran_handover::{EnvConfig, GroupAssignment, HandoverEnv, Result};

pub fn run(seed: u64) -> Result<(GroupAssignment, f64)> {
    let (env, obs) = HandoverEnv::reset(EnvConfig { seed, ..EnvConfig::default() })?;
    println!("{} transitional users this timestep", obs.n_transitional);
    let solver = BruteForce::default();

    let mut scored = Vec::new();
    for a in enumerate_configs(env.n_ecs()) {
        let r = env.evaluate(&a, solver.eval_seed)?;
        scored.push((r.objective, r.violations.any(), a));
    }
    scored.sort_by(|x, y| y.0.total_cmp(&x.0));
    println!("best five of {}:", scored.len());
    for (obj, violated, a) in scored.iter().take(5) {
        println!("  {a:18} objective {obj:.3} violation {violated}");
    }

    let (best, score) = solver.solve(&env)?;
    println!("solver picks {best} with objective {score:.3}");
    Ok((best, score))
}

fn main() -> Result<()> {
    run(3).map(|_| ())
}
