//! Places users on the default two-EC layout, serves each with its nearest
//! APs and follows how many of them straddle a CCA border as they move.

use oran_handover::optimizer::{BaselineController, Controller, PolicyKind};
use oran_handover::{EnvConfig, HandoverEnv, Result};

/// Returns the number of transitional users at every observed timestep.
pub fn run(steps: usize) -> Result<Vec<usize>> {
    let cfg = EnvConfig { seed: 7, ..EnvConfig::default() };
    let (mut env, mut obs) = HandoverEnv::reset(cfg)?;
    let topo = env.topology();
    println!("{} ECs, {} APs", topo.n_ecs(), topo.n_aps());
    for ec in &topo.ecs {
        println!("  EC {} coordinates APs {:?}", ec.id, ec.ap_ids);
    }

    println!("first users at t=0:");
    for (u, ecs) in env.users().iter().zip(env.user_ecs()).take(6) {
        let kind = if u.transitional { "transitional" } else { "" };
        println!(
            "  user {:2} at ({:6.1}, {:6.1}) cluster {:?} ECs {:?} {kind}",
            u.id, u.position.x, u.position.y, u.cluster, ecs
        );
    }

    let mut counts = Vec::with_capacity(steps);
    let mut policy = BaselineController::new(PolicyKind::Static(3), 0)?;
    for _ in 0..steps {
        counts.push(obs.n_transitional);
        let a = policy.high(&env, &obs)?;
        let low = env.step_high(a)?;
        let actions = policy.low(&env, &low)?;
        if env.step_low(&actions)?.done {
            break;
        }
        obs = env.high_obs();
    }
    println!("transitional users per timestep: {counts:?}");
    Ok(counts)
}

fn main() -> Result<()> {
    run(20).map(|_| ())
}
