//! Trains the two-level policy with PPO and compares its greedy behaviour
//! against the static F=4 baseline on unseen episodes.

use oran_handover::harness::{evaluate_policy, ResolvedPolicy, SweepRow};
use oran_handover::hmarl::{train, HmarlController, TrainConfig};
use oran_handover::optimizer::PolicyKind;
use oran_handover::{EnvConfig, Result};

pub fn run(iterations: usize, episode_len: usize) -> Result<(SweepRow, SweepRow)> {
    let env = EnvConfig { episode_len, ..EnvConfig::default() };
    let cfg = TrainConfig { iterations, ..TrainConfig::default() };
    let out = train(&env, &cfg, None)?;
    let every = (iterations / 10).max(1);
    for p in out.curve.iter().step_by(every) {
        println!(
            "iter {:4}  r_cc/episode {:8.1}  objective {:.3}  entropy high {:.2} low {:.2}",
            p.iteration, p.episode_r_cc, p.mean_objective, p.high_entropy, p.low_entropy
        );
    }

    let seeds = [100, 101];
    let learned = ResolvedPolicy::Hmarl(HmarlController::new(out.high, out.low)?);
    let summarize = |policy: &ResolvedPolicy| -> Result<SweepRow> {
        let runs = evaluate_policy(&env, &seeds, 2, policy)?;
        let m: Vec<_> = runs.into_iter().map(|(m, _)| m).collect();
        Ok(SweepRow::from_metrics(env.g_th, &policy.label(), &m))
    };
    let h = summarize(&learned)?;
    let s = summarize(&ResolvedPolicy::Baseline(PolicyKind::Static(4)))?;
    for r in [&h, &s] {
        println!(
            "{:9} objective {:.3}  gops violations {:.3}  dropped {:.4}",
            r.policy, r.mean_objective, r.gops_violation_ratio, r.dropped_ratio
        );
    }
    Ok((h, s))
}

fn main() -> Result<()> {
    run(200, 300).map(|_| ())
}
