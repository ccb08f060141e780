#![allow(dead_code)]

use oran_handover::hmarl::net::PolicyParams;
use oran_handover::hmarl::ppo::{ppo_loss_and_grad, PpoConfig, Sample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random network plus a batch whose importance ratios sit either well
/// inside the clip range or well outside it, so no sample straddles a kink
/// of the surrogate under a 1e-5 perturbation.
pub fn random_problem(seed: u64, obs_dim: usize, hidden: usize, n_actions: usize, n: usize) -> (PolicyParams, Vec<Sample>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = PolicyParams::init(obs_dim, hidden, n_actions, &mut rng).unwrap();
    // a non-trivial policy head so entropy gradients are not vanishingly small
    for w in p.as_mut_slice() {
        *w += rng.gen_range(-0.3..0.3);
    }
    let batch = (0..n)
        .map(|i| {
            let obs: Vec<f64> = (0..obs_dim).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let probs = p.forward(&obs).unwrap().probs;
            let action = rng.gen_range(0..n_actions);
            let shift = match i % 3 {
                0 => rng.gen_range(-0.1..0.1),
                1 => 0.8,
                _ => -0.8,
            };
            Sample {
                obs,
                action,
                old_log_prob: probs[action].ln() + shift,
                advantage: rng.gen_range(-2.0..2.0),
                ret: rng.gen_range(-3.0..3.0),
            }
        })
        .collect();
    (p, batch)
}

/// Largest `|analytic - numeric| / max(|analytic|, |numeric|, floor)` over
/// all parameters, with central differences of step `h`.
pub fn max_relative_error(params: &PolicyParams, batch: &[Sample], cfg: &PpoConfig, h: f64, floor: f64) -> f64 {
    let (_, analytic) = ppo_loss_and_grad(params, batch, cfg).unwrap();
    let loss = |p: &PolicyParams| ppo_loss_and_grad(p, batch, cfg).unwrap().0.total(cfg);
    let mut worst = 0.0f64;
    let mut q = params.clone();
    for (i, &a) in analytic.iter().enumerate() {
        let w = params.as_slice()[i];
        q.as_mut_slice()[i] = w + h;
        let up = loss(&q);
        q.as_mut_slice()[i] = w - h;
        let down = loss(&q);
        q.as_mut_slice()[i] = w;
        let numeric = (up - down) / (2.0 * h);
        let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(floor);
        worst = worst.max(err);
    }
    worst
}

#[derive(Debug, Clone, Copy)]
pub enum Term {
    Policy,
    Value,
    Entropy,
}

/// Config and batch in which only `term` contributes to the loss. Zero
/// advantages silence the surrogate; zero coefficients silence the rest.
pub fn isolate(term: Term, batch: &[Sample]) -> (PpoConfig, Vec<Sample>) {
    let mut b = batch.to_vec();
    let base = PpoConfig::default();
    let cfg = match term {
        Term::Policy => PpoConfig { entropy_coef: 0.0, value_coef: 0.0, ..base },
        Term::Value => PpoConfig { entropy_coef: 0.0, value_coef: 0.5, ..base },
        Term::Entropy => PpoConfig { entropy_coef: 0.01, value_coef: 0.0, ..base },
    };
    if !matches!(term, Term::Policy) {
        b.iter_mut().for_each(|s| s.advantage = 0.0);
    }
    (cfg, b)
}

/// A random cost table that satisfies every shape invariant: per-AP and
/// per-user GOPS rise with the FS index, midhaul and total delay fall.
pub fn random_table<R: Rng>(rng: &mut R) -> oran_handover::FsConfigTable {
    use oran_handover::split_model::FsCostRow;
    let mut gb = rng.gen_range(10.0..300.0);
    let mut gu = rng.gen_range(1.0..50.0);
    let mut m = rng.gen_range(5_000.0..12_000.0);
    let mut delay = rng.gen_range(10.0..20.0);
    let rows: Vec<FsCostRow> = (1..=7u8)
        .map(|fs| {
            let split = rng.gen_range(0.1..0.9);
            let tx = delay * rng.gen_range(0.05..0.3);
            let row = FsCostRow {
                fs,
                cell_gops_per_ap: gb,
                user_gops_per_user: gu,
                midhaul_per_ap: m,
                proc_delay_ec: (delay - tx) * split,
                proc_delay_cc: (delay - tx) * (1.0 - split),
                tx_delay_midhaul: tx,
            };
            gb += rng.gen_range(0.0..200.0);
            gu += rng.gen_range(0.0..80.0);
            m *= rng.gen_range(0.2..1.0);
            delay *= rng.gen_range(0.5..1.0);
            row
        })
        .collect();
    oran_handover::FsConfigTable::new(&rows).expect("generated table is valid")
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
