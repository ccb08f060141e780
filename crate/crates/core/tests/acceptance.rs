//! Acceptance gate. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on any FAIL.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{max_relative_error, random_problem, random_table, rel_close};
use oran_handover::harness::{evaluate_policy, run_experiment, EpisodeMetrics, ExperimentConfig, ResolvedPolicy};
use oran_handover::hmarl::ppo::PpoConfig;
use oran_handover::hmarl::{train, HmarlController, TrainConfig};
use oran_handover::optimizer::{enumerate_configs, BaselineController, BruteForce, Controller, PolicyKind};
use oran_handover::qos::{DelaySample, ReliabilityWindow, ServiceSpec};
use oran_handover::scenario::{build_topology, TopologyConfig};
use oran_handover::split_model::{
    check_constraints, gops_for_group, gops_total, midhaul_for_group, midhaul_total, GroupCounts, ResourceLedger,
};
use oran_handover::{EnvConfig, Error, FsConfigTable, FsOption, GroupAssignment, HandoverEnv};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const OPTIMAL_STEP_BUDGET: Duration = Duration::from_secs(1);
const FORMULA_TOL: f64 = 1e-12;
const GRAD_H: f64 = 1e-5;
const GRAD_TOL: f64 = 1e-4;
const GRAD_FLOOR: f64 = 1e-6;
const GRAD_BUDGET: Duration = Duration::from_secs(10);
const STATIC_MARGIN: f64 = 0.02;
const OPTIMAL_REL_GAP: f64 = 0.10;
const TRAIN_BUDGET: Duration = Duration::from_secs(30 * 60);

const DESK_SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
const EVAL_EPISODES: usize = 20;
// evaluation seeds never overlap the training episodes of a seed
const EVAL_SEED_OFFSET: u64 = 1000;
const SWEEP_G_TH: [f64; 5] = [14_000.0, 15_000.0, 16_000.0, 17_000.0, 18_000.0];
const SWEEP_EPISODES: usize = 4;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn advance(env: &mut HandoverEnv, a: &GroupAssignment) {
    env.step_high(a.fs_transitional.index()).unwrap();
    let acts: Vec<u8> = a.fs_non_transitional.iter().map(|f| f.index()).collect();
    env.step_low(&acts).unwrap();
}

fn optimal_matches_exhaustive() -> Verdict {
    let solver = BruteForce::default();
    let (mut mismatches, mut checked, mut slowest) = (0, 0, Duration::ZERO);
    for seed in 0..3 {
        let (mut env, _) = HandoverEnv::reset(EnvConfig { seed, episode_len: 20, ..EnvConfig::default() }).unwrap();
        for _ in 0..20 {
            let t = Instant::now();
            let (a, score) = solver.solve(&env).unwrap();
            slowest = slowest.max(t.elapsed());
            let mut best = f64::NEG_INFINITY;
            let mut count = 0;
            for ft in 1..=4u8 {
                for f0 in 1..=7u8 {
                    for f1 in 1..=7u8 {
                        let fnt = vec![FsOption::new(f0).unwrap(), FsOption::new(f1).unwrap()];
                        let c = GroupAssignment::new(FsOption::new(ft).unwrap(), fnt).unwrap();
                        best = best.max(env.evaluate(&c, solver.eval_seed).unwrap().objective);
                        count += 1;
                    }
                }
            }
            if count != 196 || score != best {
                mismatches += 1;
            }
            checked += 1;
            advance(&mut env, &a);
        }
    }
    verdict(
        mismatches == 0 && slowest < OPTIMAL_STEP_BUDGET,
        format!("{mismatches}/{checked} timesteps differ from 196-way re-evaluation (exact); slowest solve {slowest:?} (< {OPTIMAL_STEP_BUDGET:?})"),
    )
}

fn formulas_match_oracles() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    let mut worst = 0.0f64;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1.0);
    for _ in 0..1000 {
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
            .map(|_| GroupCounts { transitional: rng.gen_range(0..40), non_transitional: rng.gen_range(0..80) })
            .collect();
        // the idle-EC rule is off so that empty groups are charged by formula
        let ledger = ResourceLedger::compute(&a, &topo, &counts, &table, false, false);
        let mut m_oracle = 0.0;
        for ec in &topo.ecs {
            let c = counts[ec.id];
            let mut g_oracle = 0.0;
            for _ in &ec.ap_ids {
                g_oracle += table.row(ft).cell_gops_per_ap + table.row(a.fs_nt(ec.id)).cell_gops_per_ap;
                m_oracle += table.row(ft).midhaul_per_ap + table.row(a.fs_nt(ec.id)).midhaul_per_ap;
            }
            for _ in 0..c.transitional {
                g_oracle += table.row(ft).user_gops_per_user;
            }
            for _ in 0..c.non_transitional {
                g_oracle += table.row(a.fs_nt(ec.id)).user_gops_per_user;
            }
            let n = ec.ap_ids.len();
            worst = worst
                .max(rel(gops_total(ft, a.fs_nt(ec.id), n, c, &table, false), g_oracle))
                .max(rel(ledger.gops_total(ec.id), g_oracle));
        }
        worst = worst
            .max(rel(midhaul_total(&a, &topo, &table), m_oracle))
            .max(rel(ledger.midhaul_total, m_oracle));
    }
    verdict(worst <= FORMULA_TOL, format!("1000 random cases, max relative deviation {worst:e} (<= {FORMULA_TOL:e})"))
}

fn default_table_is_monotone() -> Verdict {
    let table = FsConfigTable::default();
    let mut bad = 0;
    for n_aps in 1..=8 {
        for users in 0..=100 {
            for i in 1..7u8 {
                let (a, b) = (FsOption::new(i).unwrap(), FsOption::new(i + 1).unwrap());
                bad += usize::from(gops_for_group(a, n_aps, users, &table) > gops_for_group(b, n_aps, users, &table));
                bad += usize::from(midhaul_for_group(a, n_aps, &table) < midhaul_for_group(b, n_aps, &table));
            }
        }
    }
    let topo = build_topology(&TopologyConfig::default()).unwrap();
    let mut variant = 0;
    for a in enumerate_configs(topo.n_ecs()) {
        let reference = midhaul_total(&a, &topo, &table);
        for t in 0..=25 {
            for nt in 0..=25 {
                let counts = vec![GroupCounts { transitional: t, non_transitional: nt }; topo.n_ecs()];
                // an EC with no users at all is idle and carries no midhaul
                for idle in [false, t + nt > 0] {
                    let l = ResourceLedger::compute(&a, &topo, &counts, &table, false, idle);
                    variant += usize::from(l.midhaul_total != reference);
                }
            }
        }
    }
    verdict(
        bad == 0 && variant == 0,
        format!("{bad} monotonicity breaks over FS 1..7; {variant} user-count-dependent midhaul totals over 196 configs"),
    )
}

fn gradients_match_finite_differences() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for seed in 0..20 {
        let obs = rng.gen_range(2..10);
        let hidden = rng.gen_range(2..9);
        let actions = rng.gen_range(2..8);
        let n = rng.gen_range(4..16);
        let (p, batch) = random_problem(seed, obs, hidden, actions, n);
        worst = worst.max(max_relative_error(&p, &batch, &PpoConfig::default(), GRAD_H, GRAD_FLOOR));
    }
    let took = start.elapsed();
    verdict(
        worst < GRAD_TOL && took < GRAD_BUDGET,
        format!("20 random shapes, max relative error {worst:e} (< {GRAD_TOL:e}, h = {GRAD_H:e}) in {took:?} (< {GRAD_BUDGET:?})"),
    )
}

fn env_protocol_holds() -> Verdict {
    let (mut env, _) = HandoverEnv::reset(EnvConfig { episode_len: 3, ..EnvConfig::default() }).unwrap();
    let mut out_of_turn = 0;
    out_of_turn += usize::from(matches!(env.step_low(&[3, 3]), Err(Error::Protocol(_))));
    env.step_high(3).unwrap();
    out_of_turn += usize::from(matches!(env.step_high(3), Err(Error::Protocol(_))));

    let (mut infeasible, mut identity_breaks, mut steps) = (0, 0, 0);
    for seed in 0..10 {
        let cfg = EnvConfig { seed, ..EnvConfig::default() };
        let (mut env, mut obs) = HandoverEnv::reset(cfg.clone()).unwrap();
        let mut policy = BaselineController::new(PolicyKind::Random, seed).unwrap();
        loop {
            let a = policy.high(&env, &obs).unwrap();
            let low = env.step_high(a).unwrap();
            let acts = policy.low(&env, &low).unwrap();
            let o = env.step_low(&acts).unwrap();
            infeasible += usize::from(check_constraints(&o.ledger_post_drop, cfg.g_th, cfg.m_th()).any());
            let sum = o.r_transitional + o.low_rewards.iter().sum::<f64>();
            identity_breaks += usize::from(!rel_close(o.high_reward, sum, 1e-12));
            steps += 1;
            if o.done {
                break;
            }
            obs = env.high_obs();
        }
    }
    verdict(
        out_of_turn == 2 && infeasible == 0 && identity_breaks == 0,
        format!(
            "{out_of_turn}/2 out-of-turn calls rejected; over {steps} random-policy steps: {infeasible} infeasible after drops, {identity_breaks} r_CC != R(T) + sum r_e"
        ),
    )
}

fn mean(m: &[EpisodeMetrics], f: fn(&EpisodeMetrics) -> f64) -> f64 {
    m.iter().map(f).sum::<f64>() / m.len() as f64
}

fn eval(env: &EnvConfig, seeds: &[u64], episodes: usize, policy: &ResolvedPolicy) -> Vec<EpisodeMetrics> {
    evaluate_policy(env, seeds, episodes, policy).unwrap().into_iter().map(|(m, _)| m).collect()
}

/// Trains one HMARL policy pair per desk seed at the default settings.
fn train_desk() -> (Vec<HmarlController>, Duration) {
    let env = EnvConfig::default();
    let start = Instant::now();
    let trained = DESK_SEEDS
        .iter()
        .map(|&seed| {
            let out = train(&env, &TrainConfig { seed, ..TrainConfig::default() }, None).unwrap();
            HmarlController::new(out.high, out.low).unwrap()
        })
        .collect();
    (trained, start.elapsed())
}

fn eval_hmarl(env: &EnvConfig, trained: &[HmarlController], episodes: usize) -> Vec<EpisodeMetrics> {
    DESK_SEEDS
        .iter()
        .zip(trained)
        .flat_map(|(&s, c)| eval(env, &[s + EVAL_SEED_OFFSET], episodes, &ResolvedPolicy::Hmarl(c.clone())))
        .collect()
}

fn eval_seeds() -> Vec<u64> {
    DESK_SEEDS.iter().map(|s| s + EVAL_SEED_OFFSET).collect()
}

fn desk_scale(trained: &[HmarlController], train_time: Duration) -> Verdict {
    let env = EnvConfig::default();
    let seeds = eval_seeds();
    let hmarl = eval_hmarl(&env, trained, EVAL_EPISODES);
    let s3 = eval(&env, &seeds, EVAL_EPISODES, &ResolvedPolicy::Baseline(PolicyKind::Static(3)));
    let s4 = eval(&env, &seeds, EVAL_EPISODES, &ResolvedPolicy::Baseline(PolicyKind::Static(4)));
    let opt = eval(&env, &seeds, EVAL_EPISODES, &ResolvedPolicy::Optimal(BruteForce::default()));

    let obj = |m: &[EpisodeMetrics]| mean(m, |x| x.mean_objective);
    let gv = |m: &[EpisodeMetrics]| mean(m, |x| x.gops_violation_ratio);
    let (h_obj, h_gv) = (obj(&hmarl), gv(&hmarl));
    let best_static = obj(&s3).max(obj(&s4));
    let worse_gv = gv(&s3).max(gv(&s4));
    let o_obj = obj(&opt);
    let gap = (o_obj - h_obj) / o_obj;
    let a = h_obj >= best_static - STATIC_MARGIN;
    let b = h_gv <= worse_gv;
    let c = gap <= OPTIMAL_REL_GAP;
    let d = train_time <= TRAIN_BUDGET;
    verdict(
        a && b && c && d,
        format!(
            "objective {h_obj:.4} vs best static {best_static:.4} - {STATIC_MARGIN} [{}]; gops violations {h_gv:.4} vs worse static {worse_gv:.4} [{}]; shortfall to optimal {o_obj:.4} is {:.1}% (<= {:.0}%) [{}]; training {train_time:.1?} (<= {TRAIN_BUDGET:?}) [{}]",
            ok(a),
            ok(b),
            100.0 * gap,
            100.0 * OPTIMAL_REL_GAP,
            ok(c),
            ok(d)
        ),
    )
}

fn g_th_sweep(trained: &[HmarlController]) -> Verdict {
    let seeds = eval_seeds();
    let at = |g_th: f64| EnvConfig { g_th, ..EnvConfig::default() };
    let optimal: Vec<f64> = SWEEP_G_TH
        .iter()
        .map(|&g| {
            let m = eval(&at(g), &seeds, SWEEP_EPISODES, &ResolvedPolicy::Optimal(BruteForce::default()));
            mean(&m, |x| x.mean_objective)
        })
        .collect();
    let monotone = optimal.windows(2).all(|w| w[1] >= w[0]);
    let lo = mean(&eval_hmarl(&at(SWEEP_G_TH[0]), trained, SWEEP_EPISODES), |x| x.r_transitional);
    let hi = mean(&eval_hmarl(&at(SWEEP_G_TH[4]), trained, SWEEP_EPISODES), |x| x.r_transitional);
    let shown: Vec<String> = optimal.iter().map(|v| format!("{v:.4}")).collect();
    verdict(
        monotone && hi > lo,
        format!(
            "optimal objective over G_th 14k..18k [{}] non-decreasing [{}]; HMARL R(T) {hi:.4} at 18k > {lo:.4} at 14k [{}]",
            shown.join(", "),
            ok(monotone),
            ok(hi > lo)
        ),
    )
}

fn summary_is_reproducible() -> Verdict {
    let mut identical = 0;
    let policies = [PolicyKind::Random, PolicyKind::Static(2), PolicyKind::BruteForceOptimal];
    for policy in policies {
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        let bytes: Vec<Vec<u8>> = dirs
            .iter()
            .map(|d| {
                let cfg = ExperimentConfig {
                    env: EnvConfig { episode_len: 40, seed: 77, ..EnvConfig::default() },
                    policy,
                    episodes: 3,
                    seeds: vec![5, 6],
                    output_dir: d.path().to_path_buf(),
                    ..ExperimentConfig::default()
                };
                run_experiment(&cfg).unwrap();
                std::fs::read(d.path().join("summary.csv")).unwrap()
            })
            .collect();
        identical += usize::from(bytes[0] == bytes[1]);
    }
    verdict(
        identical == policies.len(),
        format!("{identical}/{} policies produced byte-identical summary.csv across two runs", policies.len()),
    )
}

fn reliability_is_exact() -> Verdict {
    let spec = ServiceSpec::default();
    let mut w = ReliabilityWindow::new(50);
    let mut clean = true;
    for i in 0..120 {
        w.push(DelaySample::Delay(spec.delay_threshold_ms * (i % 10) as f64 / 10.0));
        let e = w.estimate(&spec);
        clean &= e.rho == 1.0 && e.epsilon_hat == 0.0;
    }
    let mut exact = 0;
    for k in 0..=50usize {
        let mut w = ReliabilityWindow::new(50);
        for i in 0..50 {
            let d = if (i * 7) % 50 < k { 2.0 * spec.delay_threshold_ms } else { 1.0 };
            w.push(DelaySample::Delay(d));
        }
        exact += usize::from(w.estimate(&spec).epsilon_hat == k as f64 / 50.0);
    }
    verdict(
        clean && exact == 51,
        format!("sub-threshold window rho = 1, eps = 0 exactly [{}]; eps = k/W exactly for {exact}/51 values of k (W = 50)", ok(clean)),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

fn main() -> ExitCode {
    // numeric arguments pick criteria, e.g. `cargo test --test acceptance -- 2 3`
    let picked: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let want = |n: usize| picked.is_empty() || picked.contains(&n);
    let (mut ran, mut failures) = (0, 0);
    let mut report = |n: usize, name: &str, v: Verdict| {
        println!("{} criterion {n} ({name}): {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        ran += 1;
        failures += usize::from(!v.pass);
    };
    if want(1) {
        report(1, "brute-force optimum", optimal_matches_exhaustive());
    }
    if want(2) {
        report(2, "resource formulas", formulas_match_oracles());
    }
    if want(3) {
        report(3, "FS trade-off shape", default_table_is_monotone());
    }
    if want(4) {
        report(4, "PPO gradients", gradients_match_finite_differences());
    }
    if want(5) {
        report(5, "turn protocol and feasibility", env_protocol_holds());
    }
    if want(6) || want(7) {
        let (trained, train_time) = train_desk();
        if want(6) {
            report(6, "desk-scale HMARL", desk_scale(&trained, train_time));
        }
        if want(7) {
            report(7, "G_th sweep", g_th_sweep(&trained));
        }
    }
    if want(8) {
        report(8, "reproducibility", summary_is_reproducible());
    }
    if want(9) {
        report(9, "reliability estimator", reliability_is_exact());
    }
    if failures == 0 {
        println!("acceptance: {ran} of 9 criteria run, all pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of {ran} criteria failed");
        ExitCode::FAILURE
    }
}
