//! Baseline controllers: static splits, uniformly random splits and the
//! per-timestep brute-force optimum.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{HandoverEnv, HighObs, LowObs};
use crate::error::{Error, Result};
use crate::split_model::{FsOption, GroupAssignment, N_FS_OPTIONS, N_MC_CAPABLE};

/// Drives one side of each turn of a [`HandoverEnv`].
pub trait Controller {
    /// FS index for transitional users, 1..=4.
    fn high(&mut self, env: &HandoverEnv, obs: &HighObs) -> Result<u8>;
    /// One FS index per EC, 1..=7.
    fn low(&mut self, env: &HandoverEnv, obs: &[LowObs]) -> Result<Vec<u8>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PolicyKind {
    Static(u8),
    Random,
    BruteForceOptimal,
    Learned,
}

impl FromStr for PolicyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(PolicyKind::Random),
            "optimal" | "brute_force_optimal" => Ok(PolicyKind::BruteForceOptimal),
            "hmarl" | "learned" => Ok(PolicyKind::Learned),
            other => {
                let f = other
                    .strip_prefix("static:")
                    .and_then(|f| f.parse::<u8>().ok())
                    .ok_or_else(|| {
                        Error::config("policy", format!("unknown policy `{other}` (hmarl|static:<f>|random|optimal)"))
                    })?;
                FsOption::new(f).map_err(|_| Error::config("policy", format!("static FS {f} outside 1..=7")))?;
                Ok(PolicyKind::Static(f))
            }
        }
    }
}

impl TryFrom<String> for PolicyKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PolicyKind> for String {
    fn from(p: PolicyKind) -> String {
        p.to_string()
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyKind::Static(x) => write!(f, "static:{x}"),
            PolicyKind::Random => write!(f, "random"),
            PolicyKind::BruteForceOptimal => write!(f, "optimal"),
            PolicyKind::Learned => write!(f, "hmarl"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TurnKind {
    High,
    Low,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TurnAction {
    High(u8),
    Low(Vec<u8>),
}

/// Actions of a static or random baseline. A static split above FS 4 is
/// clamped to 4 on the high turn.
pub fn static_policy_step<R: Rng + ?Sized>(kind: PolicyKind, turn: TurnKind, n_ecs: usize, rng: &mut R) -> Result<TurnAction> {
    match (kind, turn) {
        (PolicyKind::Static(f), TurnKind::High) => {
            let a = if f as usize > N_MC_CAPABLE {
                log::debug!("static FS {f} clamped to {N_MC_CAPABLE} for transitional users");
                N_MC_CAPABLE as u8
            } else {
                f
            };
            Ok(TurnAction::High(a))
        }
        (PolicyKind::Static(f), TurnKind::Low) => Ok(TurnAction::Low(vec![f; n_ecs])),
        (PolicyKind::Random, TurnKind::High) => Ok(TurnAction::High(rng.gen_range(1..=N_MC_CAPABLE as u8))),
        (PolicyKind::Random, TurnKind::Low) => Ok(TurnAction::Low(
            (0..n_ecs).map(|_| rng.gen_range(1..=N_FS_OPTIONS as u8)).collect(),
        )),
        (other, _) => Err(Error::config("policy", format!("{other} is not a static or random policy"))),
    }
}

/// Static or random baseline as a [`Controller`].
#[derive(Debug, Clone)]
pub struct BaselineController {
    kind: PolicyKind,
    rng: ChaCha8Rng,
}

impl BaselineController {
    pub fn new(kind: PolicyKind, seed: u64) -> Result<Self> {
        match kind {
            PolicyKind::Static(_) | PolicyKind::Random => Ok(Self {
                kind,
                rng: ChaCha8Rng::seed_from_u64(seed),
            }),
            other => Err(Error::config("policy", format!("{other} is not a baseline"))),
        }
    }
}

impl Controller for BaselineController {
    fn high(&mut self, env: &HandoverEnv, _obs: &HighObs) -> Result<u8> {
        match static_policy_step(self.kind, TurnKind::High, env.n_ecs(), &mut self.rng)? {
            TurnAction::High(a) => Ok(a),
            TurnAction::Low(_) => unreachable!(),
        }
    }

    fn low(&mut self, env: &HandoverEnv, _obs: &[LowObs]) -> Result<Vec<u8>> {
        match static_policy_step(self.kind, TurnKind::Low, env.n_ecs(), &mut self.rng)? {
            TurnAction::Low(a) => Ok(a),
            TurnAction::High(_) => unreachable!(),
        }
    }
}

/// `{1..4} × {1..7}^n_ecs` in lexicographic order (F_t first, then EC 0, ...).
pub fn enumerate_configs(n_ecs: usize) -> Vec<GroupAssignment> {
    let per_ec = N_FS_OPTIONS.pow(n_ecs as u32);
    let mut out = Vec::with_capacity(N_MC_CAPABLE * per_ec);
    for ft in 1..=N_MC_CAPABLE as u8 {
        for code in 0..per_ec {
            let mut digits = vec![FsOption::new(1).expect("FS 1"); n_ecs];
            let mut rest = code;
            for slot in digits.iter_mut().rev() {
                *slot = FsOption::from_slot(rest % N_FS_OPTIONS).expect("slot < 7");
                rest /= N_FS_OPTIONS;
            }
            out.push(GroupAssignment {
                fs_transitional: FsOption::new(ft).expect("FS 1..=4"),
                fs_non_transitional: digits,
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimalCriterion {
    /// ω_nt·R(U∖T) + ω_t·R(T)
    #[default]
    Objective,
    /// r_CC, i.e. R(T) + Σ r_e
    RewardSum,
}

/// Myopic exhaustive search: scores every assignment on the current
/// timestep and keeps the lexicographically first maximizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BruteForce {
    pub eval_seed: u64,
    pub criterion: OptimalCriterion,
    pub parallel: bool,
}

impl Default for BruteForce {
    fn default() -> Self {
        Self {
            eval_seed: 0x5EED,
            criterion: OptimalCriterion::Objective,
            parallel: true,
        }
    }
}

impl BruteForce {
    fn score(&self, env: &HandoverEnv, a: &GroupAssignment) -> Result<f64> {
        let r = env.evaluate(a, self.eval_seed)?;
        Ok(match self.criterion {
            OptimalCriterion::Objective => r.objective,
            OptimalCriterion::RewardSum => r.high_reward,
        })
    }

    /// Best assignment and its score.
    pub fn solve(&self, env: &HandoverEnv) -> Result<(GroupAssignment, f64)> {
        let candidates = enumerate_configs(env.n_ecs());
        let scores: Vec<f64> = if self.parallel {
            candidates
                .par_iter()
                .map(|a| self.score(env, a))
                .collect::<Result<_>>()?
        } else {
            candidates
                .iter()
                .map(|a| self.score(env, a))
                .collect::<Result<_>>()?
        };
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = i;
            }
        }
        Ok((candidates[best].clone(), scores[best]))
    }
}

pub fn brute_force_optimal(env: &HandoverEnv, solver: &BruteForce) -> Result<GroupAssignment> {
    solver.solve(env).map(|(a, _)| a)
}

/// Brute-force optimum as a [`Controller`]: solves on the high turn and
/// replays the chosen F_nt on the low turn.
#[derive(Debug, Clone, Default)]
pub struct OptimalController {
    pub solver: BruteForce,
    pending: Option<GroupAssignment>,
}

impl OptimalController {
    pub fn new(solver: BruteForce) -> Self {
        Self { solver, pending: None }
    }
}

impl Controller for OptimalController {
    fn high(&mut self, env: &HandoverEnv, _obs: &HighObs) -> Result<u8> {
        let a = brute_force_optimal(env, &self.solver)?;
        let ft = a.fs_transitional.index();
        self.pending = Some(a);
        Ok(ft)
    }

    fn low(&mut self, _env: &HandoverEnv, _obs: &[LowObs]) -> Result<Vec<u8>> {
        let a = self
            .pending
            .take()
            .ok_or_else(|| Error::Protocol("optimal controller asked for low actions before high".into()))?;
        Ok(a.fs_non_transitional.iter().map(|f| f.index()).collect())
    }
}
