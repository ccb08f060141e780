//! The discrete-time, two-turn environment.
//!
//! Each timestep the central cloud moves first ([`HandoverEnv::step_high`]),
//! choosing F_t for every transitional user, and every EC then answers with
//! its own F_nt ([`HandoverEnv::step_low`]). The low turn charges resources,
//! records violations, drops users until the budgets hold, scores delays and
//! then moves users and re-clusters them for the next timestep.

mod config;
mod drop;
mod obs;
mod reward;

pub use config::{EnvConfig, ObsScales, MIDHAUL_PER_EC_MBPS};
pub use drop::{drop_to_feasibility, Budget, Membership};
pub use obs::{HighObs, LowObs, HIGH_OBS_DIM, LOW_OBS_DIM};
pub use reward::{compute_reward_high, compute_reward_low};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qos::{continuity_ratio, e2e_delay, objective_value, DelaySample, ServiceSpec};
use crate::scenario::{
    build_topology, classify_transitional, cluster_ecs, compute_sinr, form_clusters, step_mobility,
    MobilityModel, NetworkTopology, Point, UserState, UserStatus,
};
use crate::split_model::{
    check_constraints, FsOption, GroupAssignment, GroupCounts, ResourceLedger, ViolationReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Turn {
    High,
    Low,
    Done,
}

/// Everything that happened in one completed timestep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub timestep: usize,
    pub assignment: GroupAssignment,
    /// r_e per EC.
    pub low_rewards: Vec<f64>,
    /// r_CC
    pub high_reward: f64,
    pub dropped: Vec<usize>,
    /// Flags of the chosen assignment before any user was dropped.
    pub violations: ViolationReport,
    pub ledger_pre_drop: ResourceLedger,
    pub ledger_post_drop: ResourceLedger,
    /// R(T)
    pub r_transitional: f64,
    /// R(U∖T)
    pub r_non_transitional: f64,
    /// R(U)
    pub r_all: f64,
    pub objective: f64,
    pub n_connected: usize,
    pub n_disconnected: usize,
    pub n_transitional: usize,
    pub done: bool,
}

impl StepOutcome {
    pub fn n_dropped(&self) -> usize {
        self.dropped.len()
    }
}

/// Result of applying an assignment to the current timestep without
/// committing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolution {
    pub assignment: GroupAssignment,
    pub violations: ViolationReport,
    pub ledger_pre_drop: ResourceLedger,
    pub ledger_post_drop: ResourceLedger,
    pub dropped: Vec<usize>,
    pub samples: Vec<DelaySample>,
    pub low_rewards: Vec<f64>,
    pub high_reward: f64,
    pub r_transitional: f64,
    pub r_non_transitional: f64,
    pub r_all: f64,
    pub objective: f64,
}

pub(crate) fn derive_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct HandoverEnv {
    cfg: EnvConfig,
    topology: NetworkTopology,
    users: Vec<UserState>,
    /// ECs serving each user this timestep.
    user_ecs: Vec<Vec<usize>>,
    timestep: usize,
    turn: Turn,
    fs_transitional: Option<FsOption>,
    prev_fs_nt: Vec<FsOption>,
    mobility_rng: ChaCha8Rng,
    drop_rng: ChaCha8Rng,
}

impl HandoverEnv {
    /// Builds the network, places users and forms the first clusters.
    pub fn reset(cfg: EnvConfig) -> Result<(Self, HighObs)> {
        cfg.validate()?;
        let topology = build_topology(&cfg.topology)?;
        let mut mobility_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 1));
        let drop_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 2));
        let area = topology.area;
        let users = (0..cfg.n_users)
            .map(|id| {
                let start = Point::new(
                    mobility_rng.gen_range(area.min.x..=area.max.x),
                    mobility_rng.gen_range(area.min.y..=area.max.y),
                );
                let (wp, speed) = cfg.mobility.draw_leg(&area, &mut mobility_rng);
                let mut u = UserState::new(id, start, wp, speed, cfg.delay.reliability_window);
                u.service_id = id % cfg.services.len();
                u
            })
            .collect();
        let n_ecs = cfg.n_ecs();
        let default_fs = FsOption::new(3).expect("FS 3 exists");
        let mut env = Self {
            cfg,
            topology,
            users,
            user_ecs: Vec::new(),
            timestep: 0,
            turn: Turn::High,
            fs_transitional: None,
            prev_fs_nt: vec![default_fs; n_ecs],
            mobility_rng,
            drop_rng,
        };
        env.recluster()?;
        let obs = env.high_obs();
        Ok((env, obs))
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn topology(&self) -> &NetworkTopology {
        &self.topology
    }

    pub fn users(&self) -> &[UserState] {
        &self.users
    }

    pub fn user_ecs(&self) -> &[Vec<usize>] {
        &self.user_ecs
    }

    pub fn timestep(&self) -> usize {
        self.timestep
    }

    pub fn turn(&self) -> Turn {
        self.turn
    }

    pub fn n_ecs(&self) -> usize {
        self.topology.n_ecs()
    }

    pub fn is_done(&self) -> bool {
        self.turn == Turn::Done
    }

    /// Reseeds the drop-selection stream only; mobility is untouched.
    pub fn set_drop_seed(&mut self, seed: u64) {
        self.drop_rng = ChaCha8Rng::seed_from_u64(seed);
    }

    fn service(&self, user: &UserState) -> &ServiceSpec {
        &self.cfg.services[user.service_id % self.cfg.services.len()]
    }

    /// D^{k,t}_min over the services in use.
    fn d_min(&self) -> f64 {
        let in_use = self.users.iter().map(|u| self.service(u).delay_threshold_ms);
        let fallback = self.cfg.services.iter().map(|s| s.delay_threshold_ms);
        let m = in_use.fold(f64::INFINITY, f64::min);
        if m.is_finite() {
            m
        } else {
            fallback.fold(f64::INFINITY, f64::min)
        }
    }

    fn connected(&self) -> Vec<bool> {
        self.users.iter().map(UserState::is_connected).collect()
    }

    fn budget(&self) -> Budget {
        Budget {
            g_th: self.cfg.g_th,
            m_th: self.cfg.m_th(),
            share_cell_pfs: self.cfg.share_cell_pfs,
        }
    }

    /// Re-clusters every user and refreshes transitional flags and status.
    /// Dropping lasts one timestep; disconnection is re-evaluated here.
    fn recluster(&mut self) -> Result<()> {
        let clusters = form_clusters(&self.users, &self.topology, self.cfg.k_min)?;
        self.user_ecs.clear();
        for (user, c) in self.users.iter_mut().zip(clusters) {
            let ecs = cluster_ecs(&c.ap_ids, &self.topology)?;
            user.transitional = classify_transitional(&c.ap_ids, &self.topology)?;
            let best = self.topology.ap(c.ap_ids[0])?;
            let sinr = compute_sinr(&user.position, best, &self.cfg.radio);
            user.status = if c.complete_reconfiguration || sinr < self.cfg.radio.sinr_threshold_db {
                UserStatus::Disconnected
            } else {
                UserStatus::Connected
            };
            user.cluster = c.ap_ids;
            self.user_ecs.push(ecs);
        }
        Ok(())
    }

    /// user-AP connections of connected users, per AP
    fn ap_loads(&self) -> Vec<usize> {
        let mut load = vec![0usize; self.topology.n_aps()];
        for u in self.users.iter().filter(|u| u.is_connected()) {
            for &ap in &u.cluster {
                load[ap] += 1;
            }
        }
        load
    }

    pub fn high_obs(&self) -> HighObs {
        let load = self.ap_loads();
        let mut serves_t = vec![false; self.topology.n_aps()];
        let mut n_transitional = 0;
        for u in self.users.iter().filter(|u| u.is_connected() && u.transitional) {
            n_transitional += 1;
            for &ap in &u.cluster {
                serves_t[ap] = true;
            }
        }
        let (aps, conns) = serves_t
            .iter()
            .zip(&load)
            .filter(|(s, _)| **s)
            .fold((0usize, 0usize), |(a, c), (_, l)| (a + 1, c + l));
        HighObs {
            n_transitional,
            d_min: self.d_min(),
            mean_load_transitional: if aps == 0 { 0.0 } else { conns as f64 / aps as f64 },
        }
    }

    fn counts(&self, served: &[bool]) -> Vec<GroupCounts> {
        let transitional: Vec<bool> = self.users.iter().map(|u| u.transitional).collect();
        Membership {
            user_ecs: &self.user_ecs,
            transitional: &transitional,
        }
        .counts(served, self.n_ecs())
    }

    fn low_obs(&self, fs_t: FsOption) -> Vec<LowObs> {
        let connected = self.connected();
        let counts = self.counts(&connected);
        let snapshot = GroupAssignment {
            fs_transitional: fs_t,
            fs_non_transitional: self.prev_fs_nt.clone(),
        };
        let ledger = self
            .budget()
            .ledger(&snapshot, &self.topology, &self.cfg.fs_table, &counts);
        let load = self.ap_loads();
        let d_min = self.d_min();
        self.topology
            .ecs
            .iter()
            .map(|ec| {
                let conns: usize = ec.ap_ids.iter().map(|&a| load[a]).sum();
                LowObs {
                    ec: ec.id,
                    n_users_ec: counts[ec.id].total(),
                    d_min,
                    mean_ap_load: conns as f64 / ec.ap_ids.len() as f64,
                    gops_tot: ledger.gops_total(ec.id),
                    midhaul_ec: ledger.midhaul_ec(ec.id),
                    midhaul_tot: ledger.midhaul_total,
                    a_cc: fs_t.index(),
                }
            })
            .collect()
    }

    /// High turn: fixes F_t and returns each EC's observation.
    pub fn step_high(&mut self, a_cc: u8) -> Result<Vec<LowObs>> {
        match self.turn {
            Turn::High => {}
            Turn::Low => return Err(Error::Protocol("expected the low-level turn".into())),
            Turn::Done => return Err(Error::Protocol("episode is finished; reset first".into())),
        }
        let fs_t = FsOption::transitional(a_cc)?;
        self.fs_transitional = Some(fs_t);
        self.turn = Turn::Low;
        Ok(self.low_obs(fs_t))
    }

    /// Applies `assignment` to the current timestep using `rng` for drop
    /// selection, without changing the environment.
    pub fn resolve<R: Rng + ?Sized>(&self, assignment: &GroupAssignment, rng: &mut R) -> Result<Resolution> {
        if assignment.fs_non_transitional.len() != self.n_ecs() {
            return Err(Error::Action(format!(
                "expected {} low-level actions, got {}",
                self.n_ecs(),
                assignment.fs_non_transitional.len()
            )));
        }
        let table = &self.cfg.fs_table;
        let budget = self.budget();
        let n_ecs = self.n_ecs();
        let transitional: Vec<bool> = self.users.iter().map(|u| u.transitional).collect();
        let members = Membership {
            user_ecs: &self.user_ecs,
            transitional: &transitional,
        };

        let connected = self.connected();
        let pre_counts = members.counts(&connected, n_ecs);
        let ledger_pre_drop = budget.ledger(assignment, &self.topology, table, &pre_counts);
        let violations = check_constraints(&ledger_pre_drop, budget.g_th, budget.m_th);

        let mut served = connected.clone();
        let dropped = drop_to_feasibility(assignment, &self.topology, table, members, &mut served, budget, rng);
        let ledger_post_drop = budget.ledger(assignment, &self.topology, table, &members.counts(&served, n_ecs));

        let mut samples = Vec::with_capacity(self.users.len());
        for (u, user) in self.users.iter().enumerate() {
            if served[u] {
                let d = e2e_delay(
                    user,
                    assignment,
                    &ledger_post_drop,
                    &self.topology,
                    table,
                    &self.cfg.delay,
                    budget.g_th,
                )?;
                samples.push(DelaySample::Delay(d.total));
            } else {
                samples.push(DelaySample::Outage);
            }
        }

        let low_rewards: Vec<f64> = (0..n_ecs)
            .map(|e| {
                let in_ec = |u: usize| self.user_ecs[u].contains(&e);
                let n_pre = (0..self.users.len()).filter(|&u| connected[u] && in_ec(u)).count();
                let n_dropped = dropped.iter().filter(|&&u| in_ec(u)).count();
                let delays = (0..self.users.len())
                    .filter(|&u| served[u] && in_ec(u))
                    .filter_map(|u| match samples[u] {
                        DelaySample::Delay(d) => Some((d, self.service(&self.users[u]).delay_threshold_ms)),
                        DelaySample::Outage => None,
                    });
                compute_reward_low(n_pre, delays, n_dropped, self.cfg.drop_penalty)
            })
            .collect();

        let eps: Vec<(bool, f64, f64)> = self
            .users
            .iter()
            .zip(&samples)
            .map(|(user, s)| {
                let spec = self.service(user);
                let est = user.delay_history.estimate_with(*s, spec);
                (user.transitional, est.epsilon_hat, spec.outage_threshold)
            })
            .collect();
        let r_transitional = continuity_ratio(eps.iter().filter(|e| e.0).map(|e| (e.1, e.2)));
        let r_non_transitional = continuity_ratio(eps.iter().filter(|e| !e.0).map(|e| (e.1, e.2)));
        let r_all = continuity_ratio(eps.iter().map(|e| (e.1, e.2)));
        let objective = objective_value(
            r_non_transitional,
            r_transitional,
            self.cfg.weight_non_transitional,
            self.cfg.weight_transitional,
        );
        let high_reward = compute_reward_high(r_transitional, &low_rewards);

        Ok(Resolution {
            assignment: assignment.clone(),
            violations,
            ledger_pre_drop,
            ledger_post_drop,
            dropped,
            samples,
            low_rewards,
            high_reward,
            r_transitional,
            r_non_transitional,
            r_all,
            objective,
        })
    }

    /// Evaluate-without-commit with a dedicated drop seed.
    pub fn evaluate(&self, assignment: &GroupAssignment, drop_seed: u64) -> Result<Resolution> {
        let mut rng = ChaCha8Rng::seed_from_u64(drop_seed);
        self.resolve(assignment, &mut rng)
    }

    /// Low turn: applies F_t and the per-EC F_nt, scores the timestep and
    /// advances to the next one.
    pub fn step_low(&mut self, actions: &[u8]) -> Result<StepOutcome> {
        match self.turn {
            Turn::Low => {}
            Turn::High => return Err(Error::Protocol("expected the high-level turn".into())),
            Turn::Done => return Err(Error::Protocol("episode is finished; reset first".into())),
        }
        if actions.len() != self.n_ecs() {
            return Err(Error::Action(format!(
                "expected {} low-level actions, got {}",
                self.n_ecs(),
                actions.len()
            )));
        }
        let fs_nt = actions.iter().map(|&a| FsOption::new(a)).collect::<Result<Vec<_>>>()?;
        let fs_t = self
            .fs_transitional
            .ok_or_else(|| Error::Protocol("no transitional split recorded".into()))?;
        let assignment = GroupAssignment::new(fs_t, fs_nt)?;

        let mut rng = std::mem::replace(&mut self.drop_rng, ChaCha8Rng::seed_from_u64(0));
        let res = self.resolve(&assignment, &mut rng);
        self.drop_rng = rng;
        let res = res?;

        let n_connected = self.users.iter().filter(|u| u.is_connected()).count() - res.dropped.len();
        let n_disconnected = self
            .users
            .iter()
            .filter(|u| u.status == UserStatus::Disconnected)
            .count();
        let n_transitional = self.users.iter().filter(|u| u.transitional).count();
        for (user, s) in self.users.iter_mut().zip(&res.samples) {
            user.delay_history.push(*s);
        }
        for &u in &res.dropped {
            self.users[u].status = UserStatus::Dropped;
        }
        self.prev_fs_nt = assignment.fs_non_transitional.clone();
        self.fs_transitional = None;

        let timestep = self.timestep;
        self.timestep += 1;
        let done = self.timestep >= self.cfg.episode_len;
        if done {
            self.turn = Turn::Done;
        } else {
            let area = self.topology.area;
            step_mobility(&mut self.users, &self.cfg.mobility, &area, self.cfg.dt_s, &mut self.mobility_rng);
            self.recluster()?;
            self.turn = Turn::High;
        }

        Ok(StepOutcome {
            timestep,
            assignment,
            low_rewards: res.low_rewards,
            high_reward: res.high_reward,
            dropped: res.dropped,
            violations: res.violations,
            ledger_pre_drop: res.ledger_pre_drop,
            ledger_post_drop: res.ledger_post_drop,
            r_transitional: res.r_transitional,
            r_non_transitional: res.r_non_transitional,
            r_all: res.r_all,
            objective: res.objective,
            n_connected,
            n_disconnected,
            n_transitional,
            done,
        })
    }
}
