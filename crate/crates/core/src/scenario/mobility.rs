use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Point, Rect, UserState};

/// Moves one user for one timestep. Implementations must only draw from the
/// supplied rng so that trajectories replay under a fixed seed.
pub trait MobilityModel {
    fn advance<R: Rng + ?Sized>(&self, user: &mut UserState, area: &Rect, dt: f64, rng: &mut R);

    /// Draws a fresh (waypoint, speed) pair.
    fn draw_leg<R: Rng + ?Sized>(&self, area: &Rect, rng: &mut R) -> (Point, f64);
}

/// Random waypoint: straight-line travel at constant speed toward a uniform
/// random point of the area; on arrival a new waypoint and speed are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RandomWaypoint {
    pub v_min: f64,
    pub v_max: f64,
}

impl Default for RandomWaypoint {
    fn default() -> Self {
        Self {
            v_min: 5.0,
            v_max: 20.0,
        }
    }
}

impl MobilityModel for RandomWaypoint {
    fn advance<R: Rng + ?Sized>(&self, user: &mut UserState, area: &Rect, dt: f64, rng: &mut R) {
        let travel = user.speed * dt;
        let remaining = user.position.distance(&user.waypoint);
        if remaining <= travel {
            user.position = user.waypoint;
            let (wp, speed) = self.draw_leg(area, rng);
            user.waypoint = wp;
            user.speed = speed;
        } else {
            let f = travel / remaining;
            user.position = Point::new(
                user.position.x + (user.waypoint.x - user.position.x) * f,
                user.position.y + (user.waypoint.y - user.position.y) * f,
            );
        }
        user.position = area.clamp(user.position);
    }

    fn draw_leg<R: Rng + ?Sized>(&self, area: &Rect, rng: &mut R) -> (Point, f64) {
        let wp = Point::new(
            rng.gen_range(area.min.x..=area.max.x),
            rng.gen_range(area.min.y..=area.max.y),
        );
        let speed = if self.v_max > self.v_min {
            rng.gen_range(self.v_min..self.v_max)
        } else {
            self.v_min
        };
        (wp, speed)
    }
}

pub fn step_mobility<M: MobilityModel, R: Rng + ?Sized>(
    users: &mut [UserState],
    model: &M,
    area: &Rect,
    dt: f64,
    rng: &mut R,
) {
    debug_assert!(dt > 0.0);
    for user in users.iter_mut() {
        model.advance(user, area, dt, rng);
    }
}

#[cfg(test)]
mod tests {
    use std::collections::hash_map::DefaultHasher;
    use std::hash::{Hash, Hasher};

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn user_at(p: Point, wp: Point, speed: f64) -> UserState {
        UserState::new(0, p, wp, speed, 10)
    }

    #[test]
    fn straight_line_step() {
        let area = Rect::new(200.0, 200.0);
        let mut u = user_at(Point::new(0.0, 0.0), Point::new(100.0, 0.0), 10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        RandomWaypoint::default().advance(&mut u, &area, 1.0, &mut rng);
        assert_eq!(u.position, Point::new(10.0, 0.0));
        assert_eq!(u.waypoint, Point::new(100.0, 0.0));
    }

    #[test]
    fn arrival_draws_new_leg_without_moving() {
        let area = Rect::new(200.0, 200.0);
        let start = Point::new(50.0, 50.0);
        let mut u = user_at(start, start, 10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let model = RandomWaypoint::default();
        model.advance(&mut u, &area, 1.0, &mut rng);
        assert_eq!(u.position, start);
        assert_ne!(u.waypoint, start);
        assert!(u.speed >= model.v_min && u.speed < model.v_max);
    }

    fn trajectory_hash(seed: u64) -> u64 {
        let area = Rect::new(1000.0, 500.0);
        let model = RandomWaypoint::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut users: Vec<UserState> = (0..50)
            .map(|i| {
                let (p, _) = model.draw_leg(&area, &mut rng);
                let (wp, v) = model.draw_leg(&area, &mut rng);
                UserState::new(i, p, wp, v, 10)
            })
            .collect();
        let mut h = DefaultHasher::new();
        for _ in 0..300 {
            step_mobility(&mut users, &model, &area, 1.0, &mut rng);
            for u in &users {
                assert!(area.contains(&u.position));
                u.position.x.to_bits().hash(&mut h);
                u.position.y.to_bits().hash(&mut h);
            }
        }
        h.finish()
    }

    #[test]
    fn trajectories_replay_under_fixed_seed() {
        assert_eq!(trajectory_hash(7), trajectory_hash(7));
        assert_ne!(trajectory_hash(7), trajectory_hash(8));
    }
}
