/// r_e: share of the EC's pre-drop users meeting their delay budget, minus
/// `drop_penalty` per dropped user. `delays` holds `(D_u, D_th^k)` for the
/// users that were served; dropped users contribute nothing to the sum.
/// An EC with no users scores 0.
pub fn compute_reward_low<I>(n_users_pre_drop: usize, delays: I, n_dropped: usize, drop_penalty: f64) -> f64
where
    I: IntoIterator<Item = (f64, f64)>,
{
    if n_users_pre_drop == 0 {
        return 0.0;
    }
    let met = delays.into_iter().filter(|(d, th)| d < th).count();
    met as f64 / n_users_pre_drop as f64 - n_dropped as f64 * drop_penalty
}

/// r_CC = R(T) + Σ_e r_e
pub fn compute_reward_high(r_transitional: f64, low_rewards: &[f64]) -> f64 {
    r_transitional + low_rewards.iter().sum::<f64>()
}
