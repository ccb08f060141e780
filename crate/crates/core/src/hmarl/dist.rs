use rand::Rng;

use super::net::PolicyParams;
use crate::error::Result;

/// Draws from a categorical distribution by inverse CDF. Returns the action
/// index and the log of its probability.
pub fn sample_action<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> (usize, f64) {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut pick = probs.len() - 1;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            pick = i;
            break;
        }
    }
    // never land on a zero-probability tail entry through rounding
    while probs[pick] == 0.0 && pick > 0 {
        pick -= 1;
    }
    (pick, probs[pick].ln())
}

/// Index of the largest probability; ties go to the lowest index.
pub fn argmax(probs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > probs[best] {
            best = i;
        }
    }
    best
}

/// Mode of the policy at `obs`.
pub fn act_greedy(params: &PolicyParams, obs: &[f64]) -> Result<usize> {
    Ok(argmax(&params.forward(obs)?.probs))
}

/// Shannon entropy in nats.
pub fn entropy(probs: &[f64]) -> f64 {
    -probs.iter().filter(|&&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degenerate_distribution_always_picks_its_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(sample_action(&[1.0, 0.0, 0.0, 0.0], &mut rng), (0, 0.0));
        }
    }

    #[test]
    fn fixed_seed_replays() {
        let probs = [0.1, 0.2, 0.3, 0.4];
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| sample_action(&probs, &mut rng).0).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
    }

    #[test]
    fn empirical_frequencies_track_distribution() {
        let probs = [0.1, 0.45, 0.05, 0.4];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            counts[sample_action(&probs, &mut rng).0] += 1;
        }
        for (c, p) in counts.iter().zip(probs) {
            assert!((*c as f64 / n as f64 - p).abs() < 0.01, "{counts:?}");
        }
    }

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax(&[0.1, 0.7, 0.2]), 1);
        assert_eq!(argmax(&[0.25; 4]), 0);
    }

    #[test]
    fn entropy_of_uniform_is_log_n() {
        assert!((entropy(&[0.25; 4]) - 4f64.ln()).abs() < 1e-12);
        assert_eq!(entropy(&[1.0, 0.0]), 0.0);
    }
}
