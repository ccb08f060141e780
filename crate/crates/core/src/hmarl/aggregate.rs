use super::net::PolicyParams;
use crate::error::{Error, Result};

/// Element-wise mean of per-EC copies of the shared low-level policy, as
/// computed by the central cloud before it redistributes the result.
pub fn aggregate_shared_policy(copies: &[PolicyParams]) -> Result<PolicyParams> {
    let first = copies.first().ok_or(Error::EmptyInput("policy copies"))?;
    if let Some(bad) = copies.iter().position(|c| !c.same_shape(first)) {
        return Err(Error::Contract(format!("policy copy {bad} differs in shape from copy 0")));
    }
    let k = copies.len() as f64;
    let mut out = first.clone();
    // mean of offsets from copy 0, so identical copies come back unchanged
    for (i, w) in out.as_mut_slice().iter_mut().enumerate() {
        let base = *w;
        *w = base + copies.iter().map(|c| c.as_slice()[i] - base).sum::<f64>() / k;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn net(seed: u64) -> PolicyParams {
        PolicyParams::init(7, 8, 7, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn identical_copies_are_a_fixed_point() {
        let p = net(1);
        assert_eq!(aggregate_shared_policy(&[p.clone(), p.clone(), p.clone()]).unwrap(), p);
    }

    #[test]
    fn opposite_copies_cancel() {
        let p = net(2);
        let mut q = p.clone();
        q.as_mut_slice().iter_mut().for_each(|w| *w = -*w);
        let m = aggregate_shared_policy(&[p, q]).unwrap();
        assert!(m.as_slice().iter().all(|&w| w == 0.0));
    }

    #[test]
    fn order_of_ecs_does_not_matter() {
        let (a, b, c) = (net(3), net(4), net(5));
        let x = aggregate_shared_policy(&[a.clone(), b.clone(), c.clone()]).unwrap();
        let y = aggregate_shared_policy(&[c, a, b]).unwrap();
        for (u, v) in x.as_slice().iter().zip(y.as_slice()) {
            assert!((u - v).abs() < 1e-15);
        }
    }

    #[test]
    fn shape_mismatch_and_empty_input_are_rejected() {
        let a = net(1);
        let b = PolicyParams::init(7, 4, 7, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(matches!(aggregate_shared_policy(&[a, b]), Err(Error::Contract(_))));
        assert!(matches!(aggregate_shared_policy(&[]), Err(Error::EmptyInput(_))));
    }
}
