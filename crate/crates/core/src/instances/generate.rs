//! Seeded instance generators and dispersion assignment.
//!
//! All randomness comes from [`crate::seeded_rng`]. Draw order: for each item
//! in index order, the generators draw the profit and then the weight
//! (uncorrelated) or just the weight (bounded strongly correlated); random
//! dispersion draws one `delta` per item in index order.

use rand::Rng;

use super::{InstanceError, Item, KnapsackInstance};
use crate::{seeded_rng, Scalar};

pub const DEFAULT_VALUE_RANGE: (u64, u64) = (1, 1000);
pub const DEFAULT_CORRELATION_OFFSET: u64 = 100;
pub const DEFAULT_CAPACITY_RATIO: f64 = 0.5;

fn check_params(n: usize, value_range: (u64, u64), capacity_ratio: f64) -> Result<(), InstanceError> {
    let (lo, hi) = value_range;
    if n == 0 {
        return Err(InstanceError::InvalidParameter("n must be at least 1".into()));
    }
    if lo < 1 || lo > hi {
        return Err(InstanceError::InvalidParameter(format!(
            "value range [{lo}, {hi}] is empty or starts below 1"
        )));
    }
    if !(capacity_ratio > 0.0 && capacity_ratio <= 1.0) {
        return Err(InstanceError::InvalidParameter(format!(
            "capacity ratio must lie in (0, 1], got {capacity_ratio}"
        )));
    }
    Ok(())
}

fn build<T: Scalar>(
    name: String,
    pairs: Vec<(u64, u64)>,
    capacity_ratio: f64,
) -> Result<KnapsackInstance<T>, InstanceError> {
    let total_weight: u64 = pairs.iter().map(|&(_, w)| w).sum();
    let capacity = (capacity_ratio * total_weight as f64).round();
    if capacity < 1.0 {
        return Err(InstanceError::InvalidParameter(format!(
            "capacity ratio {capacity_ratio} rounds the capacity to zero"
        )));
    }
    let items = pairs
        .into_iter()
        .map(|(mu, w)| Item::new(T::of(mu as f64), T::zero(), T::of(w as f64)))
        .collect();
    KnapsackInstance::new(name, items, T::of(capacity))
}

/// Profits and weights independent uniform integers in `value_range`;
/// `B = round(capacity_ratio * sum(w))`. Dispersions start at zero.
pub fn generate_uncorrelated<T: Scalar>(
    n: usize,
    seed: u64,
    value_range: (u64, u64),
    capacity_ratio: f64,
) -> Result<KnapsackInstance<T>, InstanceError> {
    check_params(n, value_range, capacity_ratio)?;
    let (lo, hi) = value_range;
    let mut rng = seeded_rng(seed);
    let pairs = (0..n)
        .map(|_| {
            let mu = rng.random_range(lo..=hi);
            let w = rng.random_range(lo..=hi);
            (mu, w)
        })
        .collect();
    build(format!("gen-uncorr-n{n}-s{seed}"), pairs, capacity_ratio)
}

/// Weights uniform integers in `value_range`, profit `w_i + correlation_offset`.
pub fn generate_bounded_strongly_correlated<T: Scalar>(
    n: usize,
    seed: u64,
    value_range: (u64, u64),
    correlation_offset: u64,
    capacity_ratio: f64,
) -> Result<KnapsackInstance<T>, InstanceError> {
    check_params(n, value_range, capacity_ratio)?;
    let (lo, hi) = value_range;
    let mut rng = seeded_rng(seed);
    let pairs = (0..n)
        .map(|_| {
            let w = rng.random_range(lo..=hi);
            (w + correlation_offset, w)
        })
        .collect();
    build(format!("gen-strong-n{n}-s{seed}"), pairs, capacity_ratio)
}

pub fn assign_uniform_dispersion<T: Scalar>(
    instance: &KnapsackInstance<T>,
    delta: T,
) -> Result<KnapsackInstance<T>, InstanceError> {
    if !(delta.is_finite() && delta >= T::zero()) {
        return Err(InstanceError::InvalidParameter(format!(
            "dispersion must be finite and >= 0, got {delta}"
        )));
    }
    instance.with_deltas(std::iter::repeat_n(delta, instance.len()))
}

/// Each `delta_i` drawn independently and uniformly from `[0, mu_i]`.
pub fn assign_random_dispersion<T: Scalar>(
    instance: &KnapsackInstance<T>,
    seed: u64,
) -> KnapsackInstance<T> {
    let mut rng = seeded_rng(seed);
    let deltas: Vec<T> = instance
        .items()
        .iter()
        .map(|it| rng.random_range(T::zero()..=it.mu))
        .collect();
    instance
        .with_deltas(deltas)
        .expect("deltas in [0, mu] are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_ranges() {
        let inst = generate_uncorrelated::<f64>(1, 7, (5, 5), 1.0).unwrap();
        assert_eq!(inst.items()[0], Item::new(5.0, 0.0, 5.0));
        assert_eq!(inst.capacity(), 5.0);

        let inst = generate_bounded_strongly_correlated::<f64>(1, 7, (10, 10), 100, 1.0).unwrap();
        assert_eq!(inst.items()[0], Item::new(110.0, 0.0, 10.0));
        assert_eq!(inst.capacity(), 10.0);
    }

    #[test]
    fn deterministic_in_seed() {
        let a = generate_uncorrelated::<f64>(50, 3, DEFAULT_VALUE_RANGE, 0.5).unwrap();
        let b = generate_uncorrelated::<f64>(50, 3, DEFAULT_VALUE_RANGE, 0.5).unwrap();
        let c = generate_uncorrelated::<f64>(50, 4, DEFAULT_VALUE_RANGE, 0.5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.items(), c.items());
        let a = generate_bounded_strongly_correlated::<f64>(50, 3, (1, 1000), 100, 0.5).unwrap();
        let b = generate_bounded_strongly_correlated::<f64>(50, 3, (1, 1000), 100, 0.5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn uncorrelated_bounds_by_scan() {
        let inst = generate_uncorrelated::<f64>(100, 11, (1, 1000), 0.5).unwrap();
        let mut total = 0.0;
        for it in inst.items() {
            assert!((1.0..=1000.0).contains(&it.mu) && it.mu.fract() == 0.0);
            assert!((1.0..=1000.0).contains(&it.weight) && it.weight.fract() == 0.0);
            total += it.weight;
        }
        assert_eq!(inst.capacity(), (0.5 * total).round());
    }

    #[test]
    fn strongly_correlated_offset_by_scan() {
        let inst = generate_bounded_strongly_correlated::<f64>(50, 5, (1, 1000), 100, 0.5).unwrap();
        assert!(inst.items().iter().all(|it| it.mu - it.weight == 100.0));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate_uncorrelated::<f64>(0, 1, (1, 10), 0.5).is_err());
        assert!(generate_uncorrelated::<f64>(5, 1, (10, 1), 0.5).is_err());
        assert!(generate_uncorrelated::<f64>(5, 1, (0, 10), 0.5).is_err());
        assert!(generate_uncorrelated::<f64>(5, 1, (1, 10), 0.0).is_err());
        assert!(generate_uncorrelated::<f64>(1, 1, (1, 1), 0.1).is_err());
        let inst = generate_uncorrelated::<f64>(5, 1, (1, 10), 0.5).unwrap();
        assert!(assign_uniform_dispersion(&inst, -1.0).is_err());
    }

    #[test]
    fn uniform_dispersion_variances() {
        let inst = generate_uncorrelated::<f64>(20, 2, (1, 1000), 0.5).unwrap();
        let zero = assign_uniform_dispersion(&inst, 0.0).unwrap();
        assert!(zero.items().iter().all(|it| it.variance() == 0.0));
        for (delta, expected) in [(25.0, 625.0 / 3.0), (50.0, 2500.0 / 3.0)] {
            let d = assign_uniform_dispersion(&inst, delta).unwrap();
            for (a, b) in d.items().iter().zip(inst.items()) {
                assert_eq!((a.mu, a.weight), (b.mu, b.weight));
                assert!((a.variance() - expected).abs() <= 1e-12 * expected);
            }
            let n = inst.len() as f64;
            let rel = |x: f64, y: f64| ((x - y) / y).abs();
            assert!(rel(d.max_variance(), n * delta * delta / 3.0) < 1e-9);
            assert!(rel(d.max_std_dev(), n * delta / 3f64.sqrt()) < 1e-9);
        }
    }

    #[test]
    fn random_dispersion_is_uniform_on_zero_mu() {
        let items = vec![Item::new(100.0, 0.0, 1.0); 10_000];
        let inst = KnapsackInstance::new("mc", items, 1.0).unwrap();
        let d = assign_random_dispersion(&inst, 42);
        assert!(d.items().iter().all(|it| (0.0..=100.0).contains(&it.delta)));
        let mean = d.items().iter().map(|it| it.delta).sum::<f64>() / 10_000.0;
        assert!((mean - 50.0).abs() <= 2.0, "mean {mean}");
        assert_eq!(d, assign_random_dispersion(&inst, 42));
    }

    #[test]
    fn random_dispersion_zero_profit() {
        let inst = KnapsackInstance::new("z", vec![Item::new(0.0, 5.0, 1.0)], 1.0).unwrap();
        assert_eq!(assign_random_dispersion(&inst, 1).items()[0].delta, 0.0);
    }
}
