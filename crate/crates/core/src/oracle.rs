//! Exhaustive ground truth for small instances.

use std::cmp::Ordering;

use thiserror::Error;

use crate::estimators::{EstimatorError, ProfitBound};
use crate::instances::KnapsackInstance;
use crate::objectives::{Bits, FitnessKind, ObjectivePair, Solution, SolutionStats};
use crate::Scalar;

/// Largest instance the oracle enumerates by default.
pub const MAX_ORACLE_ITEMS: usize = 24;

/// Masks are enumerated in blocks of this many; each block is reduced to its
/// own front before the blocks are merged.
const BLOCK_BITS: usize = 14;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance has {n} items, the oracle enumerates at most {max}")]
    TooManyItems { n: usize, max: usize },
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrontPoint<T> {
    pub objectives: ObjectivePair<T>,
    /// Lexicographically smallest bit string (item 0 first) with this vector.
    pub solution: Solution<T>,
}

/// Exact Pareto front of the feasible solutions, by decreasing first objective.
#[derive(Clone, Debug, PartialEq)]
pub struct ParetoFront<T> {
    pub kind: FitnessKind,
    pub points: Vec<FrontPoint<T>>,
}

impl<T: Scalar> ParetoFront<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn solutions(&self) -> Vec<Solution<T>> {
        self.points.iter().map(|p| p.solution.clone()).collect()
    }

    pub fn contains_vector(&self, objectives: &ObjectivePair<T>) -> bool {
        self.points.iter().any(|p| p.objectives.same_vector(objectives))
    }
}

#[derive(Clone, Copy)]
struct Candidate<T> {
    objectives: ObjectivePair<T>,
    /// Mask with item 0 in the most significant of the `n` bits, so integer
    /// order is lexicographic bit-string order.
    key: u64,
}

fn check_size(n: usize, max: usize) -> Result<(), OracleError> {
    if n > max || n >= 64 {
        return Err(OracleError::TooManyItems { n, max: max.min(63) });
    }
    Ok(())
}

fn stats_of_key<T: Scalar>(instance: &KnapsackInstance<T>, key: u64) -> SolutionStats<T> {
    let n = instance.len();
    SolutionStats::from_indices(instance, (0..n).filter(|&i| key >> (n - 1 - i) & 1 == 1))
}

fn bits_of_key(n: usize, key: u64) -> Bits {
    (0..n).map(|i| key >> (n - 1 - i) & 1 == 1).collect()
}

/// Sorts by decreasing first, increasing second, increasing key and keeps
/// every point strictly better in the second objective than all before it.
fn reduce<T: Scalar>(mut candidates: Vec<Candidate<T>>) -> Vec<Candidate<T>> {
    candidates.sort_by(|a, b| {
        b.objectives
            .first
            .partial_cmp(&a.objectives.first)
            .unwrap_or(Ordering::Equal)
            .then_with(|| {
                a.objectives
                    .second
                    .partial_cmp(&b.objectives.second)
                    .unwrap_or(Ordering::Equal)
            })
            .then_with(|| a.key.cmp(&b.key))
    });
    let mut front: Vec<Candidate<T>> = Vec::new();
    for c in candidates {
        match front.last() {
            Some(last) if c.objectives.second >= last.objectives.second => {}
            _ => front.push(c),
        }
    }
    front
}

/// Non-dominated feasible solutions under `kind`, one per objective vector.
pub fn enumerate_pareto_front<T: Scalar>(
    instance: &KnapsackInstance<T>,
    kind: FitnessKind,
) -> Result<ParetoFront<T>, OracleError> {
    enumerate_pareto_front_up_to(instance, kind, MAX_ORACLE_ITEMS)
}

/// [`enumerate_pareto_front`] with a caller-chosen size limit.
pub fn enumerate_pareto_front_up_to<T: Scalar>(
    instance: &KnapsackInstance<T>,
    kind: FitnessKind,
    max_items: usize,
) -> Result<ParetoFront<T>, OracleError> {
    let n = instance.len();
    check_size(n, max_items)?;
    let total = 1u64 << n;
    let block = 1u64 << BLOCK_BITS.min(n);
    let capacity = instance.capacity();
    let mut merged: Vec<Candidate<T>> = Vec::new();
    let mut start = 0;
    while start < total {
        let mut candidates = merged;
        for key in start..start + block {
            let stats = stats_of_key(instance, key);
            if stats.is_feasible(capacity) {
                candidates.push(Candidate {
                    objectives: kind.evaluate(instance, &stats),
                    key,
                });
            }
        }
        merged = reduce(candidates);
        start += block;
    }
    let points = merged
        .into_iter()
        .map(|c| FrontPoint {
            objectives: c.objectives,
            solution: Solution::new(instance, bits_of_key(n, c.key)).expect("length matches"),
        })
        .collect();
    Ok(ParetoFront { kind, points })
}

/// Highest estimate over every feasible bit string.
pub fn oracle_best_profit<T: Scalar>(
    instance: &KnapsackInstance<T>,
    bound: &ProfitBound<T>,
    alpha: T,
) -> Result<T, OracleError> {
    oracle_best_profit_up_to(instance, bound, alpha, MAX_ORACLE_ITEMS)
}

pub fn oracle_best_profit_up_to<T: Scalar>(
    instance: &KnapsackInstance<T>,
    bound: &ProfitBound<T>,
    alpha: T,
    max_items: usize,
) -> Result<T, OracleError> {
    let n = instance.len();
    check_size(n, max_items)?;
    let capacity = instance.capacity();
    let mut best = bound.profit(&SolutionStats::default(), alpha)?;
    for key in 1..1u64 << n {
        let stats = stats_of_key(instance, key);
        if stats.is_feasible(capacity) {
            let profit = bound.profit(&stats, alpha)?;
            if profit > best {
                best = profit;
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::Item;

    fn inst(items: &[(f64, f64, f64)], capacity: f64) -> KnapsackInstance<f64> {
        let items = items.iter().map(|&(m, d, w)| Item::new(m, d, w)).collect();
        KnapsackInstance::new("t", items, capacity).unwrap()
    }

    fn vectors(front: &ParetoFront<f64>) -> Vec<(f64, f64)> {
        front.points.iter().map(|p| (p.objectives.first, p.objectives.second)).collect()
    }

    #[test]
    fn one_item_front() {
        let i = inst(&[(5.0, 3.0, 1.0)], 1.0);
        let front = enumerate_pareto_front(&i, FitnessKind::G).unwrap();
        assert_eq!(vectors(&front), vec![(5.0, 3.0), (0.0, 0.0)]);
        assert_eq!(front.points[0].solution.bit_string(), "1");
    }

    #[test]
    fn two_item_front() {
        let i = inst(&[(10.0, 3.0, 2.0), (4.0, 3.0, 5.0)], 6.0);
        let front = enumerate_pareto_front(&i, FitnessKind::G).unwrap();
        assert_eq!(vectors(&front), vec![(10.0, 3.0), (0.0, 0.0)]);
        let cheb = oracle_best_profit(&i, &ProfitBound::Chebyshev, 0.5).unwrap();
        assert!((cheb - (10.0 - 3f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn canonical_bits_are_lexicographically_smallest() {
        let i = inst(&[(2.0, 1.0, 1.0), (2.0, 1.0, 1.0), (2.0, 1.0, 1.0)], 3.0);
        let front = enumerate_pareto_front(&i, FitnessKind::G).unwrap();
        let bits: Vec<String> = front.points.iter().map(|p| p.solution.bit_string()).collect();
        assert_eq!(bits, vec!["111", "011", "001", "000"]);
    }

    #[test]
    fn zero_dispersion_is_plain_knapsack() {
        let i = inst(&[(6.0, 0.0, 3.0), (5.0, 0.0, 2.0), (5.0, 0.0, 2.0), (1.0, 0.0, 1.0)], 4.0);
        let best = oracle_best_profit(&i, &ProfitBound::Chebyshev, 0.01).unwrap();
        assert_eq!(best, 10.0);
    }

    #[test]
    fn block_merge_matches_single_block() {
        let items: Vec<(f64, f64, f64)> = (0..16)
            .map(|k| (1.0 + (k * 37 % 23) as f64, (k % 5) as f64, 1.0 + (k * 11 % 7) as f64))
            .collect();
        let i = inst(&items, 20.0);
        let front = enumerate_pareto_front(&i, FitnessKind::G).unwrap();
        let mut all = Vec::new();
        for key in 0..1u64 << 16 {
            let stats = stats_of_key(&i, key);
            if stats.is_feasible(20.0) {
                all.push(Candidate { objectives: FitnessKind::G.evaluate(&i, &stats), key });
            }
        }
        let direct: Vec<u64> = reduce(all).iter().map(|c| c.key).collect();
        let merged: Vec<u64> = front
            .points
            .iter()
            .map(|p| p.solution.bits().iter().fold(0, |acc, b| acc << 1 | *b as u64))
            .collect();
        assert_eq!(direct, merged);
    }

    #[test]
    fn too_many_items() {
        let items = vec![(1.0, 0.0, 1.0); 25];
        let i = inst(&items, 3.0);
        assert_eq!(
            enumerate_pareto_front(&i, FitnessKind::G).unwrap_err(),
            OracleError::TooManyItems { n: 25, max: 24 }
        );
        assert!(oracle_best_profit(&i, &ProfitBound::Chebyshev, 0.1).is_err());
    }
}
