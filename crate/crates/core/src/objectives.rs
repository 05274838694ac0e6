//! Solutions, their aggregate statistics, the three bi-objective fitness
//! functions and Pareto dominance.
//!
//! Every fitness pair is `(first, second)` with `first` maximized and
//! `second` minimized. Infeasible solutions (`w(x) > B`) are mapped to
//! `(B - w(x), worst_second + (w(x) - B))`, which every feasible solution
//! strongly dominates.

use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;
use thiserror::Error;

use crate::instances::KnapsackInstance;
use crate::Scalar;

/// Bit string over the items; bit `i` set means item `i` is packed.
pub type Bits = BitVec<u64, Lsb0>;

#[derive(Debug, Error, PartialEq)]
pub enum ObjectiveError {
    #[error("bit string has length {got}, instance has {expected} items")]
    LengthMismatch { expected: usize, got: usize },
    #[error("cannot compare objective pairs of kinds {0} and {1}")]
    KindMismatch(FitnessKind, FitnessKind),
}

/// Sums over the selected items. Always accumulated in ascending item order,
/// so equal bit strings produce bit-identical statistics on every code path.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolutionStats<T> {
    pub mu: T,
    pub variance: T,
    pub weight: T,
    pub count: usize,
}

impl<T: Scalar> SolutionStats<T> {
    /// Stats of the items yielded by `selected`, which must be ascending.
    pub fn from_indices(
        instance: &KnapsackInstance<T>,
        selected: impl IntoIterator<Item = usize>,
    ) -> Self {
        let items = instance.items();
        let mut stats = Self {
            mu: T::zero(),
            variance: T::zero(),
            weight: T::zero(),
            count: 0,
        };
        for i in selected {
            let it = &items[i];
            stats.mu = stats.mu + it.mu;
            stats.variance = stats.variance + it.variance();
            stats.weight = stats.weight + it.weight;
            stats.count += 1;
        }
        stats
    }

    pub fn std_dev(&self) -> T {
        self.variance.sqrt()
    }

    pub fn is_feasible(&self, capacity: T) -> bool {
        self.weight <= capacity
    }
}

pub fn solution_stats<T: Scalar>(
    instance: &KnapsackInstance<T>,
    bits: &BitSlice<u64, Lsb0>,
) -> Result<SolutionStats<T>, ObjectiveError> {
    if bits.len() != instance.len() {
        return Err(ObjectiveError::LengthMismatch {
            expected: instance.len(),
            got: bits.len(),
        });
    }
    Ok(SolutionStats::from_indices(instance, bits.iter_ones()))
}

/// A bit string together with its cached statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution<T> {
    bits: Bits,
    stats: SolutionStats<T>,
}

impl<T: Scalar> Solution<T> {
    pub fn new(instance: &KnapsackInstance<T>, bits: Bits) -> Result<Self, ObjectiveError> {
        let stats = solution_stats(instance, &bits)?;
        Ok(Self { bits, stats })
    }

    pub fn empty(instance: &KnapsackInstance<T>) -> Self {
        Self {
            bits: bitvec![u64, Lsb0; 0; instance.len()],
            stats: SolutionStats::default(),
        }
    }

    pub fn from_bools(instance: &KnapsackInstance<T>, bits: &[bool]) -> Result<Self, ObjectiveError> {
        Self::new(instance, bits.iter().copied().collect())
    }

    /// Copy of `self` with the given positions flipped. Statistics are
    /// recomputed from the resulting bit string.
    pub fn with_flips(&self, instance: &KnapsackInstance<T>, positions: &[usize]) -> Self {
        let mut bits = self.bits.clone();
        for &p in positions {
            let old = bits[p];
            bits.set(p, !old);
        }
        let stats = SolutionStats::from_indices(instance, bits.iter_ones());
        Self { bits, stats }
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn stats(&self) -> &SolutionStats<T> {
        &self.stats
    }

    pub fn is_feasible(&self, instance: &KnapsackInstance<T>) -> bool {
        self.stats.is_feasible(instance.capacity())
    }

    /// Re-evaluates the same bit string against another instance with the
    /// same number of items (e.g. after a dispersion change).
    pub fn reevaluate(&self, instance: &KnapsackInstance<T>) -> Result<Self, ObjectiveError> {
        Self::new(instance, self.bits.clone())
    }

    /// Bit string as `0`/`1` characters, item 0 first.
    pub fn bit_string(&self) -> String {
        self.bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
    }
}

/// Which second objective the fitness uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FitnessKind {
    /// `(mu, variance)`.
    G,
    /// `(mu, standard deviation)`.
    GPrime,
    /// `(mu, item count)`; meaningful when all items share one dispersion.
    GDoublePrime,
}

impl FitnessKind {
    pub const ALL: [FitnessKind; 3] = [FitnessKind::G, FitnessKind::GPrime, FitnessKind::GDoublePrime];

    pub fn as_str(self) -> &'static str {
        match self {
            FitnessKind::G => "g",
            FitnessKind::GPrime => "g_prime",
            FitnessKind::GDoublePrime => "g_double_prime",
        }
    }

    pub fn evaluate<T: Scalar>(
        self,
        instance: &KnapsackInstance<T>,
        stats: &SolutionStats<T>,
    ) -> ObjectivePair<T> {
        let capacity = instance.capacity();
        let (first, second) = if stats.weight <= capacity {
            let second = match self {
                FitnessKind::G => stats.variance,
                FitnessKind::GPrime => stats.variance.sqrt(),
                FitnessKind::GDoublePrime => T::of_usize(stats.count),
            };
            (stats.mu, second)
        } else {
            let excess = stats.weight - capacity;
            let worst = match self {
                FitnessKind::G => instance.max_variance(),
                FitnessKind::GPrime => instance.max_std_dev(),
                FitnessKind::GDoublePrime => T::of_usize(instance.len()),
            };
            (capacity - stats.weight, worst + excess)
        };
        ObjectivePair {
            first,
            second,
            kind: self,
        }
    }
}

impl fmt::Display for FitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FitnessKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "g" => Ok(FitnessKind::G),
            "g_prime" | "gprime" | "g'" => Ok(FitnessKind::GPrime),
            "g_double_prime" | "gdoubleprime" | "g''" => Ok(FitnessKind::GDoublePrime),
            _ => Err(format!("unknown fitness kind {s:?} (expected g, g_prime or g_double_prime)")),
        }
    }
}

pub fn eval_g<T: Scalar>(instance: &KnapsackInstance<T>, solution: &Solution<T>) -> ObjectivePair<T> {
    FitnessKind::G.evaluate(instance, solution.stats())
}

pub fn eval_g_prime<T: Scalar>(
    instance: &KnapsackInstance<T>,
    solution: &Solution<T>,
) -> ObjectivePair<T> {
    FitnessKind::GPrime.evaluate(instance, solution.stats())
}

pub fn eval_g_double_prime<T: Scalar>(
    instance: &KnapsackInstance<T>,
    solution: &Solution<T>,
) -> ObjectivePair<T> {
    FitnessKind::GDoublePrime.evaluate(instance, solution.stats())
}

/// Outcome of comparing `a` against `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dominance {
    /// `a` is strictly better in at least one objective and no worse in the other.
    Strong,
    /// `a` equals `b` in both objectives.
    Weak,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjectivePair<T> {
    /// Maximized.
    pub first: T,
    /// Minimized.
    pub second: T,
    pub kind: FitnessKind,
}

impl<T: Scalar> ObjectivePair<T> {
    pub fn new(first: T, second: T, kind: FitnessKind) -> Self {
        Self { first, second, kind }
    }

    /// `self` is at least as good as `other` in both objectives. Exact comparisons.
    #[inline]
    pub fn weakly_dominates(&self, other: &Self) -> bool {
        debug_assert_eq!(self.kind, other.kind);
        self.first >= other.first && self.second <= other.second
    }

    #[inline]
    pub fn strongly_dominates(&self, other: &Self) -> bool {
        self.weakly_dominates(other) && (self.first > other.first || self.second < other.second)
    }

    pub fn same_vector(&self, other: &Self) -> bool {
        self.first == other.first && self.second == other.second
    }
}

pub fn dominates<T: Scalar>(
    a: &ObjectivePair<T>,
    b: &ObjectivePair<T>,
) -> Result<Dominance, ObjectiveError> {
    if a.kind != b.kind {
        return Err(ObjectiveError::KindMismatch(a.kind, b.kind));
    }
    Ok(if a.strongly_dominates(b) {
        Dominance::Strong
    } else if a.weakly_dominates(b) {
        Dominance::Weak
    } else {
        Dominance::None
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::Item;

    fn two_items(capacity: f64) -> KnapsackInstance<f64> {
        KnapsackInstance::new(
            "two",
            vec![Item::new(10.0, 3.0, 2.0), Item::new(4.0, 3.0, 5.0)],
            capacity,
        )
        .unwrap()
    }

    fn sol(inst: &KnapsackInstance<f64>, bits: &[bool]) -> Solution<f64> {
        Solution::from_bools(inst, bits).unwrap()
    }

    #[test]
    fn stats_by_hand() {
        let inst = two_items(6.0);
        let s = *sol(&inst, &[false, false]).stats();
        assert_eq!(s, SolutionStats { mu: 0.0, variance: 0.0, weight: 0.0, count: 0 });
        let s = *sol(&inst, &[true, true]).stats();
        assert_eq!(s, SolutionStats { mu: 14.0, variance: 6.0, weight: 7.0, count: 2 });
        let s = *sol(&inst, &[true, false]).stats();
        assert_eq!(s, SolutionStats { mu: 10.0, variance: 3.0, weight: 2.0, count: 1 });
    }

    #[test]
    fn length_mismatch() {
        let inst = two_items(6.0);
        assert_eq!(
            Solution::from_bools(&inst, &[true]).unwrap_err(),
            ObjectiveError::LengthMismatch { expected: 2, got: 1 }
        );
    }

    #[test]
    fn g_examples() {
        let inst = two_items(6.0);
        let p = eval_g(&inst, &sol(&inst, &[false, false]));
        assert_eq!((p.first, p.second), (0.0, 0.0));
        let p = eval_g(&inst, &sol(&inst, &[true, true]));
        assert_eq!((p.first, p.second), (-1.0, 7.0));
        let p = eval_g(&inst, &sol(&inst, &[true, false]));
        assert_eq!((p.first, p.second, p.kind), (10.0, 3.0, FitnessKind::G));
    }

    #[test]
    fn g_prime_examples() {
        let inst = two_items(6.0);
        let p = eval_g_prime(&inst, &sol(&inst, &[false, false]));
        assert_eq!((p.first, p.second), (0.0, 0.0));
        let p = eval_g_prime(&inst, &sol(&inst, &[true, true]));
        assert_eq!(p.first, -1.0);
        assert!((p.second - (2.0 * 3f64.sqrt() + 1.0)).abs() < 1e-12);
        assert!((p.second - 4.4641).abs() < 1e-4);
        let roomy = two_items(10.0);
        let p = eval_g_prime(&roomy, &sol(&roomy, &[true, true]));
        assert_eq!(p.first, 14.0);
        assert!((p.second - 6f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn g_double_prime_examples() {
        let inst = two_items(6.0);
        assert_eq!(eval_g_double_prime(&inst, &sol(&inst, &[false, false])).second, 0.0);
        let p = eval_g_double_prime(&inst, &sol(&inst, &[true, true]));
        assert_eq!((p.first, p.second), (-1.0, 3.0));
        let roomy = two_items(10.0);
        let p = eval_g_double_prime(&roomy, &sol(&roomy, &[true, true]));
        assert_eq!((p.first, p.second), (14.0, 2.0));
    }

    #[test]
    fn capacity_boundary_is_feasible() {
        let inst = two_items(7.0);
        let p = eval_g(&inst, &sol(&inst, &[true, true]));
        assert_eq!((p.first, p.second), (14.0, 6.0));
    }

    #[test]
    fn dominance_examples() {
        let k = FitnessKind::G;
        let d = |a: (f64, f64), b: (f64, f64)| {
            dominates(&ObjectivePair::new(a.0, a.1, k), &ObjectivePair::new(b.0, b.1, k)).unwrap()
        };
        assert_eq!(d((10.0, 2.0), (9.0, 3.0)), Dominance::Strong);
        assert_eq!(d((10.0, 2.0), (10.0, 2.0)), Dominance::Weak);
        assert_eq!(d((10.0, 3.0), (9.0, 2.0)), Dominance::None);
        let err = dominates(
            &ObjectivePair::new(1.0, 1.0, FitnessKind::G),
            &ObjectivePair::new(1.0, 1.0, FitnessKind::GPrime),
        );
        assert_eq!(err, Err(ObjectiveError::KindMismatch(FitnessKind::G, FitnessKind::GPrime)));
    }

    #[test]
    fn flips_match_recomputation() {
        let inst = two_items(6.0);
        let s = Solution::empty(&inst).with_flips(&inst, &[1, 0, 1]);
        assert_eq!(s.bit_string(), "10");
        assert_eq!(s, sol(&inst, &[true, false]));
    }

    #[test]
    fn fitness_kind_parsing() {
        for k in FitnessKind::ALL {
            assert_eq!(k.as_str().parse::<FitnessKind>().unwrap(), k);
        }
        assert!("h".parse::<FitnessKind>().is_err());
    }
}
