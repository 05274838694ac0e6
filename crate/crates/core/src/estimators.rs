//! Tail-bound profit estimates and confidence-level bookkeeping.
//!
//! For a solution with expected profit `mu`, variance `v` and `c` packed items:
//!
//! * Chebyshev: `mu - sqrt((1 - alpha) / alpha) * sqrt(v)`
//! * Hoeffding (all items share dispersion `delta`): `mu - delta * sqrt(ln(1/alpha) * 2c)`
//!
//! Given two solutions where `x` has both the larger expected profit and the
//! larger spread, `x` has the better estimate exactly for `alpha` at or above a
//! pairwise threshold. Sorting a population by decreasing `mu`, those
//! thresholds give every member the (possibly empty) interval of confidence
//! levels at which it yields the highest estimate.

use std::cmp::Ordering;

use thiserror::Error;

use crate::instances::KnapsackInstance;
use crate::objectives::{Solution, SolutionStats};
use crate::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum EstimatorError {
    #[error("confidence level must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),
    #[error("dispersion must be finite and >= 0, got {0}")]
    InvalidDelta(f64),
    #[error("threshold precondition violated: {0}")]
    Precondition(String),
    #[error("population must be sorted by strictly decreasing expected profit (position {0})")]
    Unsorted(usize),
    #[error("solution index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("population contains no feasible solution")]
    NoFeasibleSolution,
}

fn check_alpha<T: Scalar>(alpha: T) -> Result<(), EstimatorError> {
    if alpha > T::zero() && alpha < T::one() {
        Ok(())
    } else {
        Err(EstimatorError::InvalidAlpha(alpha.as_f64()))
    }
}

fn check_delta<T: Scalar>(delta: T) -> Result<(), EstimatorError> {
    if delta.is_finite() && delta >= T::zero() {
        Ok(())
    } else {
        Err(EstimatorError::InvalidDelta(delta.as_f64()))
    }
}

pub fn profit_chebyshev<T: Scalar>(stats: &SolutionStats<T>, alpha: T) -> Result<T, EstimatorError> {
    check_alpha(alpha)?;
    Ok(stats.mu - ((T::one() - alpha) / alpha).sqrt() * stats.variance.sqrt())
}

pub fn profit_hoeffding<T: Scalar>(
    stats: &SolutionStats<T>,
    delta: T,
    alpha: T,
) -> Result<T, EstimatorError> {
    check_alpha(alpha)?;
    check_delta(delta)?;
    let count = T::of_usize(stats.count);
    Ok(stats.mu - delta * (alpha.recip().ln() * T::of(2.0) * count).sqrt())
}

/// Smallest `alpha` at which `x` (higher `mu`, higher variance) has a
/// Chebyshev estimate at least as large as `y`'s.
pub fn alpha_threshold_chebyshev<T: Scalar>(
    x: &SolutionStats<T>,
    y: &SolutionStats<T>,
) -> Result<T, EstimatorError> {
    let spread = x.variance.sqrt() - y.variance.sqrt();
    if !(x.mu > y.mu && x.variance > y.variance && spread > T::zero()) {
        return Err(EstimatorError::Precondition(format!(
            "need mu(x) > mu(y) and sqrt v(x) > sqrt v(y); got mu {} vs {}, v {} vs {}",
            x.mu, y.mu, x.variance, y.variance
        )));
    }
    let ratio = (x.mu - y.mu) / spread;
    Ok((T::one() + ratio * ratio).recip())
}

/// Hoeffding counterpart of [`alpha_threshold_chebyshev`]; the variance
/// ordering becomes an ordering on item counts under a shared `delta`.
pub fn alpha_threshold_hoeffding<T: Scalar>(
    x: &SolutionStats<T>,
    y: &SolutionStats<T>,
    delta: T,
) -> Result<T, EstimatorError> {
    if !(x.mu > y.mu && x.count > y.count && delta > T::zero() && delta.is_finite()) {
        return Err(EstimatorError::Precondition(format!(
            "need mu(x) > mu(y), |x| > |y| and delta > 0; got mu {} vs {}, |x| {} vs {}, delta {}",
            x.mu, y.mu, x.count, y.count, delta
        )));
    }
    let two = T::of(2.0);
    let spread = delta * ((two * T::of_usize(x.count)).sqrt() - (two * T::of_usize(y.count)).sqrt());
    let ratio = (x.mu - y.mu) / spread;
    Ok((-(ratio * ratio)).exp())
}

/// Which tail bound turns `(mu, v)` into a guaranteed profit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProfitBound<T> {
    Chebyshev,
    /// Requires one dispersion shared by every item.
    Hoeffding { delta: T },
}

impl<T: Scalar> ProfitBound<T> {
    pub fn name(&self) -> &'static str {
        match self {
            ProfitBound::Chebyshev => "chebyshev",
            ProfitBound::Hoeffding { .. } => "hoeffding",
        }
    }

    /// Hoeffding bound for an instance, which must have a uniform dispersion.
    pub fn hoeffding_for(instance: &KnapsackInstance<T>) -> Option<Self> {
        instance.uniform_delta().map(|delta| ProfitBound::Hoeffding { delta })
    }

    pub fn profit(&self, stats: &SolutionStats<T>, alpha: T) -> Result<T, EstimatorError> {
        match *self {
            ProfitBound::Chebyshev => profit_chebyshev(stats, alpha),
            ProfitBound::Hoeffding { delta } => profit_hoeffding(stats, delta, alpha),
        }
    }

    pub fn threshold(&self, x: &SolutionStats<T>, y: &SolutionStats<T>) -> Result<T, EstimatorError> {
        match *self {
            ProfitBound::Chebyshev => alpha_threshold_chebyshev(x, y),
            ProfitBound::Hoeffding { delta } => alpha_threshold_hoeffding(x, y, delta),
        }
    }

    /// The spread measure the bound penalizes, as a monotone key.
    fn spread_key(&self, stats: &SolutionStats<T>) -> T {
        match self {
            ProfitBound::Chebyshev => stats.variance.sqrt(),
            ProfitBound::Hoeffding { .. } => T::of_usize(stats.count),
        }
    }

    /// Whether the estimate ignores spread entirely, so the largest `mu` always wins.
    fn spread_free(&self) -> bool {
        matches!(self, ProfitBound::Hoeffding { delta } if *delta == T::zero())
    }
}

/// Confidence levels `[alpha_low, alpha_high]` for which a solution gives the
/// best estimate in its population. `alpha_low > alpha_high` means empty, and
/// so does `[0, 0]`: levels are taken from `(0, 1)`, and an upper end that
/// underflowed to zero leaves no representable level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfidenceInterval<T> {
    pub alpha_low: T,
    pub alpha_high: T,
}

impl<T: Scalar> ConfidenceInterval<T> {
    /// Canonical empty interval, used for members excluded before thresholding.
    pub fn empty() -> Self {
        Self {
            alpha_low: T::one(),
            alpha_high: T::zero(),
        }
    }

    pub fn full() -> Self {
        Self {
            alpha_low: T::zero(),
            alpha_high: T::one(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.alpha_low <= self.alpha_high && self.alpha_high > T::zero()
    }

    pub fn midpoint(&self) -> T {
        (self.alpha_low + self.alpha_high) / T::of(2.0)
    }
}

/// `(m+1) x (m+1)` symmetric threshold matrix over a population sorted by
/// strictly decreasing `mu`. Row and column 0 are fixed at 1; entry `(i, j)`
/// with `1 <= i < j` is the threshold of sorted solutions `i` (higher `mu`)
/// and `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaMatrix<T> {
    size: usize,
    entries: Vec<T>,
}

impl<T: Scalar> AlphaMatrix<T> {
    /// Number of solutions `m`.
    pub fn len(&self) -> usize {
        self.size - 1
    }

    pub fn is_empty(&self) -> bool {
        self.size == 1
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.size + j]
    }

    fn set(&mut self, i: usize, j: usize, value: T) {
        self.entries[i * self.size + j] = value;
        self.entries[j * self.size + i] = value;
    }
}

pub fn alpha_matrix<T: Scalar>(
    population: &[SolutionStats<T>],
    bound: &ProfitBound<T>,
) -> Result<AlphaMatrix<T>, EstimatorError> {
    if let Some(pos) = population.windows(2).position(|w| !(w[0].mu > w[1].mu)) {
        return Err(EstimatorError::Unsorted(pos + 1));
    }
    let size = population.len() + 1;
    let mut matrix = AlphaMatrix {
        size,
        entries: vec![T::one(); size * size],
    };
    for i in 1..size {
        for j in i + 1..size {
            let alpha = bound.threshold(&population[i - 1], &population[j - 1])?;
            matrix.set(i, j, alpha);
        }
    }
    Ok(matrix)
}

/// Interval of sorted solution `k` (1-based): the upper end is the smallest
/// threshold against any higher-`mu` solution (or 1), the lower end the
/// largest threshold against any lower-`mu` solution (or 0).
pub fn alpha_interval<T: Scalar>(
    k: usize,
    matrix: &AlphaMatrix<T>,
) -> Result<ConfidenceInterval<T>, EstimatorError> {
    let m = matrix.len();
    if k == 0 || k > m {
        return Err(EstimatorError::IndexOutOfRange { index: k, len: m });
    }
    let alpha_high = (0..k).map(|j| matrix.get(j, k)).fold(T::one(), T::min);
    let alpha_low = (k + 1..=m).map(|j| matrix.get(k, j)).fold(T::zero(), T::max);
    Ok(ConfidenceInterval { alpha_low, alpha_high })
}

/// Confidence interval of every member of an arbitrary population of
/// feasible solutions, in input order.
///
/// Members are ranked by decreasing `mu`, then increasing spread, weight and
/// input position. A member whose spread is not strictly below that of every
/// higher-ranked member (dominated, or a duplicate of a lighter one) gets
/// [`ConfidenceInterval::empty`]; the rest go through [`alpha_matrix`].
pub fn confidence_intervals<T: Scalar>(
    population: &[SolutionStats<T>],
    bound: &ProfitBound<T>,
) -> Result<Vec<ConfidenceInterval<T>>, EstimatorError> {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&population[a], &population[b]);
        y.mu.partial_cmp(&x.mu)
            .unwrap_or(Ordering::Equal)
            .then_with(|| {
                bound
                    .spread_key(x)
                    .partial_cmp(&bound.spread_key(y))
                    .unwrap_or(Ordering::Equal)
            })
            .then_with(|| x.weight.partial_cmp(&y.weight).unwrap_or(Ordering::Equal))
            .then(a.cmp(&b))
    });

    let mut intervals = vec![ConfidenceInterval::empty(); population.len()];
    let Some(&top) = order.first() else {
        return Ok(intervals);
    };
    if bound.spread_free() {
        intervals[top] = ConfidenceInterval::full();
        return Ok(intervals);
    }

    let mut frontier = Vec::with_capacity(order.len());
    let mut lowest_spread = T::infinity();
    for &idx in &order {
        let spread = bound.spread_key(&population[idx]);
        if spread < lowest_spread {
            lowest_spread = spread;
            frontier.push(idx);
        }
    }
    let sorted: Vec<SolutionStats<T>> = frontier.iter().map(|&i| population[i]).collect();
    let matrix = alpha_matrix(&sorted, bound)?;
    for (k, &idx) in frontier.iter().enumerate() {
        intervals[idx] = alpha_interval(k + 1, &matrix)?;
    }
    Ok(intervals)
}

/// Positions of the members whose confidence interval is non-empty.
pub fn filter_indices<T: Scalar>(
    population: &[SolutionStats<T>],
    bound: &ProfitBound<T>,
) -> Vec<usize> {
    let intervals = confidence_intervals(population, bound)
        .expect("frontier members satisfy every threshold precondition");
    intervals
        .iter()
        .enumerate()
        .filter_map(|(i, iv)| iv.is_valid().then_some(i))
        .collect()
}

/// Keeps the members that give the best estimate for at least one
/// confidence level; order is preserved. Expects feasible solutions.
pub fn filter_population<T: Scalar>(
    population: &[Solution<T>],
    bound: &ProfitBound<T>,
) -> Vec<Solution<T>> {
    let stats: Vec<SolutionStats<T>> = population.iter().map(|s| *s.stats()).collect();
    filter_indices(&stats, bound)
        .into_iter()
        .map(|i| population[i].clone())
        .collect()
}

/// Feasible member with the highest estimate at `alpha`. Ties go to lower
/// variance, then lower weight, then the lexicographically smaller bit string.
pub fn best_for_alpha<'a, T: Scalar>(
    instance: &KnapsackInstance<T>,
    population: &'a [Solution<T>],
    bound: &ProfitBound<T>,
    alpha: T,
) -> Result<(&'a Solution<T>, T), EstimatorError> {
    check_alpha(alpha)?;
    let mut best: Option<(&Solution<T>, T)> = None;
    for candidate in population.iter().filter(|s| s.is_feasible(instance)) {
        let profit = bound.profit(candidate.stats(), alpha)?;
        let better = match best {
            None => true,
            Some((incumbent, best_profit)) => {
                let (c, i) = (candidate.stats(), incumbent.stats());
                profit
                    .partial_cmp(&best_profit)
                    .unwrap_or(Ordering::Equal)
                    .then_with(|| i.variance.partial_cmp(&c.variance).unwrap_or(Ordering::Equal))
                    .then_with(|| i.weight.partial_cmp(&c.weight).unwrap_or(Ordering::Equal))
                    .then_with(|| incumbent.bits().cmp(candidate.bits()))
                    == Ordering::Greater
            }
        };
        if better {
            best = Some((candidate, profit));
        }
    }
    best.ok_or(EstimatorError::NoFeasibleSolution)
}
