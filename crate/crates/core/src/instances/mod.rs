//! Stochastic-profit knapsack instances.
//!
//! Every item has a deterministic weight and a profit drawn uniformly from
//! `[mu - delta, mu + delta]`, so its profit variance is `delta^2 / 3`.

mod format;
mod generate;

pub use format::{load_instance, parse_instance, save_instance, to_canonical_string};
pub use generate::{
    assign_random_dispersion, assign_uniform_dispersion, generate_bounded_strongly_correlated,
    generate_uncorrelated, DEFAULT_CAPACITY_RATIO, DEFAULT_CORRELATION_OFFSET,
    DEFAULT_VALUE_RANGE,
};

use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("instance must contain at least one item")]
    Empty,
    #[error("capacity must be positive and finite, got {0}")]
    InvalidCapacity(String),
    #[error("item {index}: {reason}")]
    InvalidItem { index: usize, reason: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One knapsack item.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Item<T> {
    /// Expected profit.
    pub mu: T,
    /// Half-width of the uniform profit distribution.
    pub delta: T,
    pub weight: T,
}

impl<T: Scalar> Item<T> {
    pub fn new(mu: T, delta: T, weight: T) -> Self {
        Self { mu, delta, weight }
    }

    /// Profit variance `delta^2 / 3`.
    pub fn variance(&self) -> T {
        self.delta * self.delta / T::of(3.0)
    }

    /// Profit standard deviation `delta / sqrt(3)`.
    pub fn std_dev(&self) -> T {
        self.variance().sqrt()
    }

    fn validate(&self, index: usize) -> Result<(), InstanceError> {
        let fail = |reason: String| Err(InstanceError::InvalidItem { index, reason });
        if !(self.mu.is_finite() && self.mu >= T::zero()) {
            return fail(format!("expected profit must be finite and >= 0, got {}", self.mu));
        }
        if !(self.delta.is_finite() && self.delta >= T::zero()) {
            return fail(format!("dispersion must be finite and >= 0, got {}", self.delta));
        }
        if !(self.weight.is_finite() && self.weight > T::zero()) {
            return fail(format!("weight must be finite and > 0, got {}", self.weight));
        }
        Ok(())
    }
}

/// An immutable knapsack instance with capacity `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct KnapsackInstance<T> {
    name: String,
    items: Vec<Item<T>>,
    capacity: T,
    max_variance: T,
    max_std_dev: T,
}

impl<T: Scalar> KnapsackInstance<T> {
    pub fn new(
        name: impl Into<String>,
        items: Vec<Item<T>>,
        capacity: T,
    ) -> Result<Self, InstanceError> {
        if items.is_empty() {
            return Err(InstanceError::Empty);
        }
        if !(capacity.is_finite() && capacity > T::zero()) {
            return Err(InstanceError::InvalidCapacity(capacity.to_string()));
        }
        for (index, item) in items.iter().enumerate() {
            item.validate(index)?;
        }
        // Summed in index order, like every per-solution statistic.
        let max_variance = items.iter().fold(T::zero(), |acc, it| acc + it.variance());
        let max_std_dev = items.iter().fold(T::zero(), |acc, it| acc + it.std_dev());
        Ok(Self {
            name: name.into(),
            items,
            capacity,
            max_variance,
            max_std_dev,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn items(&self) -> &[Item<T>] {
        &self.items
    }

    /// Number of items `n`.
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> T {
        self.capacity
    }

    /// `v_max`: the sum of all item variances.
    pub fn max_variance(&self) -> T {
        self.max_variance
    }

    /// `s_max`: the sum of all item standard deviations.
    pub fn max_std_dev(&self) -> T {
        self.max_std_dev
    }

    /// The shared dispersion if every item has the same `delta`.
    pub fn uniform_delta(&self) -> Option<T> {
        let first = self.items[0].delta;
        self.items.iter().all(|it| it.delta == first).then_some(first)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Same instance with replaced dispersions; `deltas` must have length `n`.
    pub fn with_deltas(&self, deltas: impl IntoIterator<Item = T>) -> Result<Self, InstanceError> {
        let items: Vec<Item<T>> = self
            .items
            .iter()
            .zip(deltas)
            .map(|(it, delta)| Item { delta, ..*it })
            .collect();
        if items.len() != self.items.len() {
            return Err(InstanceError::InvalidParameter(format!(
                "expected {} dispersion values, got {}",
                self.items.len(),
                items.len()
            )));
        }
        Self::new(self.name.clone(), items, self.capacity)
    }
}
