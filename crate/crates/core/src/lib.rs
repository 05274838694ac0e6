//! Evolutionary multi-objective optimization for the knapsack problem with
//! stochastic profits under a chance constraint.
//!
//! Items carry uniformly distributed profits `[mu - delta, mu + delta]`. A
//! solution is optimized as a trade-off between expected profit and spread
//! (variance, standard deviation or item count); tail bounds then turn each
//! trade-off point into a profit that holds with probability `1 - alpha`.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`.

pub mod algorithms;
pub mod estimators;
pub mod instances;
pub mod objectives;
pub mod oracle;
mod scalar;

pub use scalar::Scalar;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream used everywhere a seed is accepted.
pub type Rng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub type Item = instances::Item<f64>;
pub type Instance = instances::KnapsackInstance<f64>;
pub type Stats = objectives::SolutionStats<f64>;
pub type Solution = objectives::Solution<f64>;
pub type Objectives = objectives::ObjectivePair<f64>;
pub type Bound = estimators::ProfitBound<f64>;
pub type Interval = estimators::ConfidenceInterval<f64>;
pub type Config = algorithms::EvolutionConfig<f64>;
pub type Front = oracle::ParetoFront<f64>;
