//! GSEMO, GSEMO with periodic confidence-interval filtering, and NSGA-II.
//!
//! Every run draws all of its randomness from one [`crate::seeded_rng`]
//! stream, so a run is a pure function of `(instance, config)`.

mod archive;
mod gsemo;
mod nsga2;
mod operators;

pub use archive::{Archive, ArchiveEntry};
pub use gsemo::{gsemo_run, GsemoOutcome};
pub use nsga2::{binary_tournament, crowding_distance, fast_nondominated_sort, nsga2_run, Nsga2Outcome};
pub use operators::{bitflip_mutation, crossover_at, flip_positions, random_bits, single_point_crossover};

use std::time::Instant;

use thiserror::Error;

use crate::estimators::ProfitBound;
use crate::objectives::FitnessKind;

pub const DEFAULT_FILTER_INTERVAL: u64 = 10_000;
pub const DEFAULT_POPULATION_SIZE: usize = 100;

#[derive(Debug, Error, PartialEq)]
pub enum AlgorithmError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("bit strings have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("crossover needs at least 2 bits, got {0}")]
    TooShort(usize),
}

/// How often GSEMO prunes its archive and with which bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterSchedule<T> {
    /// Evaluations between two filter applications.
    pub interval: u64,
    pub bound: ProfitBound<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Nsga2Params {
    /// Parents per generation; as many offspring are produced.
    pub population_size: usize,
}

impl Default for Nsga2Params {
    fn default() -> Self {
        Self {
            population_size: DEFAULT_POPULATION_SIZE,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionConfig<T> {
    pub fitness: FitnessKind,
    /// Total fitness evaluations, initial solutions included.
    pub budget: u64,
    pub seed: u64,
    pub filtering: Option<FilterSchedule<T>>,
    pub nsga2: Option<Nsga2Params>,
    /// Wall-clock limit; a run that hits it stops early and reports itself incomplete.
    pub deadline: Option<Instant>,
}

impl<T> EvolutionConfig<T> {
    pub fn new(fitness: FitnessKind, budget: u64, seed: u64) -> Self {
        Self {
            fitness,
            budget,
            seed,
            filtering: None,
            nsga2: None,
            deadline: None,
        }
    }

    pub fn with_filtering(mut self, interval: u64, bound: ProfitBound<T>) -> Self {
        self.filtering = Some(FilterSchedule { interval, bound });
        self
    }

    pub fn with_nsga2(mut self, population_size: usize) -> Self {
        self.nsga2 = Some(Nsga2Params { population_size });
        self
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = deadline;
        self
    }

    fn validate(&self) -> Result<(), AlgorithmError> {
        let fail = |m: String| Err(AlgorithmError::InvalidConfig(m));
        if self.budget < 1 {
            return fail("budget must be at least 1".into());
        }
        if let Some(f) = &self.filtering {
            if f.interval < 1 {
                return fail("filter interval must be at least 1".into());
            }
        }
        if let Some(p) = &self.nsga2 {
            if p.population_size < 4 || p.population_size % 2 != 0 {
                return fail(format!(
                    "population size must be even and at least 4, got {}",
                    p.population_size
                ));
            }
            if self.budget < p.population_size as u64 {
                return fail(format!(
                    "budget {} is smaller than the population size {}",
                    self.budget, p.population_size
                ));
            }
        }
        Ok(())
    }
}

/// Checks the deadline only every `CLOCK_STRIDE` evaluations.
const CLOCK_STRIDE: u64 = 4096;

fn past_deadline(deadline: Option<Instant>, evaluations: u64) -> bool {
    match deadline {
        Some(d) if evaluations.is_multiple_of(CLOCK_STRIDE) => Instant::now() >= d,
        _ => false,
    }
}
