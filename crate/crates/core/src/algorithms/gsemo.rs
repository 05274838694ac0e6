use rand::Rng;

use super::{
    flip_positions, past_deadline, random_bits, AlgorithmError, Archive, EvolutionConfig,
    FilterSchedule,
};
use crate::estimators::filter_indices;
use crate::instances::KnapsackInstance;
use crate::objectives::{Solution, SolutionStats};
use crate::{seeded_rng, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct GsemoOutcome<T> {
    pub archive: Archive<T>,
    /// Fitness evaluations consumed, the initial solution included.
    pub evaluations: u64,
    /// False when the run stopped at the deadline before exhausting its budget.
    pub completed: bool,
    pub filter_applications: u64,
}

/// Global SEMO: keep an archive of mutually non-dominated solutions, mutate a
/// uniformly chosen member each step and insert the offspring unless it is
/// strongly dominated.
///
/// Draw order: `n` bools for the initial solution, then per iteration one
/// parent index followed by the geometric skips of the mutation.
///
/// With `config.filtering`, every `interval` evaluations the feasible archive
/// members whose confidence interval is empty are removed (only when at least
/// two members are feasible).
pub fn gsemo_run<T: Scalar>(
    instance: &KnapsackInstance<T>,
    config: &EvolutionConfig<T>,
) -> Result<GsemoOutcome<T>, AlgorithmError> {
    config.validate()?;
    if config.nsga2.is_some() {
        return Err(AlgorithmError::InvalidConfig(
            "GSEMO does not take NSGA-II parameters".into(),
        ));
    }
    let n = instance.len();
    let mut rng = seeded_rng(config.seed);
    let mut archive = Archive::new();

    let initial = Solution::new(instance, random_bits(n, &mut rng)).expect("length matches");
    let objectives = config.fitness.evaluate(instance, initial.stats());
    archive.insert(initial, objectives);
    let mut evaluations = 1;
    let mut filter_applications = 0;
    let mut completed = true;
    let mut positions = Vec::with_capacity(8);

    loop {
        if let Some(schedule) = &config.filtering {
            if evaluations % schedule.interval == 0 && apply_filter(&mut archive, instance, schedule) {
                filter_applications += 1;
            }
        }
        if evaluations >= config.budget {
            break;
        }
        if past_deadline(config.deadline, evaluations) {
            completed = false;
            break;
        }

        let parent = &archive.get(rng.random_range(0..archive.len())).solution;
        flip_positions(n, &mut rng, &mut positions);
        let child = parent.with_flips(instance, &positions);
        let objectives = config.fitness.evaluate(instance, child.stats());
        evaluations += 1;
        archive.insert(child, objectives);

        debug_assert!(evaluations % 1024 != 0 || archive.is_antichain());
    }

    Ok(GsemoOutcome {
        archive,
        evaluations,
        completed,
        filter_applications,
    })
}

/// Returns whether the filter actually ran.
fn apply_filter<T: Scalar>(
    archive: &mut Archive<T>,
    instance: &KnapsackInstance<T>,
    schedule: &FilterSchedule<T>,
) -> bool {
    let feasible: Vec<usize> = (0..archive.len())
        .filter(|&i| archive.get(i).solution.is_feasible(instance))
        .collect();
    if feasible.len() < 2 {
        return false;
    }
    let stats: Vec<SolutionStats<T>> = feasible
        .iter()
        .map(|&i| *archive.get(i).solution.stats())
        .collect();
    let mut keep = vec![true; archive.len()];
    for &i in &feasible {
        keep[i] = false;
    }
    for k in filter_indices(&stats, &schedule.bound) {
        keep[feasible[k]] = true;
    }
    archive.retain_indices(&keep);
    true
}
