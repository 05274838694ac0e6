use std::cmp::Ordering;

use rand::Rng;

use super::{
    crossover_at, flip_positions, past_deadline, random_bits, AlgorithmError, EvolutionConfig,
};
use crate::instances::KnapsackInstance;
use crate::objectives::{ObjectiveError, ObjectivePair, Solution};
use crate::{seeded_rng, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Nsga2Outcome<T> {
    pub population: Vec<Solution<T>>,
    pub objectives: Vec<ObjectivePair<T>>,
    pub evaluations: u64,
    pub generations: u64,
    pub completed: bool,
}

/// Splits `objectives` into non-dominated fronts (Deb's fast sort). Front 0
/// is the non-dominated set of the input; indices are ascending within a front.
pub fn fast_nondominated_sort<T: Scalar>(
    objectives: &[ObjectivePair<T>],
) -> Result<Vec<Vec<usize>>, ObjectiveError> {
    if let Some(first) = objectives.first() {
        if let Some(other) = objectives.iter().find(|o| o.kind != first.kind) {
            return Err(ObjectiveError::KindMismatch(first.kind, other.kind));
        }
    }
    let n = objectives.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if objectives[i].strongly_dominates(&objectives[j]) {
                dominates[i].push(j);
                dominated_by_count[j] += 1;
            } else if objectives[j].strongly_dominates(&objectives[i]) {
                dominates[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    Ok(fronts)
}

/// Crowding distance of each member of one front. Per objective the two
/// extremes get infinity and interior members the normalized gap between
/// their neighbours; an objective with zero range adds nothing.
pub fn crowding_distance<T: Scalar>(front: &[ObjectivePair<T>]) -> Vec<T> {
    let m = front.len();
    if m <= 2 {
        return vec![T::infinity(); m];
    }
    let mut distance = vec![T::zero(); m];
    let objectives: [fn(&ObjectivePair<T>) -> T; 2] = [|o| o.first, |o| o.second];
    for value in objectives {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            value(&front[a])
                .partial_cmp(&value(&front[b]))
                .unwrap_or(Ordering::Equal)
        });
        let lo = value(&front[order[0]]);
        let hi = value(&front[order[m - 1]]);
        distance[order[0]] = T::infinity();
        distance[order[m - 1]] = T::infinity();
        let range = hi - lo;
        if range > T::zero() {
            for w in order.windows(3) {
                let gap = value(&front[w[2]]) - value(&front[w[0]]);
                distance[w[1]] = distance[w[1]] + gap / range;
            }
        }
    }
    distance
}

/// Draws two members uniformly with replacement and returns the index of the
/// winner: lower rank, then larger crowding distance, then the first drawn.
pub fn binary_tournament<T: Scalar, R: Rng + ?Sized>(
    ranks: &[usize],
    distances: &[T],
    rng: &mut R,
) -> usize {
    let a = rng.random_range(0..ranks.len());
    let b = rng.random_range(0..ranks.len());
    match ranks[a].cmp(&ranks[b]) {
        Ordering::Less => a,
        Ordering::Greater => b,
        Ordering::Equal if distances[b] > distances[a] => b,
        Ordering::Equal => a,
    }
}

struct Ranking<T> {
    ranks: Vec<usize>,
    distances: Vec<T>,
}

fn rank_population<T: Scalar>(objectives: &[ObjectivePair<T>]) -> Ranking<T> {
    let fronts = fast_nondominated_sort(objectives).expect("single fitness kind");
    let mut ranks = vec![0; objectives.len()];
    let mut distances = vec![T::zero(); objectives.len()];
    for (rank, front) in fronts.iter().enumerate() {
        let members: Vec<ObjectivePair<T>> = front.iter().map(|&i| objectives[i]).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&members)) {
            ranks[i] = rank;
            distances[i] = d;
        }
    }
    Ranking { ranks, distances }
}

/// Indices of the `size` survivors of `objectives`: whole fronts in rank
/// order, the last partial front truncated by decreasing crowding distance
/// (ties keep input order).
fn select_survivors<T: Scalar>(objectives: &[ObjectivePair<T>], size: usize) -> Vec<usize> {
    let fronts = fast_nondominated_sort(objectives).expect("single fitness kind");
    let mut survivors = Vec::with_capacity(size);
    for front in fronts {
        let room = size - survivors.len();
        if room == 0 {
            break;
        }
        if front.len() <= room {
            survivors.extend(front);
            continue;
        }
        let members: Vec<ObjectivePair<T>> = front.iter().map(|&i| objectives[i]).collect();
        let distance = crowding_distance(&members);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&a, &b| {
            distance[b]
                .partial_cmp(&distance[a])
                .unwrap_or(Ordering::Equal)
        });
        survivors.extend(order.into_iter().take(room).map(|k| front[k]));
        break;
    }
    survivors
}

/// NSGA-II with binary tournament selection, single-point crossover (always
/// applied) and standard bit mutation of both children.
///
/// Draw order: the initial population bit by bit; then per mating two
/// tournaments (two indices each), one crossover cut, and the mutation skips
/// of the first and then the second child. The final generation is cut short
/// so that exactly `budget` evaluations are spent.
pub fn nsga2_run<T: Scalar>(
    instance: &KnapsackInstance<T>,
    config: &EvolutionConfig<T>,
) -> Result<Nsga2Outcome<T>, AlgorithmError> {
    config.validate()?;
    let Some(params) = config.nsga2 else {
        return Err(AlgorithmError::InvalidConfig("NSGA-II parameters missing".into()));
    };
    if config.filtering.is_some() {
        return Err(AlgorithmError::InvalidConfig(
            "filtering applies to GSEMO only".into(),
        ));
    }
    let n = instance.len();
    if n < 2 {
        return Err(AlgorithmError::TooShort(n));
    }
    let size = params.population_size;
    let mut rng = seeded_rng(config.seed);
    let evaluate = |s: &Solution<T>| config.fitness.evaluate(instance, s.stats());

    let mut population: Vec<Solution<T>> = (0..size)
        .map(|_| Solution::new(instance, random_bits(n, &mut rng)).expect("length matches"))
        .collect();
    let mut objectives: Vec<ObjectivePair<T>> = population.iter().map(evaluate).collect();
    let mut evaluations = size as u64;
    let mut generations = 0;
    let mut completed = true;
    let mut positions = Vec::with_capacity(8);

    while evaluations < config.budget {
        let ranking = rank_population(&objectives);
        let mut offspring: Vec<Solution<T>> = Vec::with_capacity(size);
        while offspring.len() < size && evaluations < config.budget {
            if past_deadline(config.deadline, evaluations) {
                completed = false;
                break;
            }
            let a = binary_tournament(&ranking.ranks, &ranking.distances, &mut rng);
            let b = binary_tournament(&ranking.ranks, &ranking.distances, &mut rng);
            let cut = rng.random_range(1..n);
            let (first, second) = crossover_at(population[a].bits(), population[b].bits(), cut)?;
            for child in [first, second] {
                flip_positions(n, &mut rng, &mut positions);
                let child = Solution::new(instance, child)
                    .expect("length matches")
                    .with_flips(instance, &positions);
                if offspring.len() < size && evaluations < config.budget {
                    offspring.push(child);
                    evaluations += 1;
                }
            }
        }
        if offspring.is_empty() {
            break;
        }

        let offspring_objectives: Vec<ObjectivePair<T>> = offspring.iter().map(evaluate).collect();
        population.extend(offspring);
        objectives.extend(offspring_objectives);
        let survivors = select_survivors(&objectives, size);
        population = survivors.iter().map(|&i| population[i].clone()).collect();
        objectives = survivors.iter().map(|&i| objectives[i]).collect();
        generations += 1;
        if !completed {
            break;
        }
    }

    Ok(Nsga2Outcome {
        population,
        objectives,
        evaluations,
        generations,
        completed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{assign_uniform_dispersion, generate_uncorrelated};
    use crate::objectives::FitnessKind;

    fn pairs(v: &[(f64, f64)]) -> Vec<ObjectivePair<f64>> {
        v.iter().map(|&(a, b)| ObjectivePair::new(a, b, FitnessKind::G)).collect()
    }

    #[test]
    fn sort_examples() {
        assert_eq!(fast_nondominated_sort(&pairs(&[(10.0, 1.0)])).unwrap(), vec![vec![0]]);
        assert_eq!(
            fast_nondominated_sort(&pairs(&[(10.0, 1.0), (9.0, 0.5), (8.0, 2.0)])).unwrap(),
            vec![vec![0, 1], vec![2]]
        );
        assert_eq!(
            fast_nondominated_sort(&pairs(&[(3.0, 3.0); 4])).unwrap(),
            vec![vec![0, 1, 2, 3]]
        );
        let mixed = [
            ObjectivePair::new(1.0, 1.0, FitnessKind::G),
            ObjectivePair::new(1.0, 1.0, FitnessKind::GPrime),
        ];
        assert!(fast_nondominated_sort(&mixed).is_err());
        assert!(fast_nondominated_sort::<f64>(&[]).unwrap().is_empty());
    }

    #[test]
    fn crowding_examples() {
        assert_eq!(crowding_distance(&pairs(&[(1.0, 5.0), (2.0, 3.0)])), vec![f64::INFINITY; 2]);
        let d = crowding_distance(&pairs(&[(1.0, 5.0), (2.0, 3.0), (3.0, 1.0)]));
        assert_eq!(d, vec![f64::INFINITY, 2.0, f64::INFINITY]);
        let d = crowding_distance(&pairs(&[(1.0, 4.0), (2.0, 4.0), (3.0, 4.0)]));
        assert_eq!(d, vec![f64::INFINITY, 1.0, f64::INFINITY]);
    }

    #[test]
    fn tournament_rules() {
        let mut rng = seeded_rng(1);
        // Index 1 only wins when drawn twice.
        let mut seen = [0usize; 2];
        for _ in 0..1000 {
            seen[binary_tournament(&[0, 1], &[0.5, 0.5], &mut rng)] += 1;
        }
        assert!(seen[0] > 650 && seen[1] > 150, "{seen:?}");
        let mut seen = [0usize; 2];
        for _ in 0..1000 {
            seen[binary_tournament(&[2, 2], &[f64::INFINITY, 0.5], &mut rng)] += 1;
        }
        assert!(seen[0] > 650, "{seen:?}");
    }

    #[test]
    fn survivors_truncate_last_front_by_crowding() {
        let objs = pairs(&[(1.0, 1.0), (2.0, 2.0), (2.1, 2.1), (3.0, 3.0), (0.0, 9.0)]);
        assert_eq!(select_survivors(&objs, 3), vec![0, 3, 1]);
        assert_eq!(select_survivors(&objs, 5), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn population_size_and_budget() {
        let inst = assign_uniform_dispersion(
            &generate_uncorrelated::<f64>(25, 3, (1, 1000), 0.4).unwrap(),
            25.0,
        )
        .unwrap();
        for budget in [20u64, 1000, 1013] {
            let cfg = EvolutionConfig::new(FitnessKind::GPrime, budget, 8).with_nsga2(20);
            let out = nsga2_run(&inst, &cfg).unwrap();
            assert_eq!(out.population.len(), 20);
            assert_eq!(out.objectives.len(), 20);
            assert_eq!(out.evaluations, budget);
            assert_eq!(out, nsga2_run(&inst, &cfg).unwrap());
        }
    }

    #[test]
    fn config_errors() {
        let inst = generate_uncorrelated::<f64>(5, 3, (1, 10), 0.4).unwrap();
        let bad = |cfg: EvolutionConfig<f64>| nsga2_run(&inst, &cfg).is_err();
        assert!(bad(EvolutionConfig::new(FitnessKind::G, 100, 1)));
        assert!(bad(EvolutionConfig::new(FitnessKind::G, 100, 1).with_nsga2(5)));
        assert!(bad(EvolutionConfig::new(FitnessKind::G, 100, 1).with_nsga2(2)));
        assert!(bad(EvolutionConfig::new(FitnessKind::G, 10, 1).with_nsga2(20)));
        let one = generate_uncorrelated::<f64>(1, 3, (1, 10), 1.0).unwrap();
        let cfg = EvolutionConfig::new(FitnessKind::G, 100, 1).with_nsga2(4);
        assert_eq!(nsga2_run(&one, &cfg).unwrap_err(), AlgorithmError::TooShort(1));
    }
}
