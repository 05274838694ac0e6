use proptest::prelude::*;
use stochknap::algorithms::{fast_nondominated_sort, gsemo_run, nsga2_run, EvolutionConfig};
use stochknap::estimators::{best_for_alpha, ProfitBound};
use stochknap::instances::{
    assign_uniform_dispersion, generate_bounded_strongly_correlated,
    generate_uncorrelated, Item, KnapsackInstance,
};
use stochknap::objectives::{FitnessKind, ObjectivePair};
use stochknap::oracle::{enumerate_pareto_front, oracle_best_profit, ParetoFront};

fn small_instance() -> impl Strategy<Value = KnapsackInstance<f64>> {
    prop::collection::vec((0u32..50, 0u32..10, 1u32..30), 1..=10).prop_map(|raw| {
        let total: u32 = raw.iter().map(|r| r.2).sum();
        let items = raw
            .iter()
            .map(|&(m, d, w)| Item::new(m as f64, d as f64, w as f64))
            .collect();
        KnapsackInstance::new("p", items, (total / 2).max(1) as f64).unwrap()
    })
}

fn subset_of_front(objs: &[ObjectivePair<f64>], front: &ParetoFront<f64>) -> bool {
    objs.iter().all(|o| front.contains_vector(o))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn front_optimum_equals_exhaustive_optimum(inst in small_instance(), alpha in 0.001f64..0.99) {
        let front = enumerate_pareto_front(&inst, FitnessKind::G).unwrap();
        let sols = front.solutions();
        let bound = ProfitBound::Chebyshev;
        let (_, via_front) = best_for_alpha(&inst, &sols, &bound, alpha).unwrap();
        prop_assert_eq!(via_front, oracle_best_profit(&inst, &bound, alpha).unwrap());

        let uniform = assign_uniform_dispersion(&inst, 7.0).unwrap();
        let front = enumerate_pareto_front(&uniform, FitnessKind::GDoublePrime).unwrap();
        let bound = ProfitBound::hoeffding_for(&uniform).unwrap();
        let (_, via_front) = best_for_alpha(&uniform, &front.solutions(), &bound, alpha).unwrap();
        prop_assert_eq!(via_front, oracle_best_profit(&uniform, &bound, alpha).unwrap());
    }

    #[test]
    fn front_is_an_antichain_covering_everything(inst in small_instance()) {
        let front = enumerate_pareto_front(&inst, FitnessKind::G).unwrap();
        for (i, a) in front.points.iter().enumerate() {
            for b in &front.points[i + 1..] {
                prop_assert!(!a.objectives.weakly_dominates(&b.objectives));
                prop_assert!(!b.objectives.weakly_dominates(&a.objectives));
                prop_assert!(a.objectives.first > b.objectives.first);
            }
        }
        let n = inst.len();
        for mask in 0u32..1 << n {
            let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let s = stochknap::objectives::Solution::from_bools(&inst, &bits).unwrap();
            if s.is_feasible(&inst) {
                let o = FitnessKind::G.evaluate(&inst, s.stats());
                prop_assert!(front.points.iter().any(|p| p.objectives.weakly_dominates(&o)));
            }
        }
    }

    #[test]
    fn oracle_profit_is_monotone_in_alpha(inst in small_instance()) {
        let grid = [0.001, 0.01, 0.05, 0.1, 0.3, 0.5, 0.9];
        let values: Vec<f64> = grid
            .iter()
            .map(|&a| oracle_best_profit(&inst, &ProfitBound::Chebyshev, a).unwrap())
            .collect();
        prop_assert!(values.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn gsemo_archive_lies_on_the_front() {
    for (base, seed) in [
        (generate_uncorrelated::<f64>(16, 11, (1, 1000), 0.5).unwrap(), 5),
        (generate_bounded_strongly_correlated::<f64>(12, 6, (1, 1000), 100, 0.5).unwrap(), 6),
    ] {
        let inst = stochknap::instances::assign_random_dispersion(&base, seed);
        let front = enumerate_pareto_front(&inst, FitnessKind::G).unwrap();
        let out = gsemo_run(&inst, &EvolutionConfig::new(FitnessKind::G, 1_000_000, seed)).unwrap();
        let objs: Vec<_> = out.archive.entries().iter().map(|e| e.objectives).collect();
        assert!(subset_of_front(&objs, &front));
    }

    let base = generate_uncorrelated::<f64>(16, 11, (1, 1000), 0.5).unwrap();
    let inst = assign_uniform_dispersion(&base, 25.0).unwrap();
    let front = enumerate_pareto_front(&inst, FitnessKind::G).unwrap();
    let out = gsemo_run(&inst, &EvolutionConfig::new(FitnessKind::G, 1_000_000, 5)).unwrap();
    let objs: Vec<_> = out.archive.entries().iter().map(|e| e.objectives).collect();
    assert!(subset_of_front(&objs, &front));
    assert_eq!(objs.len(), front.len());
}

#[test]
fn filtered_gsemo_keeps_the_best_estimates() {
    let base = generate_uncorrelated::<f64>(16, 103, (1, 1000), 0.5).unwrap();
    let inst = assign_uniform_dispersion(&base, 25.0).unwrap();
    for bound in [ProfitBound::Chebyshev, ProfitBound::hoeffding_for(&inst).unwrap()] {
        let kind = match bound {
            ProfitBound::Chebyshev => FitnessKind::G,
            ProfitBound::Hoeffding { .. } => FitnessKind::GDoublePrime,
        };
        let cfg = EvolutionConfig::new(kind, 300_000, 9).with_filtering(10_000, bound);
        let out = gsemo_run(&inst, &cfg).unwrap();
        let sols = out.archive.solutions();
        for alpha in [0.1, 0.01, 0.001] {
            let (_, got) = best_for_alpha(&inst, &sols, &bound, alpha).unwrap();
            assert_eq!(got, oracle_best_profit(&inst, &bound, alpha).unwrap(), "{alpha}");
        }
    }
}

#[test]
fn nsga2_front_lies_on_the_oracle_front() {
    let base = generate_uncorrelated::<f64>(16, 102, (1, 1000), 0.5).unwrap();
    let inst = assign_uniform_dispersion(&base, 25.0).unwrap();
    for kind in FitnessKind::ALL {
        let front = enumerate_pareto_front(&inst, kind).unwrap();
        let cfg = EvolutionConfig::new(kind, 1_000_000, 2).with_nsga2(20);
        let out = nsga2_run(&inst, &cfg).unwrap();
        let fronts = fast_nondominated_sort(&out.objectives).unwrap();
        let first: Vec<_> = fronts[0].iter().map(|&i| out.objectives[i]).collect();
        assert!(subset_of_front(&first, &front), "{kind}");
    }
}

#[test]
fn gsemo_best_mu_never_drops() {
    let base = generate_uncorrelated::<f64>(30, 2, (1, 1000), 0.5).unwrap();
    let inst = assign_uniform_dispersion(&base, 25.0).unwrap();
    let mut last = f64::MIN;
    for budget in [10u64, 100, 1_000, 10_000, 50_000] {
        let out = gsemo_run(&inst, &EvolutionConfig::new(FitnessKind::G, budget, 17)).unwrap();
        let best = out
            .archive
            .entries()
            .iter()
            .map(|e| e.objectives.first)
            .fold(f64::MIN, f64::max);
        assert!(best >= last);
        last = best;
    }
}
