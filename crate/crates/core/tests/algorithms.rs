use std::sync::Arc;

use rand::Rng as _;
use sos_core::algorithms::{
    inherit_skill, learn_pairwise_rmp, run_emt_et, run_mo_mfea, run_mo_mfea2, run_nsga2, run_nsga2_on_suite,
    Algorithm, AlgorithmConfig, RunResult,
};
use sos_core::pareto::{dominates_unchecked, nondominated_indices};
use sos_core::problems::SphereSurrogate;
use sos_core::rng::{Purpose, StreamSeed};
use sos_core::{ProblemSuite, TaskDefinition};

fn refs(v: &[Vec<f64>]) -> Vec<&[f64]> {
    v.iter().map(|x| x.as_slice()).collect()
}

fn cfg(seed: u64) -> AlgorithmConfig {
    AlgorithmConfig { seed, ..Default::default() }
}

fn small(seed: u64, evals: u64) -> AlgorithmConfig {
    AlgorithmConfig { seed, max_evals_per_task: evals, ..Default::default() }
}

fn assert_archives_nondominated(r: &RunResult) {
    for archive in &r.sos.archives {
        let objs = archive.objectives();
        assert!(!objs.is_empty());
        for a in &objs {
            for b in &objs {
                assert!(!dominates_unchecked(a, b));
            }
        }
    }
}

fn assert_same_result(a: &RunResult, b: &RunResult) {
    assert_eq!(a.evals_used, b.evals_used);
    assert_eq!(a.generations, b.generations);
    for (x, y) in a.sos.archives.iter().zip(&b.sos.archives) {
        assert_eq!(x.members(), y.members());
    }
}

#[test]
fn every_algorithm_respects_the_budget_and_returns_nondominated_archives() {
    for name in ["EO1", "IM2"] {
        let suite = ProblemSuite::named(name).unwrap();
        for algo in Algorithm::ALL {
            let s = suite.fresh();
            let r = algo.run(&s, &cfg(3)).unwrap();
            assert!(r.evals_used.iter().all(|&u| u == 10_000), "{algo} {name}: {:?}", r.evals_used);
            assert_eq!(s.evaluations(), r.evals_used, "counters agree with the tasks");
            assert_archives_nondominated(&r);
            for archive in &r.sos.archives {
                assert!(archive.len() <= 50);
            }
        }
    }
}

#[test]
fn same_seed_gives_identical_results() {
    let suite = ProblemSuite::named("EO3").unwrap();
    for algo in Algorithm::ALL {
        let a = algo.run(&suite.fresh(), &small(9, 2000)).unwrap();
        let b = algo.run(&suite.fresh(), &small(9, 2000)).unwrap();
        assert_same_result(&a, &b);
        assert_eq!(a.rmp_history, b.rmp_history);
        let c = algo.run(&suite.fresh(), &small(10, 2000)).unwrap();
        assert_ne!(a.sos.archives[0].members(), c.sos.archives[0].members(), "{algo}");
    }
}

#[test]
fn budget_of_one_population_returns_the_initial_front() {
    let suite = ProblemSuite::named("EO1").unwrap();
    let task = suite.task(0);
    let c = AlgorithmConfig { max_evals_per_task: 50, ..cfg(4) };
    let archive = run_nsga2(task, &c).unwrap();

    let mut rng = StreamSeed(4).stream(Purpose::Init, 0);
    let initial: Vec<Vec<f64>> = (0..50)
        .map(|_| {
            let u: Vec<f64> = (0..task.dim()).map(|_| rng.gen::<f64>()).collect();
            task.evaluate(&u).unwrap()
        })
        .collect();
    let mut expected: Vec<Vec<f64>> = nondominated_indices(&initial).into_iter().map(|i| initial[i].clone()).collect();
    let mut got: Vec<Vec<f64>> = archive.members().iter().map(|m| m.objectives.clone()).collect();
    expected.sort_by(|a, b| a[0].total_cmp(&b[0]));
    got.sort_by(|a, b| a[0].total_cmp(&b[0]));
    assert_eq!(got, expected);
}

#[test]
fn budget_below_one_population_is_rejected() {
    let suite = ProblemSuite::named("EO1").unwrap();
    let c = AlgorithmConfig { max_evals_per_task: 49, ..cfg(0) };
    assert!(run_nsga2(suite.task(0), &c).is_err());
    assert!(run_mo_mfea(&suite, &AlgorithmConfig { rmp: 1.5, ..cfg(0) }).is_err());
    assert!(run_emt_et(&suite, &AlgorithmConfig { transfer_count: 51, ..cfg(0) }).is_err());
}

#[test]
fn multitask_algorithms_need_two_tasks() {
    let one = ProblemSuite::new("one", vec![ProblemSuite::named("EO1").unwrap().task(0).clone()]).unwrap();
    assert!(run_mo_mfea(&one, &cfg(0)).is_err());
    assert!(run_mo_mfea2(&one, &cfg(0)).is_err());
    assert!(run_emt_et(&one, &cfg(0)).is_err());
    assert!(run_nsga2_on_suite(&one, &cfg(0)).is_ok());
}

#[test]
fn nsga2_finds_a_feasible_design_on_the_second_suite() {
    let suite = ProblemSuite::named("EO2").unwrap();
    let archive = run_nsga2(suite.task(0), &cfg(1)).unwrap();
    let best = archive.members().iter().map(|m| m.objectives[1]).fold(f64::INFINITY, f64::min);
    assert_eq!(best, 0.0);
}

#[test]
fn disabled_transfer_reproduces_the_baseline_trace() {
    let suite = ProblemSuite::named("IM1").unwrap();
    let traced = AlgorithmConfig { trace_generations: 3, ..cfg(5) };
    let base = run_nsga2_on_suite(&suite.fresh(), &traced).unwrap();
    let mfea = run_mo_mfea(&suite.fresh(), &AlgorithmConfig { rmp: 0.0, ..traced.clone() }).unwrap();
    let et = run_emt_et(&suite.fresh(), &AlgorithmConfig { transfer_count: 0, ..traced }).unwrap();
    assert_eq!(base.trace.len(), 9);
    assert!(base.trace.iter().all(|t| t.parents.len() == 50 && t.survivors.len() == 50));
    assert_eq!(mfea.trace, base.trace);
    assert_eq!(et.trace, base.trace);
    assert_same_result(&mfea, &base);
    assert_same_result(&et, &base);
}

#[test]
fn no_transfer_matches_the_baseline_over_many_seeds() {
    let suite = ProblemSuite::named("EO1").unwrap();
    for seed in 0..20 {
        let c = AlgorithmConfig { rmp: 0.0, ..small(seed, 1000) };
        let base = run_nsga2_on_suite(&suite.fresh(), &c).unwrap();
        let mfea = run_mo_mfea(&suite.fresh(), &c).unwrap();
        assert_same_result(&mfea, &base);
    }
}

#[test]
fn inter_task_children_split_evenly_between_parent_tasks() {
    let mut rng = StreamSeed(6).stream(Purpose::Transfer, 0);
    let n = 100_000;
    let first = (0..n).filter(|_| inherit_skill(0, 1, &mut rng).0 == 0).count();
    let share = first as f64 / n as f64;
    assert!((share - 0.5).abs() < 0.01, "{share}");
}

#[test]
fn full_transfer_still_respects_budgets() {
    let suite = ProblemSuite::named("IM3").unwrap();
    let r = run_mo_mfea(&suite, &AlgorithmConfig { rmp: 1.0, ..small(7, 3000) }).unwrap();
    assert_eq!(r.evals_used, vec![3000; 3]);
    assert_archives_nondominated(&r);
}

#[test]
fn explicit_transfer_charges_migrants_to_the_receiver() {
    let suite = ProblemSuite::named("IM1").unwrap();
    let c = AlgorithmConfig { record_generations: true, transfer_count: 10, transfer_interval: 1, ..cfg(8) };
    let r = run_emt_et(&suite, &c).unwrap();
    let mut previous = vec![50u64; 3];
    let log = &r.generation_log;
    for snap in &log[..log.len() - 1] {
        for t in 0..3 {
            assert_eq!(snap.evals_used[t] - previous[t], 50 + 2 * 10, "generation {}", snap.generation);
        }
        previous = snap.evals_used.clone();
    }
    assert_eq!(log.last().unwrap().evals_used, vec![10_000; 3]);
}

#[test]
fn archive_objectives_are_rederivable_from_decisions() {
    let suite = ProblemSuite::named("EO3").unwrap();
    for algo in Algorithm::ALL {
        let r = algo.run(&suite.fresh(), &small(2, 2000)).unwrap();
        for (k, archive) in r.sos.archives.iter().enumerate() {
            let task = suite.task(k);
            for m in archive.members() {
                assert_eq!(task.decode(&m.decision.unified).unwrap(), m.decision.native);
                assert_eq!(task.objectives_at(&m.decision.native).unwrap(), m.objectives, "{algo}");
                assert_eq!(m.skill_factor, k);
            }
        }
    }
}

#[test]
fn no_new_first_front_member_is_dominated_by_the_previous_one() {
    let suite = ProblemSuite::named("IM2").unwrap();
    for algo in Algorithm::ALL {
        let c = AlgorithmConfig { record_generations: true, ..small(11, 3000) };
        let r = algo.run(&suite.fresh(), &c).unwrap();
        for w in r.generation_log.windows(2) {
            for t in 0..3 {
                for new in &w[1].fronts[t] {
                    assert!(w[0].fronts[t].iter().all(|old| !dominates_unchecked(old, new)), "{algo}");
                }
            }
        }
    }
}

#[test]
fn learned_transfer_matrices_are_symmetric_with_unit_diagonal() {
    let suite = ProblemSuite::named("EO3").unwrap();
    let r = run_mo_mfea2(&suite, &small(12, 2000)).unwrap();
    assert_eq!(r.rmp_history.len(), r.generations);
    for m in &r.rmp_history {
        assert!(m.is_valid());
        for i in 0..3 {
            assert_eq!(m.get(i, i), 1.0);
            for j in 0..3 {
                assert_eq!(m.get(i, j), m.get(j, i));
                assert!((0.0..=1.0).contains(&m.get(i, j)));
            }
        }
    }
}

#[test]
fn transfer_learning_extremes() {
    let mut rng = StreamSeed(13).stream(Purpose::Metrics, 0);
    let sample = |rng: &mut sos_core::rng::Rng, lo: f64, hi: f64| -> Vec<Vec<f64>> {
        (0..50).map(|_| (0..3).map(|_| rng.gen_range(lo..hi)).collect()).collect()
    };
    let a = sample(&mut rng, 0.0, 0.1);
    let far = sample(&mut rng, 0.9, 1.0);
    assert_eq!(learn_pairwise_rmp(&refs(&a), &refs(&a)), 1.0);
    assert!(learn_pairwise_rmp(&refs(&a), &refs(&far)) < 0.05);
}

#[test]
fn external_problems_run_through_every_optimizer() {
    let make = |upper: f64| {
        TaskDefinition::external("sphere", Arc::new(SphereSurrogate { dim: 4, lower: -1.0, upper })).unwrap()
    };
    let suite = ProblemSuite::new("surrogate", vec![make(2.0), make(3.0)]).unwrap();
    for algo in Algorithm::ALL {
        let r = algo.run(&suite.fresh(), &small(14, 1000)).unwrap();
        assert_eq!(r.evals_used, vec![1000, 1000]);
        assert_archives_nondominated(&r);
    }
}
