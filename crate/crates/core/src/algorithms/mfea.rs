//! Multifactorial optimizers with implicit transfer through crossover.
//!
//! The unified population holds `pop_per_task` individuals per skill factor.
//! Each task fills its offspring quota pair by pair. For every pair a mate
//! task is drawn uniformly from all tasks (as random pairing in a population
//! of equal skill groups would); if it differs from the pair's own task and a
//! draw falls below that pair's transfer probability, the two tasks' parents
//! are recombined and each child takes one parent's skill factor at random.
//! Otherwise the pair mates within its own task exactly as NSGA-II does.
//! Each child is evaluated only on its skill factor's task and every skill
//! group is truncated separately.

use rand::Rng as _;

use super::engine::Engine;
use super::rmp::{learn_rmp_matrix, RmpMatrix};
use super::{require_multitask, Algorithm, AlgorithmConfig, RunResult};
use crate::error::Result;
use crate::problems::ProblemSuite;
use crate::rng::{Purpose, Rng};
use crate::variation::{polynomial_mutation, sbx_crossover};

/// MO-MFEA with the scalar transfer probability `cfg.rmp`.
pub fn run_mo_mfea(suite: &ProblemSuite, cfg: &AlgorithmConfig) -> Result<RunResult> {
    require_multitask(suite, Algorithm::MoMfea)?;
    let fixed = RmpMatrix::constant(suite.num_tasks(), cfg.rmp);
    evolve(suite, cfg, Algorithm::MoMfea, |_| fixed.clone())
}

/// MO-MFEA-II: the transfer matrix is relearned from the current skill groups
/// at the start of every generation.
pub fn run_mo_mfea2(suite: &ProblemSuite, cfg: &AlgorithmConfig) -> Result<RunResult> {
    require_multitask(suite, Algorithm::MoMfea2)?;
    evolve(suite, cfg, Algorithm::MoMfea2, |engine| {
        let views: Vec<Vec<&[f64]>> = engine
            .subpops
            .iter()
            .map(|pop| pop.iter().map(|ind| ind.decision.unified.as_slice()).collect())
            .collect();
        learn_rmp_matrix(&views)
    })
}

struct Budgeter {
    free: Vec<u64>,
}

impl Budgeter {
    /// Reserves one evaluation on `preferred`, else on `fallback`.
    fn reserve(&mut self, preferred: usize, fallback: usize) -> Option<usize> {
        for t in [preferred, fallback] {
            if self.free[t] > 0 {
                self.free[t] -= 1;
                return Some(t);
            }
        }
        None
    }
}

fn evolve<F>(
    suite: &ProblemSuite,
    cfg: &AlgorithmConfig,
    algorithm: Algorithm,
    mut transfer_matrix: F,
) -> Result<RunResult>
where
    F: FnMut(&Engine<'_>) -> RmpMatrix,
{
    let mut engine = Engine::init(suite.tasks().iter().collect(), suite.d_max(), cfg)?;
    let mut transfer: Rng = engine.seed.stream(Purpose::Transfer, 0);
    let k = engine.num_tasks();

    while engine.any_active() {
        let rmp = transfer_matrix(&engine);
        if algorithm == Algorithm::MoMfea2 {
            engine.rmp_history.push(rmp.clone());
        }
        let mut budget = Budgeter {
            free: (0..k).map(|t| engine.remaining(t)).collect(),
        };
        // (skill factor, unified) in creation order.
        let mut children: Vec<(usize, Vec<f64>)> = Vec::new();

        for t in 0..k {
            let quota = budget.free[t].min(cfg.pop_per_task as u64) as usize;
            let mut produced = 0;
            while produced < quota {
                let mate = transfer.gen_range(0..k);
                let draw: f64 = transfer.gen();
                if mate != t && draw < rmp.get(t, mate) {
                    let pair = inter_pair(&mut engine, t, mate, &mut transfer);
                    for child in pair {
                        if produced == quota {
                            break;
                        }
                        produced += 1;
                        let (own, other) = inherit_skill(t, mate, &mut transfer);
                        if let Some(skill) = budget.reserve(own, other) {
                            children.push((skill, child));
                        }
                    }
                } else {
                    for child in engine.intra_pair(t) {
                        if produced == quota {
                            break;
                        }
                        produced += 1;
                        if budget.reserve(t, t).is_some() {
                            children.push((t, child));
                        }
                    }
                }
            }
        }

        let mut offspring = vec![Vec::new(); k];
        for (skill, unified) in children {
            offspring[skill].push(engine.evaluate(skill, unified)?);
        }
        for (t, newcomers) in offspring.into_iter().enumerate() {
            engine.select(t, newcomers);
        }
        engine.end_generation();
    }
    engine.finish(algorithm)
}

/// Skill factor of a child of parents from `task` and `mate`: either task
/// with equal probability. Returns `(inherited, other)`.
pub fn inherit_skill(task: usize, mate: usize, rng: &mut Rng) -> (usize, usize) {
    if rng.gen_bool(0.5) {
        (task, mate)
    } else {
        (mate, task)
    }
}

/// Mutated SBX children of one parent from each of two tasks. All draws come
/// from the transfer stream.
fn inter_pair(engine: &mut Engine<'_>, task: usize, mate: usize, rng: &mut Rng) -> [Vec<f64>; 2] {
    let i = Engine::tournament(&engine.subpops[task], rng);
    let j = Engine::tournament(&engine.subpops[mate], rng);
    engine.record_parent(task, i);
    let ops = &engine.cfg.operators;
    let (c1, c2) = sbx_crossover(
        &engine.subpops[task][i].decision.unified,
        &engine.subpops[mate][j].decision.unified,
        ops,
        rng,
    );
    [polynomial_mutation(&c1, ops, rng), polynomial_mutation(&c2, ops, rng)]
}
