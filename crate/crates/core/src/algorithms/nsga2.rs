//! Single-task NSGA-II baseline.

use super::engine::Engine;
use super::{Algorithm, AlgorithmConfig, RunResult};
use crate::error::Result;
use crate::pareto::ParetoArchive;
use crate::problems::{ProblemSuite, TaskDefinition};

/// NSGA-II on one task until its budget is spent. Returns the final front.
pub fn run_nsga2(task: &TaskDefinition, cfg: &AlgorithmConfig) -> Result<ParetoArchive> {
    let engine = Engine::init(vec![task], task.dim(), cfg)?;
    let result = evolve_independently(engine)?;
    Ok(result.sos.archives.into_iter().next().expect("one task"))
}

/// Independent NSGA-II runs on every task of a suite, in the suite's unified
/// space. Task `k` uses the same random streams that the multitask optimizers
/// give task `k`.
pub fn run_nsga2_on_suite(suite: &ProblemSuite, cfg: &AlgorithmConfig) -> Result<RunResult> {
    let engine = Engine::init(suite.tasks().iter().collect(), suite.d_max(), cfg)?;
    evolve_independently(engine)
}

fn evolve_independently(mut engine: Engine<'_>) -> Result<RunResult> {
    while engine.any_active() {
        for t in 0..engine.num_tasks() {
            if engine.remaining(t) == 0 {
                continue;
            }
            let children = engine.intra_offspring(t);
            let evaluated = children
                .into_iter()
                .map(|c| engine.evaluate(t, c))
                .collect::<Result<Vec<_>>>()?;
            engine.select(t, evaluated);
        }
        engine.end_generation();
    }
    engine.finish(Algorithm::Nsga2)
}
