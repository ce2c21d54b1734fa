//! Explicit transfer: independent NSGA-II populations that exchange elites.
//!
//! Every `transfer_interval` generations each task sends its `transfer_count`
//! best members (by rank, then crowding) to every other task. Migrants keep
//! their unified coordinates, are decoded and re-evaluated on the receiving
//! task, are charged to that task's budget, and compete in its next
//! environmental selection together with its own offspring.

use super::engine::Engine;
use super::{require_multitask, Algorithm, AlgorithmConfig, RunResult};
use crate::error::Result;
use crate::problems::ProblemSuite;

pub fn run_emt_et(suite: &ProblemSuite, cfg: &AlgorithmConfig) -> Result<RunResult> {
    require_multitask(suite, Algorithm::EmtEt)?;
    let mut engine = Engine::init(suite.tasks().iter().collect(), suite.d_max(), cfg)?;
    let k = engine.num_tasks();

    while engine.any_active() {
        let mut migrants: Vec<Vec<Vec<f64>>> = vec![Vec::new(); k];
        if cfg.transfer_count > 0 && engine.generation % cfg.transfer_interval == 0 {
            for source in 0..k {
                let elites = engine.elites(source, cfg.transfer_count);
                for dest in (0..k).filter(|&d| d != source) {
                    migrants[dest].extend(
                        elites
                            .iter()
                            .map(|&i| engine.subpops[source][i].decision.unified.clone()),
                    );
                }
            }
        }

        for t in 0..k {
            if engine.remaining(t) == 0 {
                continue;
            }
            let children = engine.intra_offspring(t);
            let mut newcomers = Vec::with_capacity(children.len() + migrants[t].len());
            for c in children {
                newcomers.push(engine.evaluate(t, c)?);
            }
            for m in std::mem::take(&mut migrants[t]) {
                if engine.remaining(t) == 0 {
                    break;
                }
                newcomers.push(engine.evaluate(t, m)?);
            }
            engine.select(t, newcomers);
        }
        engine.end_generation();
    }
    engine.finish(Algorithm::EmtEt)
}
