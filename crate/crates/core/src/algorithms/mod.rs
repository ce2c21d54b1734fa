//! Optimizers producing a [`SetOfParetoSets`].
//!
//! | Name | Transfer |
//! |---|---|
//! | `nsga2` | none: one independent NSGA-II per task |
//! | `mo-mfea` | implicit, inter-task crossover with a fixed probability `rmp` |
//! | `mo-mfea2` | implicit, pairwise `rmp` relearned every generation |
//! | `emt-et` | explicit, elite migration with re-evaluation |
//!
//! Budgets and population sizes are per task. Every algorithm draws its random
//! numbers from per-task streams split off the run seed (see [`crate::rng`]),
//! so an algorithm whose transfer is switched off makes exactly the same
//! decisions as the NSGA-II baseline.

mod emt_et;
mod engine;
mod mfea;
mod nsga2;
mod rmp;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use emt_et::run_emt_et;
pub use mfea::{inherit_skill, run_mo_mfea, run_mo_mfea2};
pub use nsga2::{run_nsga2, run_nsga2_on_suite};
pub use rmp::{learn_pairwise_rmp, learn_rmp_matrix, RmpMatrix, RMP_GRID_POINTS, VARIANCE_FLOOR};

use crate::error::{Error, Result};
use crate::pareto::SetOfParetoSets;
use crate::problems::ProblemSuite;
use crate::variation::OperatorConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    Nsga2,
    MoMfea,
    MoMfea2,
    EmtEt,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::MoMfea,
        Algorithm::MoMfea2,
        Algorithm::EmtEt,
        Algorithm::Nsga2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Nsga2 => "nsga2",
            Algorithm::MoMfea => "mo-mfea",
            Algorithm::MoMfea2 => "mo-mfea2",
            Algorithm::EmtEt => "emt-et",
        }
    }

    pub fn is_multitask(self) -> bool {
        self != Algorithm::Nsga2
    }

    pub fn run(self, suite: &ProblemSuite, cfg: &AlgorithmConfig) -> Result<RunResult> {
        match self {
            Algorithm::Nsga2 => run_nsga2_on_suite(suite, cfg),
            Algorithm::MoMfea => run_mo_mfea(suite, cfg),
            Algorithm::MoMfea2 => run_mo_mfea2(suite, cfg),
            Algorithm::EmtEt => run_emt_et(suite, cfg),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                Error::Usage(format!(
                    "unknown algorithm `{s}`, expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlgorithmConfig {
    pub pop_per_task: usize,
    pub max_evals_per_task: u64,
    /// Inter-task mating probability of MO-MFEA.
    pub rmp: f64,
    /// Elites each task sends to every other task per migration (EMT-ET).
    pub transfer_count: usize,
    /// Generations between migrations (EMT-ET).
    pub transfer_interval: usize,
    pub operators: OperatorConfig,
    pub seed: u64,
    /// Keep a front-0 snapshot of every task after every generation.
    pub record_generations: bool,
    /// Record parent choices and survivors for this many leading generations.
    pub trace_generations: usize,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        Self {
            pop_per_task: 50,
            max_evals_per_task: 10_000,
            rmp: 0.3,
            transfer_count: 10,
            transfer_interval: 1,
            operators: OperatorConfig::default(),
            seed: 0,
            record_generations: false,
            trace_generations: 0,
        }
    }
}

impl AlgorithmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_per_task < 2 || self.pop_per_task % 2 != 0 {
            return Err(Error::Config(format!(
                "population per task must be even and at least 2, got {}",
                self.pop_per_task
            )));
        }
        if self.max_evals_per_task < self.pop_per_task as u64 {
            return Err(Error::Config(format!(
                "budget {} cannot cover the initial population of {}",
                self.max_evals_per_task, self.pop_per_task
            )));
        }
        if !(0.0..=1.0).contains(&self.rmp) {
            return Err(Error::Config(format!("rmp {} outside [0, 1]", self.rmp)));
        }
        if self.transfer_interval == 0 {
            return Err(Error::Config("transfer interval must be positive".into()));
        }
        if self.transfer_count > self.pop_per_task {
            return Err(Error::Config(format!(
                "transfer count {} exceeds population per task {}",
                self.transfer_count, self.pop_per_task
            )));
        }
        self.operators.validate()
    }
}

/// Front-0 objective vectors of every task after one generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationSnapshot {
    pub generation: usize,
    pub evals_used: Vec<u64>,
    pub fronts: Vec<Vec<Vec<f64>>>,
}

/// Selection decisions of one task in one generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationTrace {
    pub generation: usize,
    pub task: usize,
    /// Indices into the task's population of every tournament winner, in order.
    pub parents: Vec<usize>,
    /// Unified vectors of the survivors of environmental selection, in order.
    pub survivors: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub sos: SetOfParetoSets,
    pub evals_used: Vec<u64>,
    pub generations: usize,
    pub generation_log: Vec<GenerationSnapshot>,
    pub trace: Vec<GenerationTrace>,
    /// Learned transfer matrices, one per generation (MO-MFEA-II only).
    pub rmp_history: Vec<RmpMatrix>,
    pub wall_time: Duration,
}

pub(crate) fn require_multitask(suite: &ProblemSuite, algo: Algorithm) -> Result<()> {
    if suite.num_tasks() < 2 {
        return Err(Error::Config(format!(
            "{algo} needs at least two tasks, suite {} has {}",
            suite.name(),
            suite.num_tasks()
        )));
    }
    Ok(())
}
