//! Experiment configuration read from a TOML document.
//!
//! ```toml
//! [suite]
//! names = ["EO3", "IM1"]
//! overrides = [{ suite = "EO3", task = 1, key = "P", value = 7000.0 }]
//!
//! [algorithm]
//! names = ["mo-mfea", "nsga2"]
//! pop_per_task = 50
//!
//! [operators]
//! eta_c = 20.0
//!
//! [batch]
//! runs = 20
//! base_seed = 0
//!
//! [sweep]
//! suite = "EO3"
//! param = "P"
//! values = [6000.0, 7000.0, 8000.0]
//! ```
//!
//! Every key is optional; omitted keys take the published experimental
//! defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sos_core::algorithms::{Algorithm, AlgorithmConfig};
use sos_core::problems::{ProblemSuite, SUITE_NAMES};
use sos_core::variation::OperatorConfig;

use crate::RunnerError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: SuiteSection,
    pub algorithm: AlgorithmSection,
    pub operators: OperatorConfig,
    pub batch: BatchSection,
    pub sweep: SweepSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteSection {
    pub names: Vec<String>,
    pub overrides: Vec<ParamOverride>,
}

impl Default for SuiteSection {
    fn default() -> Self {
        Self {
            names: SUITE_NAMES.iter().map(|s| s.to_string()).collect(),
            overrides: Vec::new(),
        }
    }
}

/// Replaces one parameter of one task (1-based) of a named suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverride {
    pub suite: String,
    pub task: usize,
    pub key: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgorithmSection {
    pub names: Vec<String>,
    pub pop_per_task: usize,
    pub max_evals_per_task: u64,
    pub rmp: f64,
    pub transfer_count: usize,
    pub transfer_interval: usize,
}

impl Default for AlgorithmSection {
    fn default() -> Self {
        let d = AlgorithmConfig::default();
        Self {
            names: Algorithm::ALL.iter().map(|a| a.name().to_string()).collect(),
            pop_per_task: d.pop_per_task,
            max_evals_per_task: d.max_evals_per_task,
            rmp: d.rmp,
            transfer_count: d.transfer_count,
            transfer_interval: d.transfer_interval,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatchSection {
    pub runs: usize,
    pub base_seed: u64,
    pub out: PathBuf,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    /// Suites whose RMMD matrices are reported.
    pub rmmd_suites: Vec<String>,
    /// Optimizer whose Pareto sets feed the RMMD matrices.
    pub rmmd_algorithm: String,
}

impl Default for BatchSection {
    fn default() -> Self {
        Self {
            runs: 20,
            base_seed: 0,
            out: PathBuf::from("results"),
            workers: 0,
            rmmd_suites: vec!["EO3".into(), "IM1".into()],
            rmmd_algorithm: Algorithm::MoMfea.name().into(),
        }
    }
}

/// One-parameter grid over a template task. Each grid value becomes a task of
/// one multitask suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub suite: String,
    /// 1-based task of `suite` used as the template.
    pub task: usize,
    pub param: String,
    pub values: Vec<f64>,
    pub algorithm: String,
    /// 1-based decision variables whose per-task means are reported.
    pub variables: Vec<usize>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            suite: "EO3".into(),
            task: 1,
            param: "P".into(),
            values: vec![6000.0, 7000.0, 8000.0],
            algorithm: Algorithm::MoMfea2.name().into(),
            variables: vec![1, 2],
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, RunnerError> {
        let cfg: Self = toml::from_str(text).map_err(|e| RunnerError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, RunnerError> {
        let text = std::fs::read_to_string(path).map_err(|e| RunnerError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), RunnerError> {
        if self.batch.runs == 0 {
            return Err(RunnerError::Config("runs must be at least 1".into()));
        }
        for name in &self.suite.names {
            ProblemSuite::named(name)?;
        }
        self.algorithms()?;
        self.algorithm_config(0).validate()?;
        for o in &self.suite.overrides {
            self.suite_named(&o.suite)?;
        }
        Ok(())
    }

    pub fn algorithms(&self) -> Result<Vec<Algorithm>, RunnerError> {
        if self.algorithm.names.is_empty() {
            return Err(RunnerError::Config("no algorithm selected".into()));
        }
        Ok(self
            .algorithm
            .names
            .iter()
            .map(|n| n.parse::<Algorithm>())
            .collect::<Result<_, _>>()?)
    }

    pub fn algorithm_config(&self, seed: u64) -> AlgorithmConfig {
        AlgorithmConfig {
            pop_per_task: self.algorithm.pop_per_task,
            max_evals_per_task: self.algorithm.max_evals_per_task,
            rmp: self.algorithm.rmp,
            transfer_count: self.algorithm.transfer_count,
            transfer_interval: self.algorithm.transfer_interval,
            operators: self.operators,
            seed,
            ..AlgorithmConfig::default()
        }
    }

    /// A named suite with this configuration's overrides applied.
    pub fn suite_named(&self, name: &str) -> Result<ProblemSuite, RunnerError> {
        let mut suite = ProblemSuite::named(name)?;
        for o in self.suite.overrides.iter().filter(|o| o.suite.eq_ignore_ascii_case(name)) {
            if o.task == 0 {
                return Err(RunnerError::Config("override task ids start at 1".into()));
            }
            suite = suite.with_override(o.task - 1, &o.key, o.value)?;
        }
        Ok(suite)
    }

    pub fn suites(&self) -> Result<Vec<ProblemSuite>, RunnerError> {
        self.suite.names.iter().map(|n| self.suite_named(n)).collect()
    }

    /// The multitask suite built from the sweep grid.
    pub fn sweep_suite(&self) -> Result<ProblemSuite, RunnerError> {
        let s = &self.sweep;
        let base = self.suite_named(&s.suite)?;
        if s.task == 0 || s.task > base.num_tasks() {
            return Err(RunnerError::Config(format!(
                "sweep template task {} not in suite {}",
                s.task, s.suite
            )));
        }
        let name = format!("{}-{}-sweep", base.name(), s.param);
        Ok(ProblemSuite::from_grid(name, base.task(s.task - 1), &s.param, &s.values)?)
    }
}
