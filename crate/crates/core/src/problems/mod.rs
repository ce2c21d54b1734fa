//! Task definitions and problem suites.
//!
//! A [`TaskDefinition`] is one parameterized bi-objective problem with a box of
//! native bounds. Algorithms never see native coordinates directly: they work
//! in the unified cube `[0, 1]^d_max` and [`TaskDefinition::decode`] maps the
//! first `d_k` coordinates affinely onto the task's box.

pub mod engineering;
pub mod external;
pub mod inventory;
mod suites;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use engineering::{
    eval_eo1, eval_eo2, eval_eo3, welded_beam_response, BeamResponse, HatchParams, TrussParams,
    WeldedBeamParams,
};
pub use external::{BlackBoxProblem, SphereSurrogate};
pub use inventory::{eval_im, inventory_objectives, InventoryParams};
pub use suites::SUITE_NAMES;

use crate::error::{Error, Result};
use crate::pareto::{DecisionVector, Individual};

/// Unified coordinates may stray outside `[0, 1]` by this much before decoding
/// fails; such values are clamped and counted.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Eo1,
    Eo2,
    Eo3,
    Inventory,
    External,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Eo1 => "EO1",
            Family::Eo2 => "EO2",
            Family::Eo3 => "EO3",
            Family::Inventory => "IM",
            Family::External => "EXTERNAL",
        };
        f.write_str(s)
    }
}

/// One column of a parameter table: named real parameters of a task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSetting {
    pub name: String,
    pub params: BTreeMap<String, f64>,
}

impl TaskSetting {
    pub fn new(name: impl Into<String>, params: impl IntoIterator<Item = (String, f64)>) -> Self {
        Self {
            name: name.into(),
            params: params.into_iter().collect(),
        }
    }

    /// The named parameter, which must be present, finite and positive.
    pub fn require(&self, key: &str) -> Result<f64> {
        match self.params.get(key) {
            Some(&v) if v.is_finite() && v > 0.0 => Ok(v),
            Some(&v) => Err(Error::Config(format!(
                "parameter `{key}` of {} must be positive, got {v}",
                self.name
            ))),
            None => Err(Error::Config(format!(
                "parameter `{key}` missing from {}",
                self.name
            ))),
        }
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }
}

#[derive(Clone, Debug)]
enum Model {
    Truss(TrussParams),
    Hatch(HatchParams),
    Beam(WeldedBeamParams),
    Inventory(InventoryParams),
    External(Arc<dyn BlackBoxProblem>),
}

impl Model {
    fn build(family: Family, setting: &TaskSetting) -> Result<Self> {
        Ok(match family {
            Family::Eo1 => Model::Truss(TrussParams::from_setting(setting)?),
            Family::Eo2 => Model::Hatch(HatchParams::from_setting(setting)?),
            Family::Eo3 => Model::Beam(WeldedBeamParams::from_setting(setting)?),
            Family::Inventory => Model::Inventory(InventoryParams::from_setting(setting)?),
            Family::External => {
                return Err(Error::Config(
                    "external tasks are built with TaskDefinition::external".into(),
                ))
            }
        })
    }

    fn family(&self) -> Family {
        match self {
            Model::Truss(_) => Family::Eo1,
            Model::Hatch(_) => Family::Eo2,
            Model::Beam(_) => Family::Eo3,
            Model::Inventory(_) => Family::Inventory,
            Model::External(_) => Family::External,
        }
    }

    fn bounds(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let (lower, upper) = match self {
            Model::Truss(p) => p.bounds(),
            Model::Hatch(_) => (
                engineering::HATCH_LOWER.to_vec(),
                engineering::HATCH_UPPER.to_vec(),
            ),
            Model::Beam(_) => (
                engineering::BEAM_LOWER.to_vec(),
                engineering::BEAM_UPPER.to_vec(),
            ),
            Model::Inventory(p) => p.bounds()?,
            Model::External(p) => p.bounds(),
        };
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::Config("bounds must be nonempty and of equal length".into()));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(upper[i] > lower[i])) {
            return Err(Error::Config(format!(
                "variable {} has nonpositive span [{}, {}]",
                i + 1,
                lower[i],
                upper[i]
            )));
        }
        Ok((lower, upper))
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            Model::Truss(p) => eval_eo1(x, p),
            Model::Hatch(p) => eval_eo2(x, p),
            Model::Beam(p) => eval_eo3(x, p),
            Model::Inventory(p) => eval_im(x, p),
            Model::External(p) => p.evaluate(x).map_err(|message| Error::External {
                name: p.name().to_string(),
                message,
            }),
        }
    }
}

/// One bi-objective task: a family, its setting, and the native box.
///
/// Holds an evaluation counter that is incremented atomically by every call to
/// [`evaluate`](Self::evaluate).
#[derive(Debug)]
pub struct TaskDefinition {
    setting: TaskSetting,
    model: Model,
    lower: Vec<f64>,
    upper: Vec<f64>,
    num_objectives: usize,
    evaluations: AtomicU64,
    clamp_warnings: AtomicU64,
}

impl Clone for TaskDefinition {
    fn clone(&self) -> Self {
        Self {
            setting: self.setting.clone(),
            model: self.model.clone(),
            lower: self.lower.clone(),
            upper: self.upper.clone(),
            num_objectives: self.num_objectives,
            evaluations: AtomicU64::new(self.evaluations()),
            clamp_warnings: AtomicU64::new(self.clamp_warnings()),
        }
    }
}

impl TaskDefinition {
    pub fn new(family: Family, setting: TaskSetting) -> Result<Self> {
        let model = Model::build(family, &setting)?;
        Self::from_model(model, setting, 2)
    }

    pub fn external(name: impl Into<String>, problem: Arc<dyn BlackBoxProblem>) -> Result<Self> {
        let m = problem.num_objectives();
        if m == 0 {
            return Err(Error::Config("external problem declares no objectives".into()));
        }
        if problem.dim() == 0 {
            return Err(Error::Config("external problem declares no variables".into()));
        }
        let setting = TaskSetting::new(name, std::iter::empty());
        let task = Self::from_model(Model::External(problem), setting, m)?;
        if task.lower.len() != task.model_dim() {
            return Err(Error::Config("external bounds disagree with declared dim".into()));
        }
        Ok(task)
    }

    fn from_model(model: Model, setting: TaskSetting, num_objectives: usize) -> Result<Self> {
        let (lower, upper) = model.bounds()?;
        Ok(Self {
            setting,
            model,
            lower,
            upper,
            num_objectives,
            evaluations: AtomicU64::new(0),
            clamp_warnings: AtomicU64::new(0),
        })
    }

    fn model_dim(&self) -> usize {
        match &self.model {
            Model::External(p) => p.dim(),
            _ => self.lower.len(),
        }
    }

    pub fn family(&self) -> Family {
        self.model.family()
    }

    pub fn setting(&self) -> &TaskSetting {
        &self.setting
    }

    pub fn name(&self) -> &str {
        &self.setting.name
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn num_objectives(&self) -> usize {
        self.num_objectives
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    /// Number of unified coordinates clamped back into `[0, 1]` while decoding.
    pub fn clamp_warnings(&self) -> u64 {
        self.clamp_warnings.load(Ordering::Relaxed)
    }

    /// A copy with both counters reset to zero.
    pub fn fresh(&self) -> Self {
        let task = self.clone();
        task.evaluations.store(0, Ordering::Relaxed);
        task.clamp_warnings.store(0, Ordering::Relaxed);
        task
    }

    /// The same family with one parameter replaced; bounds are rederived.
    pub fn with_param(&self, key: &str, value: f64) -> Result<Self> {
        if self.family() == Family::External {
            return Err(Error::Config("external tasks have no overridable parameters".into()));
        }
        let mut setting = self.setting.clone();
        setting.params.insert(key.to_string(), value);
        let task = Self::new(self.family(), setting)?;
        Ok(task)
    }

    /// Maps the first `dim()` unified coordinates onto the native box.
    pub fn decode(&self, unified: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        if unified.len() < d {
            return Err(Error::Usage(format!(
                "unified vector has {} coordinates, task needs {d}",
                unified.len()
            )));
        }
        let mut native = Vec::with_capacity(d);
        for i in 0..d {
            let mut u = unified[i];
            if !(0.0..=1.0).contains(&u) {
                if u.is_finite() && u >= -CLAMP_TOLERANCE && u <= 1.0 + CLAMP_TOLERANCE {
                    self.clamp_warnings.fetch_add(1, Ordering::Relaxed);
                    u = u.clamp(0.0, 1.0);
                } else {
                    return Err(Error::Domain(format!(
                        "unified coordinate {} = {u} outside [0, 1]",
                        i + 1
                    )));
                }
            }
            let (lo, hi) = (self.lower[i], self.upper[i]);
            native.push((lo * (1.0 - u) + hi * u).clamp(lo, hi));
        }
        Ok(native)
    }

    /// Inverse of [`decode`](Self::decode) for a native vector of length `dim()`.
    pub fn encode(&self, native: &[f64]) -> Vec<f64> {
        native
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&x, (&lo, &hi))| ((x - lo) / (hi - lo)).clamp(0.0, 1.0))
            .collect()
    }

    /// Objectives at a native vector. Does not touch the evaluation counter.
    pub fn objectives_at(&self, native: &[f64]) -> Result<Vec<f64>> {
        let f = self.model.evaluate(native)?;
        if f.len() != self.num_objectives {
            return Err(Error::Domain(format!(
                "expected {} objectives, got {}",
                self.num_objectives,
                f.len()
            )));
        }
        if let Some(v) = f.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("nonfinite objective value {v}")));
        }
        Ok(f)
    }

    /// Decodes `unified`, evaluates it, and counts one evaluation.
    pub fn evaluate(&self, unified: &[f64]) -> Result<Vec<f64>> {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        let native = self.decode(unified)?;
        self.objectives_at(&native)
    }

    /// Evaluates `unified` and packages the result as an individual of task
    /// `skill_factor`. Counts one evaluation.
    pub fn individual(&self, skill_factor: usize, unified: Vec<f64>) -> Result<Individual> {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        let native = self.decode(&unified)?;
        let objectives = self.objectives_at(&native)?;
        Ok(Individual::new(
            DecisionVector { unified, native },
            objectives,
            skill_factor,
        ))
    }
}

/// Native bounds of a task.
pub fn bounds_for(task: &TaskDefinition) -> (Vec<f64>, Vec<f64>) {
    (task.lower.clone(), task.upper.clone())
}

/// `K` related tasks sharing the unified search space `[0, 1]^d_max`.
#[derive(Clone, Debug)]
pub struct ProblemSuite {
    name: String,
    tasks: Vec<TaskDefinition>,
}

impl ProblemSuite {
    pub fn new(name: impl Into<String>, tasks: Vec<TaskDefinition>) -> Result<Self> {
        if tasks.is_empty() {
            return Err(Error::Config("a suite needs at least one task".into()));
        }
        let m = tasks[0].num_objectives();
        if tasks.iter().any(|t| t.num_objectives() != m) {
            return Err(Error::Config("all tasks of a suite must share m".into()));
        }
        Ok(Self {
            name: name.into(),
            tasks,
        })
    }

    /// One of the canonical suites `EO1`..`EO3`, `IM1`..`IM3`.
    pub fn named(name: &str) -> Result<Self> {
        let (family, settings) = suites::suite_settings(name).ok_or_else(|| {
            Error::Usage(format!(
                "unknown suite `{name}`, expected one of {}",
                SUITE_NAMES.join(", ")
            ))
        })?;
        let tasks = settings
            .into_iter()
            .map(|s| TaskDefinition::new(family, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(name.to_ascii_uppercase(), tasks)
    }

    /// Replaces parameter `key` of task `task` (zero-based).
    pub fn with_override(mut self, task: usize, key: &str, value: f64) -> Result<Self> {
        let t = self.tasks.get(task).ok_or_else(|| {
            Error::Usage(format!("suite {} has no task {}", self.name, task + 1))
        })?;
        self.tasks[task] = t.with_param(key, value)?;
        Ok(self)
    }

    /// A suite with one task per grid value, each a copy of `template` with
    /// parameter `key` set to that value. Tasks are named `key=value`.
    pub fn from_grid(
        name: impl Into<String>,
        template: &TaskDefinition,
        key: &str,
        values: &[f64],
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Usage("parameter grid is empty".into()));
        }
        let tasks = values
            .iter()
            .map(|&v| {
                let mut task = template.with_param(key, v)?;
                task.setting.name = format!("{key}={v}");
                Ok(task)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, tasks)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tasks(&self) -> &[TaskDefinition] {
        &self.tasks
    }

    pub fn task(&self, k: usize) -> &TaskDefinition {
        &self.tasks[k]
    }

    pub fn num_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn num_objectives(&self) -> usize {
        self.tasks[0].num_objectives()
    }

    /// Dimension of the unified space: the largest task dimension.
    pub fn d_max(&self) -> usize {
        self.tasks.iter().map(TaskDefinition::dim).max().unwrap_or(0)
    }

    pub fn evaluations(&self) -> Vec<u64> {
        self.tasks.iter().map(TaskDefinition::evaluations).collect()
    }

    /// A copy with every task's counters reset.
    pub fn fresh(&self) -> Self {
        Self {
            name: self.name.clone(),
            tasks: self.tasks.iter().map(TaskDefinition::fresh).collect(),
        }
    }
}
