//! Single runs, batches, sweeps and metric recomputation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sos_core::algorithms::{Algorithm, AlgorithmConfig, RunResult};
use sos_core::analysis::{export_decision_view, export_objective_view};
use sos_core::metrics::{
    chv, rmmd_matrix, BoundsAccumulator, MetricReport, NormalizationBounds, D_RAND_REPETITIONS,
    D_RAND_SEED,
};
use sos_core::{ProblemSuite, SetOfParetoSets};

use crate::config::ExperimentConfig;
use crate::io::{self, write_atomic, write_json};
use crate::{Result, RunnerError};

/// Which solutions are pooled into the normalization bounds of a CHV value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// Every run of every algorithm on the suite.
    Pooled,
    /// Every run of one algorithm on the suite.
    PerAlgorithm,
    /// The run alone.
    PerRun,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::Pooled, Policy::PerAlgorithm, Policy::PerRun];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Pooled => "pooled",
            Policy::PerAlgorithm => "per-algorithm",
            Policy::PerRun => "per-run",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = RunnerError;

    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| RunnerError::Config(format!("unknown policy {s:?}; expected pooled, per-algorithm or per-run")))
    }
}

fn execute(suite: &ProblemSuite, algo: Algorithm, cfg: &AlgorithmConfig) -> sos_core::Result<RunResult> {
    let suite = suite.fresh();
    algo.run(&suite, cfg)
}

fn archive_path(dir: &Path, task: usize) -> PathBuf {
    dir.join(format!("archive_task{}.csv", task + 1))
}

fn write_archives(dir: &Path, suite: &ProblemSuite, sos: &SetOfParetoSets) -> Result<()> {
    for archive in &sos.archives {
        let task = suite.task(archive.task());
        write_atomic(&archive_path(dir, archive.task()), &io::archive_csv(archive, task))?;
    }
    Ok(())
}

fn read_archives(dir: &Path, suite: &ProblemSuite, capacity: usize) -> Result<SetOfParetoSets> {
    let archives = (0..suite.num_tasks())
        .map(|k| io::read_archive_csv(&archive_path(dir, k), k, suite.task(k), suite.d_max(), capacity))
        .collect::<Result<Vec<_>>>()?;
    Ok(SetOfParetoSets::new(archives)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RunInfo {
    suite: String,
    algorithm: String,
    seed: u64,
    generations: usize,
    evals_used: Vec<u64>,
    task_names: Vec<String>,
}

/// One run of `algo` on `suite_name` with `seed`, written to `out`: per-task
/// archives, decision and objective views, a metric report normalized by the
/// run itself and a run record.
pub fn run_single(
    cfg: &ExperimentConfig,
    suite_name: &str,
    algo: Algorithm,
    seed: u64,
    out: &Path,
) -> Result<RunResult> {
    let suite = cfg.suite_named(suite_name)?;
    let acfg = cfg.algorithm_config(seed);
    acfg.validate()?;
    let result = execute(&suite, algo, &acfg)?;
    info!("{} on {} (seed {seed}) took {:.2?}", algo, suite.name(), result.wall_time);

    write_archives(out, &suite, &result.sos)?;
    write_atomic(&out.join("decision_view.csv"), &io::decision_view_csv(&export_decision_view(&result.sos)))?;
    write_atomic(&out.join("objective_view.csv"), &io::objective_view_csv(&export_objective_view(&result.sos)))?;

    let mut acc = BoundsAccumulator::new(suite.num_tasks());
    acc.add_sos(&result.sos);
    let bounds = acc.finish(format!("{} {} seed {seed}", suite.name(), algo))?;
    let rmmd_dim = (suite.num_tasks() > 1).then_some(suite.d_max());
    let report = MetricReport::compute(&result.sos, bounds, rmmd_dim)?;
    write_json(&out.join("metrics.json"), &report)?;
    write_json(
        &out.join("run.json"),
        &RunInfo {
            suite: suite.name().to_string(),
            algorithm: algo.name().to_string(),
            seed,
            generations: result.generations,
            evals_used: result.evals_used.clone(),
            task_names: suite.tasks().iter().map(|t| t.name().to_string()).collect(),
        },
    )?;
    Ok(result)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub suite: String,
    pub algorithm: String,
    pub run: usize,
    pub seed: u64,
    pub chv: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub suite: String,
    pub algorithm: String,
    pub runs: usize,
    pub completed: usize,
    pub chv_mean: f64,
    /// Sample standard deviation; 0 with fewer than two runs.
    pub chv_std: f64,
    pub chv_runs: Vec<f64>,
    /// Highest mean among the suite's complete cells.
    pub best: bool,
}

impl CellSummary {
    pub fn is_complete(&self) -> bool {
        self.completed == self.runs
    }
}

/// Mean symmetrized and directed RMMD of one suite over a batch's runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteRmmd {
    pub suite: String,
    pub algorithm: String,
    pub task_names: Vec<String>,
    pub runs: usize,
    pub directed: Vec<Vec<f64>>,
    pub symmetric: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatchSummary {
    pub policy: Policy,
    pub cells: Vec<CellSummary>,
    pub records: Vec<RunRecord>,
    pub rmmd: Vec<SuiteRmmd>,
    pub bounds: BTreeMap<String, NormalizationBounds>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl BatchSummary {
    pub fn cell(&self, suite: &str, algorithm: Algorithm) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.suite.eq_ignore_ascii_case(suite) && c.algorithm == algorithm.name())
    }

    pub fn rmmd_for(&self, suite: &str) -> Option<&SuiteRmmd> {
        self.rmmd.iter().find(|r| r.suite.eq_ignore_ascii_case(suite))
    }
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Marks the cell(s) with the highest mean CHV of every suite. Incomplete
/// cells are never marked.
pub fn flag_best(cells: &mut [CellSummary]) {
    let mut best: BTreeMap<String, f64> = BTreeMap::new();
    for c in cells.iter().filter(|c| c.is_complete()) {
        let e = best.entry(c.suite.clone()).or_insert(f64::NEG_INFINITY);
        *e = e.max(c.chv_mean);
    }
    for c in cells.iter_mut() {
        c.best = c.is_complete() && best.get(&c.suite) == Some(&c.chv_mean);
    }
}

struct Job {
    suite: usize,
    algo: Algorithm,
    run: usize,
    seed: u64,
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| RunnerError::Config(format!("cannot start {workers} workers: {e}")))
}

fn run_dir(out: &Path, suite: &str, algo: Algorithm, run: usize) -> PathBuf {
    out.join(suite).join(algo.name()).join(format!("run_{run:03}"))
}

/// All runs of every configured (suite, algorithm) pair. Run `i` uses seed
/// `base_seed + i`. Normalization bounds are pooled per suite over every
/// completed run. Failed runs are recorded and leave their cell incomplete.
pub fn run_batch(cfg: &ExperimentConfig) -> Result<BatchSummary> {
    cfg.validate()?;
    let started = Instant::now();
    let out = cfg.batch.out.clone();
    let suites = cfg.suites()?;
    let algos = cfg.algorithms()?;
    let runs = cfg.batch.runs;

    let mut jobs = Vec::new();
    for s in 0..suites.len() {
        for &algo in &algos {
            for run in 0..runs {
                jobs.push(Job {
                    suite: s,
                    algo,
                    run,
                    seed: cfg.batch.base_seed + run as u64,
                });
            }
        }
    }
    info!("batch: {} runs on {} worker(s)", jobs.len(), cfg.batch.workers);
    let pool = thread_pool(cfg.batch.workers)?;
    let outcomes: Vec<sos_core::Result<RunResult>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| execute(&suites[job.suite], job.algo, &cfg.algorithm_config(job.seed)))
            .collect()
    });

    for (job, outcome) in jobs.iter().zip(&outcomes) {
        let suite = &suites[job.suite];
        match outcome {
            Ok(r) => write_archives(&run_dir(&out, suite.name(), job.algo, job.run), suite, &r.sos)?,
            Err(e) => warn!("{} {} run {} failed: {e}", suite.name(), job.algo, job.run),
        }
    }

    let results: Vec<(usize, Algorithm, usize, u64, std::result::Result<&SetOfParetoSets, String>)> = jobs
        .iter()
        .zip(&outcomes)
        .map(|(j, o)| {
            (j.suite, j.algo, j.run, j.seed, o.as_ref().map(|r| &r.sos).map_err(|e| e.to_string()))
        })
        .collect();
    let mut summary = summarize(&suites, &algos, runs, &results, Policy::Pooled)?;

    for name in &cfg.batch.rmmd_suites {
        let Some(s) = suites.iter().position(|x| x.name().eq_ignore_ascii_case(name)) else {
            continue;
        };
        let Ok(algo) = cfg.batch.rmmd_algorithm.parse::<Algorithm>() else {
            return Err(RunnerError::Config(format!("unknown RMMD algorithm {}", cfg.batch.rmmd_algorithm)));
        };
        let sets: Vec<&SetOfParetoSets> = results
            .iter()
            .filter(|r| r.0 == s && r.1 == algo)
            .filter_map(|r| r.4.as_ref().ok().copied())
            .collect();
        if let Some(rmmd) = mean_rmmd(&suites[s], algo, &sets)? {
            summary.rmmd.push(rmmd);
        }
    }
    summary.wall_time = started.elapsed();
    info!("batch finished in {:.2?}", summary.wall_time);

    write_atomic(
        &out.join("config.toml"),
        toml::to_string(cfg).map_err(|e| RunnerError::Config(e.to_string()))?.as_bytes(),
    )?;
    write_summary(&out, &summary, "")?;
    Ok(summary)
}

fn mean_rmmd(suite: &ProblemSuite, algo: Algorithm, sets: &[&SetOfParetoSets]) -> Result<Option<SuiteRmmd>> {
    if sets.is_empty() || suite.num_tasks() < 2 {
        return Ok(None);
    }
    let k = suite.num_tasks();
    let mut directed = vec![vec![0.0; k]; k];
    let mut symmetric = vec![vec![0.0; k]; k];
    let n = sets.len() as f64;
    for sos in sets {
        let m = rmmd_matrix(sos, suite.d_max(), D_RAND_REPETITIONS, D_RAND_SEED)?;
        for i in 0..k {
            for j in 0..k {
                directed[i][j] += m.directed[i][j] / n;
                symmetric[i][j] += m.symmetric[i][j] / n;
            }
        }
    }
    Ok(Some(SuiteRmmd {
        suite: suite.name().to_string(),
        algorithm: algo.name().to_string(),
        task_names: suite.tasks().iter().map(|t| t.name().to_string()).collect(),
        runs: sets.len(),
        directed,
        symmetric,
    }))
}

type Outcome<'a> = (usize, Algorithm, usize, u64, std::result::Result<&'a SetOfParetoSets, String>);

fn summarize(
    suites: &[ProblemSuite],
    algos: &[Algorithm],
    runs: usize,
    results: &[Outcome<'_>],
    policy: Policy,
) -> Result<BatchSummary> {
    let mut bounds_of: BTreeMap<(usize, Option<Algorithm>, Option<usize>), NormalizationBounds> = BTreeMap::new();
    let key = |s: usize, a: Algorithm, run: usize| match policy {
        Policy::Pooled => (s, None, None),
        Policy::PerAlgorithm => (s, Some(a), None),
        Policy::PerRun => (s, Some(a), Some(run)),
    };
    let mut accs: BTreeMap<(usize, Option<Algorithm>, Option<usize>), BoundsAccumulator> = BTreeMap::new();
    for (s, a, run, _, sos) in results {
        if let Ok(sos) = sos {
            accs.entry(key(*s, *a, *run))
                .or_insert_with(|| BoundsAccumulator::new(suites[*s].num_tasks()))
                .add_sos(sos);
        }
    }
    for (k, acc) in accs {
        let label = match k {
            (s, None, _) => format!("{} all algorithms and runs", suites[s].name()),
            (s, Some(a), None) => format!("{} {a} all runs", suites[s].name()),
            (s, Some(a), Some(r)) => format!("{} {a} run {r}", suites[s].name()),
        };
        bounds_of.insert(k, acc.finish(label)?);
    }

    let mut records = Vec::with_capacity(results.len());
    let mut per_cell: BTreeMap<(usize, Algorithm), Vec<f64>> = BTreeMap::new();
    for (s, a, run, seed, sos) in results {
        let (chv_value, error) = match sos {
            Ok(sos) => (Some(chv(sos, &bounds_of[&key(*s, *a, *run)])?), None),
            Err(e) => (None, Some(e.clone())),
        };
        if let Some(v) = chv_value {
            per_cell.entry((*s, *a)).or_default().push(v);
        }
        records.push(RunRecord {
            suite: suites[*s].name().to_string(),
            algorithm: a.name().to_string(),
            run: *run,
            seed: *seed,
            chv: chv_value,
            error,
        });
    }

    let mut cells = Vec::new();
    for (s, suite) in suites.iter().enumerate() {
        for &a in algos {
            let values = per_cell.remove(&(s, a)).unwrap_or_default();
            let (chv_mean, chv_std) = mean_std(&values);
            cells.push(CellSummary {
                suite: suite.name().to_string(),
                algorithm: a.name().to_string(),
                runs,
                completed: values.len(),
                chv_mean,
                chv_std,
                chv_runs: values,
                best: false,
            });
        }
    }
    flag_best(&mut cells);

    let bounds = bounds_of
        .into_iter()
        .map(|((s, a, r), b)| {
            let mut name = suites[s].name().to_string();
            if let Some(a) = a {
                name.push_str(&format!("/{a}"));
            }
            if let Some(r) = r {
                name.push_str(&format!("/run_{r:03}"));
            }
            (name, b)
        })
        .collect();
    Ok(BatchSummary {
        policy,
        cells,
        records,
        rmmd: Vec::new(),
        bounds,
        wall_time: Duration::ZERO,
    })
}

fn write_summary(out: &Path, summary: &BatchSummary, suffix: &str) -> Result<()> {
    write_atomic(
        &out.join(format!("summary{suffix}.csv")),
        &io::table_csv(
            &["suite", "algo", "chv_mean", "chv_std"],
            summary.cells.iter().map(|c| {
                vec![c.suite.clone(), c.algorithm.clone(), io::fmt(c.chv_mean), io::fmt(c.chv_std)]
            }),
        ),
    )?;
    write_atomic(
        &out.join(format!("runs{suffix}.csv")),
        &io::table_csv(
            &["suite", "algo", "run", "seed", "chv", "error"],
            summary.records.iter().map(|r| {
                vec![
                    r.suite.clone(),
                    r.algorithm.clone(),
                    r.run.to_string(),
                    r.seed.to_string(),
                    r.chv.map(io::fmt).unwrap_or_default(),
                    r.error.clone().unwrap_or_default(),
                ]
            }),
        ),
    )?;
    for r in &summary.rmmd {
        write_atomic(
            &out.join(format!("rmmd_{}{suffix}.csv", r.suite)),
            &io::matrix_csv(&r.task_names, &r.symmetric),
        )?;
        write_atomic(
            &out.join(format!("rmmd_{}_directed{suffix}.csv", r.suite)),
            &io::matrix_csv(&r.task_names, &r.directed),
        )?;
    }
    write_json(&out.join(format!("summary{suffix}.json")), summary)
}

/// Recomputes CHV for a batch directory from its stored archives under
/// `policy`. Writes `summary_<policy>.csv`, `runs_<policy>.csv` and
/// `summary_<policy>.json` next to the originals.
pub fn recompute_metrics(dir: &Path, policy: Policy) -> Result<BatchSummary> {
    let cfg = ExperimentConfig::load(&dir.join("config.toml"))?;
    let suites = cfg.suites()?;
    let algos = cfg.algorithms()?;
    let runs = cfg.batch.runs;
    let mut loaded = Vec::new();
    for (s, suite) in suites.iter().enumerate() {
        for &a in &algos {
            for run in 0..runs {
                let seed = cfg.batch.base_seed + run as u64;
                let sos = read_archives(&run_dir(dir, suite.name(), a, run), suite, cfg.algorithm.pop_per_task)
                    .map_err(|e| e.to_string());
                loaded.push((s, a, run, seed, sos));
            }
        }
    }
    let results: Vec<Outcome<'_>> = loaded
        .iter()
        .map(|(s, a, r, seed, sos)| (*s, *a, *r, *seed, sos.as_ref().map_err(Clone::clone)))
        .collect();
    let summary = summarize(&suites, &algos, runs, &results, policy)?;
    write_summary(dir, &summary, &format!("_{}", policy.name()))?;
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub run: usize,
    pub seed: u64,
    pub task: usize,
    pub value: f64,
    /// Native means of the designated variables over the task's Pareto set.
    pub means: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub suite: String,
    pub algorithm: String,
    pub param: String,
    pub values: Vec<f64>,
    pub variables: Vec<usize>,
    pub rows: Vec<SweepRow>,
    /// Per run: every designated mean is non-decreasing along the grid.
    pub nondecreasing: Vec<bool>,
    pub nondecreasing_runs: usize,
}

/// Runs the configured multitask optimizer on the sweep suite once per seed
/// and reports per-task means of the designated decision variables.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepSummary> {
    cfg.validate()?;
    let s = &cfg.sweep;
    let suite = cfg.sweep_suite()?;
    let algo: Algorithm = s.algorithm.parse()?;
    if s.variables.iter().any(|&v| v == 0 || suite.tasks().iter().any(|t| v > t.dim())) {
        return Err(RunnerError::Config(format!("sweep variables {:?} out of range", s.variables)));
    }
    let out = cfg.batch.out.join("sweep");
    let pool = thread_pool(cfg.batch.workers)?;
    let seeds: Vec<u64> = (0..cfg.batch.runs).map(|i| cfg.batch.base_seed + i as u64).collect();
    let outcomes: Vec<sos_core::Result<RunResult>> =
        pool.install(|| seeds.par_iter().map(|&seed| execute(&suite, algo, &cfg.algorithm_config(seed))).collect());

    let mut rows = Vec::new();
    let mut nondecreasing = Vec::new();
    for (run, (seed, outcome)) in seeds.iter().zip(outcomes).enumerate() {
        let result = outcome?;
        write_archives(&out.join(format!("run_{run:03}")), &suite, &result.sos)?;
        let mut per_task = Vec::new();
        for archive in &result.sos.archives {
            let n = archive.len() as f64;
            let means: Vec<f64> = s
                .variables
                .iter()
                .map(|&v| archive.members().iter().map(|m| m.decision.native[v - 1]).sum::<f64>() / n)
                .collect();
            rows.push(SweepRow {
                run,
                seed: *seed,
                task: archive.task(),
                value: s.values[archive.task()],
                means: means.clone(),
            });
            per_task.push(means);
        }
        nondecreasing.push(per_task.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| b >= a)));
    }
    let summary = SweepSummary {
        suite: suite.name().to_string(),
        algorithm: algo.name().to_string(),
        param: s.param.clone(),
        values: s.values.clone(),
        variables: s.variables.clone(),
        nondecreasing_runs: nondecreasing.iter().filter(|&&b| b).count(),
        nondecreasing,
        rows,
    };

    let mut header = vec!["run".to_string(), "seed".into(), "task".into(), s.param.clone()];
    header.extend(s.variables.iter().map(|v| format!("mean_x{v}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_atomic(
        &cfg.batch.out.join("sweep_trend.csv"),
        &io::table_csv(
            &header_refs,
            summary.rows.iter().map(|r| {
                let mut row = vec![r.run.to_string(), r.seed.to_string(), (r.task + 1).to_string(), io::fmt(r.value)];
                row.extend(r.means.iter().map(|&m| io::fmt(m)));
                row
            }),
        ),
    )?;
    write_json(&cfg.batch.out.join("sweep_summary.json"), &summary)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_std() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[7.0]), (7.0, 0.0));
        assert!(mean_std(&[]).0.is_nan());
    }

    #[test]
    fn best_flags_skip_incomplete_cells() {
        let cell = |algo: &str, mean: f64, completed: usize| CellSummary {
            suite: "EO1".into(),
            algorithm: algo.into(),
            runs: 2,
            completed,
            chv_mean: mean,
            chv_std: 0.0,
            chv_runs: vec![],
            best: false,
        };
        let mut cells = vec![cell("a", 1.0, 2), cell("b", 3.0, 1), cell("c", 2.0, 2), cell("d", 2.0, 2)];
        flag_best(&mut cells);
        let flags: Vec<bool> = cells.iter().map(|c| c.best).collect();
        assert_eq!(flags, vec![false, false, true, true]);
    }

    #[test]
    fn policy_names() {
        for p in Policy::ALL {
            assert_eq!(p.name().parse::<Policy>().unwrap(), p);
        }
        assert!("global".parse::<Policy>().is_err());
    }
}
