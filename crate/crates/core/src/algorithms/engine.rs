//! Population state shared by all optimizers: one subpopulation per task,
//! per-task budgets and random streams, tournament selection and elitist
//! truncation.

use std::cmp::Ordering;
use std::time::Instant;

use rand::Rng as _;

use super::{Algorithm, AlgorithmConfig, GenerationSnapshot, GenerationTrace, RmpMatrix, RunResult};
use crate::error::Result;
use crate::pareto::{
    assign_rank_and_crowding, crowding_distance, nondominated_sort, Individual, ParetoArchive,
    SetOfParetoSets,
};
use crate::problems::TaskDefinition;
use crate::rng::{Purpose, Rng, StreamSeed};
use crate::variation::{polynomial_mutation, sbx_crossover};

pub(crate) struct Engine<'a> {
    pub tasks: Vec<&'a TaskDefinition>,
    pub cfg: &'a AlgorithmConfig,

    pub seed: StreamSeed,
    pub subpops: Vec<Vec<Individual>>,
    pub mating: Vec<Rng>,
    pub used: Vec<u64>,
    pub generation: usize,
    pub trace: Vec<GenerationTrace>,
    pending_parents: Vec<Vec<usize>>,
    log: Vec<GenerationSnapshot>,
    pub rmp_history: Vec<RmpMatrix>,
    started: Instant,
}

impl<'a> Engine<'a> {
    /// Samples and evaluates `pop_per_task` uniform individuals per task.
    pub fn init(tasks: Vec<&'a TaskDefinition>, d_max: usize, cfg: &'a AlgorithmConfig) -> Result<Self> {
        cfg.validate()?;
        let seed = StreamSeed(cfg.seed);
        let k = tasks.len();
        let mut engine = Self {
            tasks,
            cfg,

            seed,
            subpops: vec![Vec::new(); k],
            mating: (0..k).map(|t| seed.stream(Purpose::Mating, t)).collect(),
            used: vec![0; k],
            generation: 0,
            trace: Vec::new(),
            pending_parents: vec![Vec::new(); k],
            log: Vec::new(),
            rmp_history: Vec::new(),
            started: Instant::now(),
        };
        for t in 0..k {
            let mut rng = seed.stream(Purpose::Init, t);
            let mut members = Vec::with_capacity(cfg.pop_per_task);
            for _ in 0..cfg.pop_per_task {
                let unified: Vec<f64> = (0..d_max).map(|_| rng.gen::<f64>()).collect();
                members.push(engine.evaluate(t, unified)?);
            }
            assign_rank_and_crowding(&mut members);
            engine.subpops[t] = members;
        }
        Ok(engine)
    }

    pub fn num_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn remaining(&self, task: usize) -> u64 {
        self.cfg.max_evals_per_task - self.used[task]
    }

    pub fn any_active(&self) -> bool {
        (0..self.num_tasks()).any(|t| self.remaining(t) > 0)
    }

    /// Offspring this task may produce in the current generation.
    pub fn quota(&self, task: usize) -> usize {
        self.remaining(task).min(self.cfg.pop_per_task as u64) as usize
    }

    fn tracing(&self) -> bool {
        self.generation < self.cfg.trace_generations
    }

    pub fn evaluate(&mut self, task: usize, unified: Vec<f64>) -> Result<Individual> {
        debug_assert!(self.remaining(task) > 0, "budget of task {task} exhausted");
        self.used[task] += 1;
        self.tasks[task].individual(task, unified)
    }

    /// Binary tournament on (rank, crowding) within a task's population.
    pub fn tournament(members: &[Individual], rng: &mut Rng) -> usize {
        let n = members.len();
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        match compare_fitness(&members[a], &members[b]) {
            Ordering::Less => a,
            Ordering::Greater => b,
            Ordering::Equal => {
                if rng.gen_bool(0.5) {
                    a
                } else {
                    b
                }
            }
        }
    }

    /// Two mutated SBX children of two tournament winners of `task`, drawn
    /// from the task's own mating stream.
    pub fn intra_pair(&mut self, task: usize) -> [Vec<f64>; 2] {
        let ops = &self.cfg.operators;
        let members = &self.subpops[task];
        let rng = &mut self.mating[task];
        let i = Self::tournament(members, rng);
        let j = Self::tournament(members, rng);
        let (c1, c2) = sbx_crossover(
            &members[i].decision.unified,
            &members[j].decision.unified,
            ops,
            rng,
        );
        let c1 = polynomial_mutation(&c1, ops, rng);
        let c2 = polynomial_mutation(&c2, ops, rng);
        if self.tracing() {
            self.pending_parents[task].extend([i, j]);
        }
        [c1, c2]
    }

    /// Children of the current generation for `task` with intra-task mating
    /// only, truncated to the quota.
    pub fn intra_offspring(&mut self, task: usize) -> Vec<Vec<f64>> {
        let quota = self.quota(task);
        let mut children = Vec::with_capacity(quota + 1);
        while children.len() < quota {
            children.extend(self.intra_pair(task));
        }
        children.truncate(quota);
        children
    }

    pub fn record_parent(&mut self, task: usize, index: usize) {
        if self.tracing() {
            self.pending_parents[task].push(index);
        }
    }

    /// Elitist truncation of the task's population merged with `newcomers`.
    pub fn select(&mut self, task: usize, newcomers: Vec<Individual>) {
        let mut pool = std::mem::take(&mut self.subpops[task]);
        pool.extend(newcomers);
        let mut survivors = environmental_selection(pool, self.cfg.pop_per_task);
        assign_rank_and_crowding(&mut survivors);
        if self.tracing() {
            self.trace.push(GenerationTrace {
                generation: self.generation,
                task,
                parents: std::mem::take(&mut self.pending_parents[task]),
                survivors: survivors.iter().map(|s| s.decision.unified.clone()).collect(),
            });
        }
        self.subpops[task] = survivors;
    }

    pub fn end_generation(&mut self) {
        if self.cfg.record_generations {
            let fronts = self
                .subpops
                .iter()
                .map(|pop| {
                    pop.iter()
                        .filter(|ind| ind.rank == Some(0))
                        .map(|ind| ind.objectives.clone())
                        .collect()
                })
                .collect();
            self.log.push(GenerationSnapshot {
                generation: self.generation,
                evals_used: self.used.clone(),
                fronts,
            });
        }
        for p in &mut self.pending_parents {
            p.clear();
        }
        self.generation += 1;
    }

    /// Indices of the `count` best members of a task by (rank, crowding).
    pub fn elites(&self, task: usize, count: usize) -> Vec<usize> {
        let members = &self.subpops[task];
        let mut order: Vec<usize> = (0..members.len()).collect();
        order.sort_by(|&a, &b| compare_fitness(&members[a], &members[b]).then(a.cmp(&b)));
        order.truncate(count);
        order
    }

    pub fn finish(self, algorithm: Algorithm) -> Result<RunResult> {
        let mut archives = Vec::with_capacity(self.num_tasks());
        for (t, pop) in self.subpops.into_iter().enumerate() {
            let front = nondominated_sort(&pop).into_iter().next().unwrap_or_default();
            let mut pop: Vec<Option<Individual>> = pop.into_iter().map(Some).collect();
            let members = front.into_iter().map(|i| pop[i].take().expect("front indices unique"));
            archives.push(ParetoArchive::from_individuals(t, self.cfg.pop_per_task, members)?);
        }
        for (t, task) in self.tasks.iter().enumerate() {
            log::debug!(
                "{algorithm}: task {} used {} evaluations, {} clamped coordinates",
                task.name(),
                self.used[t],
                task.clamp_warnings()
            );
        }
        Ok(RunResult {
            algorithm,
            sos: SetOfParetoSets::new(archives)?,
            evals_used: self.used,
            generations: self.generation,
            generation_log: self.log,
            trace: self.trace,
            rmp_history: self.rmp_history,
            wall_time: self.started.elapsed(),
        })
    }
}

/// Lower rank first, then larger crowding distance.
pub(crate) fn compare_fitness(a: &Individual, b: &Individual) -> Ordering {
    let rank = |x: &Individual| x.rank.unwrap_or(usize::MAX);
    let crowd = |x: &Individual| x.crowding.unwrap_or(0.0);
    rank(a)
        .cmp(&rank(b))
        .then_with(|| crowd(b).total_cmp(&crowd(a)))
}

/// Keeps whole fronts while they fit, then prunes the first front that does
/// not by repeatedly removing its least crowded member. Survivors are returned
/// in front order.
pub(crate) fn environmental_selection(pool: Vec<Individual>, n: usize) -> Vec<Individual> {
    if pool.len() <= n {
        return pool;
    }
    let fronts = nondominated_sort(&pool);
    let mut chosen = Vec::with_capacity(n);
    for front in fronts {
        if chosen.len() + front.len() <= n {
            chosen.extend(front);
            if chosen.len() == n {
                break;
            }
            continue;
        }
        // Drop the least crowded member one at a time, recomputing crowding
        // after each removal; the later index goes first among ties.
        let mut kept = front;
        while chosen.len() + kept.len() > n {
            let members: Vec<&[f64]> = kept.iter().map(|&i| pool[i].objectives.as_slice()).collect();
            let crowding = crowding_distance(&members);
            let worst = (0..kept.len())
                .min_by(|&a, &b| crowding[a].total_cmp(&crowding[b]).then(b.cmp(&a)))
                .expect("front is nonempty");
            kept.remove(worst);
        }
        chosen.extend(kept);
        break;
    }
    let mut pool: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    chosen
        .into_iter()
        .map(|i| {
            let mut ind = pool[i].take().expect("selected once");
            ind.invalidate_ranking();
            ind
        })
        .collect()
}
