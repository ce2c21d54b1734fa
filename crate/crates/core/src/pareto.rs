//! Pareto dominance, nondominated sorting, crowding distance and the bounded
//! per-task archive that stores a task's final Pareto set approximation.
//!
//! All objectives are minimized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default archive capacity: the per-task population share.
pub const DEFAULT_ARCHIVE_CAPACITY: usize = 50;

/// A solution in both encodings: the shared unit cube used by the variation
/// operators and the task-specific native coordinates it decodes to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionVector {
    pub unified: Vec<f64>,
    pub native: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub decision: DecisionVector,
    pub objectives: Vec<f64>,
    /// Zero-based index of the task this individual was evaluated on.
    pub skill_factor: usize,
    /// Front index from the last sort; `None` once the population changed.
    pub rank: Option<usize>,
    pub crowding: Option<f64>,
}

impl Individual {
    pub fn new(decision: DecisionVector, objectives: Vec<f64>, skill_factor: usize) -> Self {
        Self {
            decision,
            objectives,
            skill_factor,
            rank: None,
            crowding: None,
        }
    }

    pub fn invalidate_ranking(&mut self) {
        self.rank = None;
        self.crowding = None;
    }
}

impl AsRef<[f64]> for Individual {
    fn as_ref(&self) -> &[f64] {
        &self.objectives
    }
}

/// `true` iff `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::Usage(format!(
            "objective vectors differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    Ok(dominates_unchecked(a, b))
}

/// [`dominates`] without the length check, for inner loops over vectors that
/// are known to come from the same task.
#[inline]
pub fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strictly_better = false;
    for (&x, &y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

/// Fast nondominated sort. Front 0 is the nondominated subset; every member of
/// front `i > 0` is dominated by some member of front `i - 1`. Indices inside a
/// front are ascending.
pub fn nondominated_sort<T: AsRef<[f64]>>(points: &[T]) -> Vec<Vec<usize>> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_set: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (points[i].as_ref(), points[j].as_ref());
            if dominates_unchecked(a, b) {
                dominates_set[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates_unchecked(b, a) {
                dominates_set[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_set[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Nondominated sort of a population that must belong to a single task.
pub fn sort_population(pop: &[Individual]) -> Result<Vec<Vec<usize>>> {
    if let Some(first) = pop.first() {
        if let Some(other) = pop.iter().find(|ind| ind.skill_factor != first.skill_factor) {
            return Err(Error::Usage(format!(
                "nondominated sort is per task, got skill factors {} and {}",
                first.skill_factor, other.skill_factor
            )));
        }
    }
    Ok(nondominated_sort(pop))
}

/// Indices of the nondominated members of `points`.
pub fn nondominated_indices<T: AsRef<[f64]>>(points: &[T]) -> Vec<usize> {
    nondominated_sort(points).into_iter().next().unwrap_or_default()
}

/// Crowding distance of each member of a mutually nondominated front.
///
/// Per objective, members are ordered by value. A member whose value is
/// shared with another member gets a zero contribution from that objective.
/// Otherwise the sole holder of the minimum or maximum gets `+inf` and any
/// other member gets the gap between its two neighbours divided by the
/// objective's range. Tied values are treated as a group, so the result does
/// not depend on input order, and duplicated points are always the first to
/// go under pressure. Fronts of size two or less are all `+inf`.
pub fn crowding_distance<T: AsRef<[f64]>>(front: &[T]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = front[0].as_ref().len();
    let mut distance = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    for obj in 0..m {
        let value = |i: usize| front[i].as_ref()[obj];
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)));
        let lo = value(order[0]);
        let hi = value(order[n - 1]);
        let range = hi - lo;

        let mut start = 0;
        while start < n {
            let v = value(order[start]);
            let mut end = start + 1;
            while end < n && value(order[end]) == v {
                end += 1;
            }
            let contribution = if end - start > 1 {
                0.0
            } else if v == lo || v == hi {
                f64::INFINITY
            } else {
                (value(order[end]) - value(order[start - 1])) / range
            };
            for &i in &order[start..end] {
                distance[i] += contribution;
            }
            start = end;
        }
    }
    distance
}

/// Recomputes rank and crowding for every member of a single-task population.
/// Returns the fronts.
pub fn assign_rank_and_crowding(pop: &mut [Individual]) -> Vec<Vec<usize>> {
    let fronts = nondominated_sort(pop);
    for (rank, front) in fronts.iter().enumerate() {
        let members: Vec<&[f64]> = front.iter().map(|&i| pop[i].objectives.as_slice()).collect();
        let crowding = crowding_distance(&members);
        for (&i, c) in front.iter().zip(crowding) {
            pop[i].rank = Some(rank);
            pop[i].crowding = Some(c);
        }
    }
    fronts
}

/// Bounded nondominated archive for one task.
///
/// No member dominates another. When an insertion pushes the size over
/// capacity the member with the smallest crowding distance is evicted, the
/// earliest inserted one among ties.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoArchive {
    task: usize,
    capacity: usize,
    members: Vec<Individual>,
    stamps: Vec<u64>,
    next_stamp: u64,
}

impl ParetoArchive {
    pub fn new(task: usize, capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Config("archive capacity must be positive".into()));
        }
        Ok(Self {
            task,
            capacity,
            members: Vec::new(),
            stamps: Vec::new(),
            next_stamp: 0,
        })
    }

    /// Builds an archive by inserting every individual in order.
    pub fn from_individuals(
        task: usize,
        capacity: usize,
        individuals: impl IntoIterator<Item = Individual>,
    ) -> Result<Self> {
        let mut archive = Self::new(task, capacity)?;
        for ind in individuals {
            archive.insert(ind)?;
        }
        Ok(archive)
    }

    pub fn task(&self) -> usize {
        self.task
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Individual> {
        self.members
    }

    pub fn objectives(&self) -> Vec<&[f64]> {
        self.members.iter().map(|m| m.objectives.as_slice()).collect()
    }

    pub fn unified(&self) -> Vec<&[f64]> {
        self.members.iter().map(|m| m.decision.unified.as_slice()).collect()
    }

    /// Inserts `cand` unless a member dominates it. Returns whether it was kept.
    pub fn insert(&mut self, cand: Individual) -> Result<bool> {
        if cand.skill_factor != self.task {
            return Err(Error::Usage(format!(
                "candidate for task {} offered to archive of task {}",
                cand.skill_factor, self.task
            )));
        }
        if let Some(member) = self.members.first() {
            if member.objectives.len() != cand.objectives.len() {
                return Err(Error::Usage("objective count differs from archive members".into()));
            }
        }
        if self
            .members
            .iter()
            .any(|m| dominates_unchecked(&m.objectives, &cand.objectives))
        {
            return Ok(false);
        }

        let mut keep = Vec::with_capacity(self.members.len());
        for (m, s) in self.members.drain(..).zip(self.stamps.drain(..)) {
            if !dominates_unchecked(&cand.objectives, &m.objectives) {
                keep.push((m, s));
            }
        }
        let (members, stamps): (Vec<_>, Vec<_>) = keep.into_iter().unzip();
        self.members = members;
        self.stamps = stamps;
        self.members.push(cand);
        self.stamps.push(self.next_stamp);
        self.next_stamp += 1;

        if self.members.len() > self.capacity {
            self.evict_most_crowded();
        }
        Ok(true)
    }

    fn evict_most_crowded(&mut self) {
        let crowding = crowding_distance(&self.members);
        let victim = (0..self.members.len())
            .min_by(|&a, &b| {
                crowding[a]
                    .total_cmp(&crowding[b])
                    .then(self.stamps[a].cmp(&self.stamps[b]))
            })
            .expect("archive over capacity is nonempty");
        self.members.remove(victim);
        self.stamps.remove(victim);
    }

    /// Pairwise check of the archive invariants.
    pub fn validate(&self) -> Result<()> {
        if self.members.len() > self.capacity {
            return Err(Error::Usage("archive exceeds its capacity".into()));
        }
        for (i, a) in self.members.iter().enumerate() {
            if a.skill_factor != self.task {
                return Err(Error::Usage(format!("member {i} belongs to another task")));
            }
            for b in &self.members {
                if dominates_unchecked(&a.objectives, &b.objectives) {
                    return Err(Error::Usage(format!("member {i} dominates another member")));
                }
            }
        }
        Ok(())
    }
}

/// One archive per task: the final result of a multitask run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetOfParetoSets {
    pub archives: Vec<ParetoArchive>,
}

impl SetOfParetoSets {
    pub fn new(archives: Vec<ParetoArchive>) -> Result<Self> {
        let sos = Self { archives };
        sos.validate()?;
        Ok(sos)
    }

    pub fn num_tasks(&self) -> usize {
        self.archives.len()
    }

    pub fn archive(&self, task: usize) -> &ParetoArchive {
        &self.archives[task]
    }

    pub fn validate(&self) -> Result<()> {
        for (k, archive) in self.archives.iter().enumerate() {
            if archive.task() != k {
                return Err(Error::Usage(format!(
                    "archive at position {k} is labelled task {}",
                    archive.task()
                )));
            }
            archive.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ind(objectives: &[f64], task: usize) -> Individual {
        Individual::new(
            DecisionVector {
                unified: vec![0.5],
                native: vec![0.5],
            },
            objectives.to_vec(),
            task,
        )
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&[1.0, 2.0], &[2.0, 3.0]).unwrap());
        assert!(!dominates(&[1.0, 2.0], &[1.0, 2.0]).unwrap());
        assert!(!dominates(&[1.0, 3.0], &[2.0, 2.0]).unwrap());
        assert!(!dominates(&[2.0, 2.0], &[1.0, 3.0]).unwrap());
        assert!(dominates(&[1.0, 2.0], &[1.0, 3.0]).unwrap());
    }

    #[test]
    fn dominance_length_mismatch_is_usage_error() {
        assert!(matches!(dominates(&[1.0], &[1.0, 2.0]), Err(Error::Usage(_))));
    }

    #[test]
    fn sort_examples() {
        assert_eq!(nondominated_sort(&[[1.0, 1.0]]), vec![vec![0]]);
        let pts = [[1.0, 2.0], [2.0, 1.0], [2.0, 2.0]];
        assert_eq!(nondominated_sort(&pts), vec![vec![0, 1], vec![2]]);
        let empty: [[f64; 2]; 0] = [];
        assert!(nondominated_sort(&empty).is_empty());
    }

    #[test]
    fn sort_population_rejects_mixed_tasks() {
        let pop = vec![ind(&[1.0, 2.0], 0), ind(&[2.0, 1.0], 1)];
        assert!(matches!(sort_population(&pop), Err(Error::Usage(_))));
    }

    #[test]
    fn crowding_small_fronts_are_infinite() {
        assert!(crowding_distance(&[[0.0, 1.0], [1.0, 0.0]])
            .iter()
            .all(|d| d.is_infinite()));
        assert_eq!(crowding_distance(&[[0.0, 1.0]]), vec![f64::INFINITY]);
    }

    #[test]
    fn crowding_equally_spaced_line() {
        let d = crowding_distance(&[[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]]);
        assert!(d[0].is_infinite() && d[2].is_infinite());
        assert!((d[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn crowding_interior_duplicates_are_finite() {
        let front = [[0.0, 4.0], [1.0, 3.0], [2.0, 2.0], [2.0, 2.0], [4.0, 0.0]];
        let d = crowding_distance(&front);
        assert!(d[0].is_infinite() && d[4].is_infinite());
        assert_eq!(d[2], 0.0);
        assert_eq!(d[3], 0.0);
        // (2 - 0) / 4 + (4 - 2) / 4
        assert!((d[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn crowding_boundary_duplicates_are_zero() {
        let front = [[0.0, 4.0], [0.0, 4.0], [1.0, 3.0], [4.0, 0.0]];
        let d = crowding_distance(&front);
        assert_eq!(&d[..2], &[0.0, 0.0]);
        assert!(d[2].is_finite() && d[2] > 0.0);
        assert!(d[3].is_infinite());
        assert_eq!(crowding_distance(&[[1.0, 1.0]; 3]), vec![0.0; 3]);
    }

    #[test]
    fn archive_rejects_dominated_candidate() {
        let mut archive = ParetoArchive::new(0, 10).unwrap();
        assert!(archive.insert(ind(&[1.0, 1.0], 0)).unwrap());
        let before = archive.clone();
        assert!(!archive.insert(ind(&[2.0, 2.0], 0)).unwrap());
        assert_eq!(archive, before);
    }

    #[test]
    fn archive_removes_dominated_members() {
        let mut archive = ParetoArchive::new(0, 10).unwrap();
        archive.insert(ind(&[1.0, 3.0], 0)).unwrap();
        archive.insert(ind(&[3.0, 1.0], 0)).unwrap();
        archive.insert(ind(&[2.0, 2.5], 0)).unwrap();
        assert!(archive.insert(ind(&[0.5, 0.5], 0)).unwrap());
        assert_eq!(archive.len(), 1);
        assert_eq!(archive.members()[0].objectives, vec![0.5, 0.5]);
    }

    #[test]
    fn archive_skill_mismatch_is_usage_error() {
        let mut archive = ParetoArchive::new(1, 10).unwrap();
        assert!(matches!(archive.insert(ind(&[1.0, 1.0], 0)), Err(Error::Usage(_))));
    }

    #[test]
    fn archive_keeps_duplicates_and_evicts_them_first() {
        let mut archive = ParetoArchive::new(0, 4).unwrap();
        for p in [[0.0, 4.0], [2.0, 2.0], [2.0, 2.0], [4.0, 0.0]] {
            assert!(archive.insert(ind(&p, 0)).unwrap());
        }
        assert_eq!(archive.len(), 4);
        archive.insert(ind(&[1.0, 3.0], 0)).unwrap();
        assert_eq!(archive.len(), 4);
        // The earlier of the two zero-crowding duplicates goes first.
        let objs: Vec<Vec<f64>> = archive.members().iter().map(|m| m.objectives.clone()).collect();
        assert_eq!(
            objs,
            vec![vec![0.0, 4.0], vec![2.0, 2.0], vec![4.0, 0.0], vec![1.0, 3.0]]
        );
        archive.validate().unwrap();
    }

    #[test]
    fn zero_capacity_is_config_error() {
        assert!(matches!(ParetoArchive::new(0, 0), Err(Error::Config(_))));
    }

    #[test]
    fn set_of_pareto_sets_checks_task_labels() {
        let a0 = ParetoArchive::new(0, 5).unwrap();
        let a1 = ParetoArchive::new(1, 5).unwrap();
        assert!(SetOfParetoSets::new(vec![a0.clone(), a1.clone()]).is_ok());
        assert!(SetOfParetoSets::new(vec![a1, a0]).is_err());
    }
}
