//! Quality and similarity measures for a set of Pareto sets.
//!
//! * Cumulative hypervolume: objectives of each task are normalized into
//!   `[0, 1]` with an ideal/nadir pair, and the per-task hypervolumes against
//!   the reference point `(1, 1)` are summed.
//! * Relative mean-minimum distance: the mean distance from each point of one
//!   Pareto set to its nearest neighbour in another, divided by the same
//!   statistic between two uniform random samples of the unified cube.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pareto::SetOfParetoSets;
use crate::rng::{Purpose, Rng, StreamSeed};

/// Spans narrower than this are widened so normalization never divides by 0.
pub const MIN_SPAN: f64 = 1e-12;
/// Default repetitions of the random-baseline estimate.
pub const D_RAND_REPETITIONS: usize = 100;
/// Seed of the random-baseline estimate; fixed so reports are reproducible.
pub const D_RAND_SEED: u64 = 0x5EED_D1A7;

/// Per-task ideal and nadir points used for normalization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationBounds {
    pub ideal: Vec<Vec<f64>>,
    pub nadir: Vec<Vec<f64>>,
    /// Which solution sets were pooled to obtain the bounds.
    pub provenance: String,
}

impl NormalizationBounds {
    pub fn num_tasks(&self) -> usize {
        self.ideal.len()
    }

    /// Normalized coordinates of `y` for `task`, clipped into `[0, 1]`.
    pub fn normalize(&self, task: usize, y: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(self.ideal[task].iter().zip(&self.nadir[task]))
            .map(|(&v, (&lo, &hi))| ((v - lo) / (hi - lo)).clamp(0.0, 1.0))
            .collect()
    }
}

/// Componentwise min and max of each task's pooled objective vectors.
pub fn compute_bounds(
    per_task: &[Vec<&[f64]>],
    provenance: impl Into<String>,
) -> Result<NormalizationBounds> {
    let mut acc = BoundsAccumulator::new(per_task.len());
    for (k, points) in per_task.iter().enumerate() {
        for p in points {
            acc.add_point(k, p);
        }
    }
    acc.finish(provenance)
}

/// Incremental form of [`compute_bounds`] for pooling many runs.
#[derive(Clone, Debug)]
pub struct BoundsAccumulator {
    ideal: Vec<Option<Vec<f64>>>,
    nadir: Vec<Option<Vec<f64>>>,
}

impl BoundsAccumulator {
    pub fn new(num_tasks: usize) -> Self {
        Self {
            ideal: vec![None; num_tasks],
            nadir: vec![None; num_tasks],
        }
    }

    pub fn add_point(&mut self, task: usize, y: &[f64]) {
        match (&mut self.ideal[task], &mut self.nadir[task]) {
            (Some(lo), Some(hi)) => {
                for i in 0..y.len() {
                    lo[i] = lo[i].min(y[i]);
                    hi[i] = hi[i].max(y[i]);
                }
            }
            _ => {
                self.ideal[task] = Some(y.to_vec());
                self.nadir[task] = Some(y.to_vec());
            }
        }
    }

    pub fn add_sos(&mut self, sos: &SetOfParetoSets) {
        for archive in &sos.archives {
            for m in archive.members() {
                self.add_point(archive.task(), &m.objectives);
            }
        }
    }

    pub fn finish(self, provenance: impl Into<String>) -> Result<NormalizationBounds> {
        let mut ideal = Vec::with_capacity(self.ideal.len());
        let mut nadir = Vec::with_capacity(self.nadir.len());
        for (k, (lo, hi)) in self.ideal.into_iter().zip(self.nadir).enumerate() {
            let (lo, mut hi) = match (lo, hi) {
                (Some(lo), Some(hi)) => (lo, hi),
                _ => return Err(Error::Empty(format!("no solutions pooled for task {}", k + 1))),
            };
            for i in 0..hi.len() {
                if hi[i] - lo[i] < MIN_SPAN {
                    hi[i] = lo[i] + MIN_SPAN;
                }
            }
            ideal.push(lo);
            nadir.push(hi);
        }
        Ok(NormalizationBounds {
            ideal,
            nadir,
            provenance: provenance.into(),
        })
    }
}

/// Area dominated by a 2-D point set and bounded by `reference`.
///
/// Points not strictly below the reference in both coordinates are ignored.
pub fn hv2d<T: AsRef<[f64]>>(front: &[T], reference: [f64; 2]) -> f64 {
    let mut pts: Vec<[f64; 2]> = front
        .iter()
        .map(|p| {
            let p = p.as_ref();
            [p[0], p[1]]
        })
        .filter(|p| p[0] < reference[0] && p[1] < reference[1])
        .collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut ceiling = reference[1];
    for p in pts {
        if p[1] < ceiling {
            area += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}

/// Normalized hypervolume of every task.
pub fn task_hypervolumes(sos: &SetOfParetoSets, bounds: &NormalizationBounds) -> Result<Vec<f64>> {
    if bounds.num_tasks() != sos.num_tasks() {
        return Err(Error::Usage(format!(
            "bounds cover {} tasks, set has {}",
            bounds.num_tasks(),
            sos.num_tasks()
        )));
    }
    Ok(sos
        .archives
        .iter()
        .map(|archive| {
            let normalized: Vec<Vec<f64>> = archive
                .members()
                .iter()
                .map(|m| bounds.normalize(archive.task(), &m.objectives))
                .collect();
            hv2d(&normalized, [1.0, 1.0])
        })
        .collect())
}

/// Cumulative hypervolume: the sum of normalized per-task hypervolumes.
pub fn chv(sos: &SetOfParetoSets, bounds: &NormalizationBounds) -> Result<f64> {
    Ok(task_hypervolumes(sos, bounds)?.iter().sum())
}

/// Mean over `to` of the distance to the nearest member of `from`.
pub fn mean_min_distance<A: AsRef<[f64]>, B: AsRef<[f64]>>(from: &[A], to: &[B]) -> f64 {
    let total: f64 = to
        .iter()
        .map(|y| {
            from.iter()
                .map(|x| euclidean(x.as_ref(), y.as_ref()))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / to.len() as f64
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Relative mean-minimum distance from Pareto set `ps_a` to `ps_b`.
pub fn rmmd<A: AsRef<[f64]>, B: AsRef<[f64]>>(ps_a: &[A], ps_b: &[B], d_rand: f64) -> Result<f64> {
    if ps_a.is_empty() || ps_b.is_empty() {
        return Err(Error::Empty("RMMD needs two nonempty sets".into()));
    }
    if !(d_rand > 0.0) {
        return Err(Error::Usage(format!("random baseline must be positive, got {d_rand}")));
    }
    Ok(mean_min_distance(ps_a, ps_b) / d_rand)
}

/// Mean-minimum distance between two uniform samples of sizes `n_a`, `n_b`
/// in `[0, 1]^dim`, averaged over `repetitions` fresh draws.
pub fn estimate_d_rand(n_a: usize, n_b: usize, dim: usize, repetitions: usize, rng: &mut Rng) -> f64 {
    let mut sample = |n: usize| -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
            .collect()
    };
    let mut total = 0.0;
    for _ in 0..repetitions {
        let a = sample(n_a.max(1));
        let b = sample(n_b.max(1));
        total += mean_min_distance(&a, &b);
    }
    total / repetitions.max(1) as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RmmdMatrix {
    /// `directed[i][j]` measures task `j`'s set against task `i`'s set.
    pub directed: Vec<Vec<f64>>,
    /// Mean of both directions.
    pub symmetric: Vec<Vec<f64>>,
    /// Random baseline used for each directed entry.
    pub d_rand: Vec<Vec<f64>>,
}

/// RMMD between every ordered pair of tasks, in unified coordinates. The
/// random baseline of entry `(i, j)` uses sample sizes `(N_i, N_j)`.
pub fn rmmd_matrix(sos: &SetOfParetoSets, dim: usize, repetitions: usize, seed: u64) -> Result<RmmdMatrix> {
    let k = sos.num_tasks();
    let sets: Vec<Vec<&[f64]>> = sos.archives.iter().map(|a| a.unified()).collect();
    let mut directed = vec![vec![0.0; k]; k];
    let mut d_rand = vec![vec![0.0; k]; k];
    let mut rng = StreamSeed(seed).stream(Purpose::Metrics, 0);
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let baseline = estimate_d_rand(sets[i].len(), sets[j].len(), dim, repetitions, &mut rng);
            d_rand[i][j] = baseline;
            directed[i][j] = rmmd(&sets[i], &sets[j], baseline)?;
        }
    }
    let symmetric = (0..k)
        .map(|i| (0..k).map(|j| 0.5 * (directed[i][j] + directed[j][i])).collect())
        .collect();
    Ok(RmmdMatrix {
        directed,
        symmetric,
        d_rand,
    })
}

/// Everything measured on one set of Pareto sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub hv: Vec<f64>,
    pub chv: f64,
    pub reference_point: Vec<f64>,
    pub bounds: NormalizationBounds,
    pub rmmd: Option<RmmdMatrix>,
}

impl MetricReport {
    pub fn compute(
        sos: &SetOfParetoSets,
        bounds: NormalizationBounds,
        rmmd_dim: Option<usize>,
    ) -> Result<Self> {
        let hv = task_hypervolumes(sos, &bounds)?;
        let rmmd = match rmmd_dim {
            Some(dim) => Some(rmmd_matrix(sos, dim, D_RAND_REPETITIONS, D_RAND_SEED)?),
            None => None,
        };
        Ok(Self {
            chv: hv.iter().sum(),
            hv,
            reference_point: vec![1.0, 1.0],
            bounds,
            rmmd,
        })
    }
}
