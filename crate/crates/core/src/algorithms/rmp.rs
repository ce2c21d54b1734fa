//! Pairwise transfer probabilities and their online estimation.
//!
//! Each task's population is summarized by an axis-aligned Gaussian in the
//! unified space. For a pair of tasks `(j, k)` and a candidate `rmp`, an
//! offspring of task `j` comes from task `k`'s distribution with probability
//! `rmp / 2` (half of the inter-task children inherit the other skill factor),
//! so task `j`'s sample is modelled by `(1 - rmp/2) p_j + (rmp/2) p_k` and
//! symmetrically for task `k`. The learned `rmp` maximizes the joint
//! log-likelihood of both samples over an even grid on `[0, 1]`.

use serde::{Deserialize, Serialize};

/// Number of candidate values `0, 0.01, ..., 1`.
pub const RMP_GRID_POINTS: usize = 101;
/// Lower bound applied to every per-dimension variance.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Symmetric `K x K` matrix of transfer probabilities with unit diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RmpMatrix {
    size: usize,
    values: Vec<f64>,
}

impl RmpMatrix {
    pub fn constant(size: usize, rmp: f64) -> Self {
        let mut m = Self {
            size,
            values: vec![rmp; size * size],
        };
        for i in 0..size {
            m.values[i * size + i] = 1.0;
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    /// Sets both `(i, j)` and `(j, i)`. Diagonal entries stay at 1.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        if i != j {
            self.values[i * self.size + j] = value;
            self.values[j * self.size + i] = value;
        }
    }

    pub fn is_valid(&self) -> bool {
        (0..self.size).all(|i| {
            self.get(i, i) == 1.0
                && (0..self.size).all(|j| {
                    let v = self.get(i, j);
                    (0.0..=1.0).contains(&v) && v == self.get(j, i)
                })
        })
    }
}

#[derive(Clone, Debug)]
struct DiagonalGaussian {
    mean: Vec<f64>,
    var: Vec<f64>,
}

impl DiagonalGaussian {
    fn fit(sample: &[&[f64]]) -> Self {
        let n = sample.len() as f64;
        let d = sample[0].len();
        let mut mean = vec![0.0; d];
        for x in sample {
            for (m, v) in mean.iter_mut().zip(x.iter()) {
                *m += v / n;
            }
        }
        let mut var = vec![0.0; d];
        for x in sample {
            for i in 0..d {
                let e = x[i] - mean[i];
                var[i] += e * e / n;
            }
        }
        for v in &mut var {
            *v = v.max(VARIANCE_FLOOR);
        }
        Self { mean, var }
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        let ln_2pi = (2.0 * std::f64::consts::PI).ln();
        self.mean
            .iter()
            .zip(&self.var)
            .zip(x)
            .map(|((m, v), xi)| -0.5 * (ln_2pi + v.ln() + (xi - m) * (xi - m) / v))
            .sum()
    }
}

fn log_mix(log_w_own: f64, own: f64, log_w_other: f64, other: f64) -> f64 {
    let a = log_w_own + own;
    let b = log_w_other + other;
    let hi = a.max(b);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

/// Learned transfer probability between two samples of unified vectors.
///
/// Ties within a relative `1e-9` of the best log-likelihood resolve to the
/// largest candidate, so two identical samples give `1.0`.
pub fn learn_pairwise_rmp(a: &[&[f64]], b: &[&[f64]]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let pa = DiagonalGaussian::fit(a);
    let pb = DiagonalGaussian::fit(b);
    // (own, other) log-densities for every point of both samples.
    let terms: Vec<(f64, f64)> = a
        .iter()
        .map(|x| (pa.log_density(x), pb.log_density(x)))
        .chain(b.iter().map(|x| (pb.log_density(x), pa.log_density(x))))
        .collect();

    let candidates: Vec<f64> = (0..RMP_GRID_POINTS)
        .map(|i| i as f64 / (RMP_GRID_POINTS - 1) as f64)
        .collect();
    let log_likelihood: Vec<f64> = candidates
        .iter()
        .map(|&rmp| {
            let cross = rmp / 2.0;
            let (lw_own, lw_other) = ((1.0 - cross).ln(), cross.ln());
            terms
                .iter()
                .map(|&(own, other)| log_mix(lw_own, own, lw_other, other))
                .sum()
        })
        .collect();
    let best = log_likelihood.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tolerance = 1e-9 * (1.0 + best.abs());
    (0..RMP_GRID_POINTS)
        .rev()
        .find(|&i| log_likelihood[i] >= best - tolerance)
        .map(|i| candidates[i])
        .unwrap_or(0.0)
}

/// Pairwise learned transfer probabilities for every pair of populations.
pub fn learn_rmp_matrix(populations: &[Vec<&[f64]>]) -> RmpMatrix {
    let k = populations.len();
    let mut m = RmpMatrix::constant(k, 0.0);
    for i in 0..k {
        for j in (i + 1)..k {
            m.set(i, j, learn_pairwise_rmp(&populations[i], &populations[j]));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, StreamSeed};
    use rand::Rng;

    fn sample(n: usize, d: usize, lo: f64, hi: f64, stream: usize) -> Vec<Vec<f64>> {
        let mut rng = StreamSeed(11).stream(Purpose::Metrics, stream);
        (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(lo..hi)).collect())
            .collect()
    }

    fn refs(v: &[Vec<f64>]) -> Vec<&[f64]> {
        v.iter().map(Vec::as_slice).collect()
    }

    #[test]
    fn identical_samples_learn_full_transfer() {
        let a = sample(50, 4, 0.0, 1.0, 0);
        assert_eq!(learn_pairwise_rmp(&refs(&a), &refs(&a)), 1.0);
    }

    #[test]
    fn separated_samples_learn_no_transfer() {
        let a = sample(50, 4, 0.0, 0.1, 0);
        let b = sample(50, 4, 0.9, 1.0, 1);
        assert!(learn_pairwise_rmp(&refs(&a), &refs(&b)) <= 0.01);
    }

    #[test]
    fn collapsed_population_uses_variance_floor() {
        let a = vec![vec![0.5, 0.5]; 10];
        let b = sample(10, 2, 0.0, 1.0, 2);
        let rmp = learn_pairwise_rmp(&refs(&a), &refs(&b));
        assert!((0.0..=1.0).contains(&rmp));
    }

    #[test]
    fn matrix_is_symmetric_with_unit_diagonal() {
        let pops: Vec<Vec<Vec<f64>>> = (0..3).map(|s| sample(20, 3, 0.0, 0.5 + 0.2 * s as f64, s)).collect();
        let views: Vec<Vec<&[f64]>> = pops.iter().map(|p| refs(p)).collect();
        let m = learn_rmp_matrix(&views);
        assert!(m.is_valid());
        let mut c = RmpMatrix::constant(3, 0.3);
        c.set(1, 1, 0.2);
        assert_eq!(c.get(1, 1), 1.0);
        assert!(c.is_valid());
    }
}
