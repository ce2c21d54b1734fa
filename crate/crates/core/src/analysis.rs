//! Plot-ready views of a set of Pareto sets.
//!
//! The decision view places every solution in a plane: raw unified
//! coordinates when the suite has two variables, otherwise the projection on
//! the two leading principal axes of all tasks' solutions pooled together.
//! The objective view lists raw objective values sorted along each front.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pareto::SetOfParetoSets;

/// Covariance traces at or below this are treated as zero.
const ZERO_VARIANCE: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projection2D {
    pub mean: Vec<f64>,
    pub axes: [Vec<f64>; 2],
    /// Fraction of total variance along each axis.
    pub explained: [f64; 2],
    /// `(task, [c1, c2])` in input order.
    pub coords: Vec<(usize, [f64; 2])>,
}

impl Projection2D {
    pub fn project(&self, x: &[f64]) -> [f64; 2] {
        let dot = |axis: &[f64]| -> f64 {
            axis.iter().zip(x).zip(&self.mean).map(|((a, v), m)| a * (v - m)).sum()
        };
        [dot(&self.axes[0]), dot(&self.axes[1])]
    }

    /// Point of the original space with projected coordinates `c`.
    pub fn reconstruct(&self, c: [f64; 2]) -> Vec<f64> {
        (0..self.mean.len())
            .map(|i| self.mean[i] + c[0] * self.axes[0][i] + c[1] * self.axes[1][i])
            .collect()
    }
}

/// Principal component projection of labelled points onto two axes.
pub fn pca_project<T: AsRef<[f64]>>(points: &[(usize, T)]) -> Result<Projection2D> {
    if points.len() < 3 {
        return Err(Error::Usage(format!("PCA needs at least 3 points, got {}", points.len())));
    }
    let d = points[0].1.as_ref().len();
    if d < 2 {
        return Err(Error::Usage(format!("PCA needs at least 2 dimensions, got {d}")));
    }
    if points.iter().any(|(_, p)| p.as_ref().len() != d) {
        return Err(Error::Usage("points have different dimensions".into()));
    }
    let n = points.len() as f64;
    let mut mean = vec![0.0; d];
    for (_, p) in points {
        for (m, v) in mean.iter_mut().zip(p.as_ref()) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for (_, p) in points {
        let p = p.as_ref();
        for i in 0..d {
            let ei = p[i] - mean[i];
            for j in i..d {
                cov[(i, j)] += ei * (p[j] - mean[j]) / n;
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            cov[(i, j)] = cov[(j, i)];
        }
    }
    let total = cov.trace();
    if !(total > ZERO_VARIANCE) {
        return Err(Error::Degenerate(format!(
            "all {} points coincide; covariance is zero",
            points.len()
        )));
    }

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let axis = |k: usize| -> Vec<f64> {
        let mut v: Vec<f64> = eig.eigenvectors.column(order[k]).iter().copied().collect();
        let lead = (0..d)
            .fold(0, |best, i| if v[i].abs() > v[best].abs() { i } else { best });
        if v[lead] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        v
    };
    let fraction = |k: usize| (eig.eigenvalues[order[k]].max(0.0) / total).clamp(0.0, 1.0);

    let mut projection = Projection2D {
        mean,
        axes: [axis(0), axis(1)],
        explained: [fraction(0), fraction(1)],
        coords: Vec::with_capacity(points.len()),
    };
    projection.coords = points
        .iter()
        .map(|(t, p)| (*t, projection.project(p.as_ref())))
        .collect();
    Ok(projection)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionRow {
    pub task: usize,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveRow {
    pub task: usize,
    pub f1: f64,
    pub f2: f64,
}

/// Decision-space scatter of every solution, tasks in order.
///
/// With more than two unified coordinates the rows hold the shared PCA
/// projection. When PCA is impossible (fewer than three solutions or all of
/// them identical) the first two unified coordinates are used instead.
pub fn export_decision_view(sos: &SetOfParetoSets) -> Vec<DecisionRow> {
    let points: Vec<(usize, &[f64])> = sos
        .archives
        .iter()
        .flat_map(|a| a.members().iter().map(move |m| (a.task(), m.decision.unified.as_slice())))
        .collect();
    let d = points.first().map_or(0, |(_, p)| p.len());
    if d > 2 {
        if let Ok(projection) = pca_project(&points) {
            return projection
                .coords
                .into_iter()
                .map(|(task, c)| DecisionRow { task, c1: c[0], c2: c[1] })
                .collect();
        }
    }
    points
        .into_iter()
        .map(|(task, p)| DecisionRow {
            task,
            c1: p.first().copied().unwrap_or(0.0),
            c2: p.get(1).copied().unwrap_or(0.0),
        })
        .collect()
}

/// Raw objective values, tasks in order and each task sorted by `f1`.
pub fn export_objective_view(sos: &SetOfParetoSets) -> Vec<ObjectiveRow> {
    let mut rows = Vec::new();
    for archive in &sos.archives {
        let mut block: Vec<ObjectiveRow> = archive
            .members()
            .iter()
            .map(|m| ObjectiveRow {
                task: archive.task(),
                f1: m.objectives[0],
                f2: m.objectives[1],
            })
            .collect();
        block.sort_by(|a, b| a.f1.total_cmp(&b.f1).then(b.f2.total_cmp(&a.f2)));
        rows.extend(block);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_has_all_variance_on_first_axis() {
        let pts: Vec<(usize, Vec<f64>)> = (0..10).map(|i| (0, vec![i as f64, 2.0 * i as f64])).collect();
        let p = pca_project(&pts).unwrap();
        assert!((p.explained[0] - 1.0).abs() < 1e-10);
        assert!(p.explained[1].abs() < 1e-10);
        assert!(p.axes[0][1] > 0.0);
    }

    #[test]
    fn identical_points_are_degenerate() {
        let pts = vec![(0, vec![0.5, 0.5, 0.5]); 4];
        assert!(matches!(pca_project(&pts), Err(Error::Degenerate(_))));
    }

    #[test]
    fn too_few_points() {
        let pts = vec![(0, vec![0.0, 1.0]), (1, vec![1.0, 0.0])];
        assert!(matches!(pca_project(&pts), Err(Error::Usage(_))));
    }
}
