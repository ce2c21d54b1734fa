//! Black-box problems supplied from outside the crate.
//!
//! Everything is minimized; a maximized quantity such as classification
//! accuracy must be returned negated.

use std::fmt::Debug;

pub trait BlackBoxProblem: Send + Sync + Debug {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn bounds(&self) -> (Vec<f64>, Vec<f64>);
    fn num_objectives(&self) -> usize;
    /// Objectives at a native decision vector inside `bounds()`.
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, String>;
}

/// Synthetic stand-in for an expensive external problem:
/// `f1 = sum x_i^2`, `f2 = sum (x_i - 1)^2` on `[lower, upper]^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereSurrogate {
    pub dim: usize,
    pub lower: f64,
    pub upper: f64,
}

impl BlackBoxProblem for SphereSurrogate {
    fn name(&self) -> &str {
        "sphere-pair"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![self.lower; self.dim], vec![self.upper; self.dim])
    }

    fn num_objectives(&self) -> usize {
        2
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, String> {
        if x.len() != self.dim {
            return Err(format!("expected {} variables, got {}", self.dim, x.len()));
        }
        let f1 = x.iter().map(|v| v * v).sum();
        let f2 = x.iter().map(|v| (v - 1.0) * (v - 1.0)).sum();
        Ok(vec![f1, f2])
    }
}
