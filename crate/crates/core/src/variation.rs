//! Real-coded variation in the unified cube: simulated binary crossover and
//! bounded polynomial mutation. All outputs stay inside `[0, 1]^d`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OperatorConfig {
    /// SBX distribution index.
    pub eta_c: f64,
    /// Polynomial mutation distribution index.
    pub eta_m: f64,
    /// Probability that a selected pair is recombined at all.
    pub p_c: f64,
    /// Per-variable mutation probability; `None` means `1 / d`.
    pub p_m: Option<f64>,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        Self {
            eta_c: 20.0,
            eta_m: 20.0,
            p_c: 1.0,
            p_m: None,
        }
    }
}

impl OperatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta_c > 0.0 && self.eta_m > 0.0) {
            return Err(Error::Config("distribution indices must be positive".into()));
        }
        let probs = [Some(self.p_c), self.p_m];
        if probs.iter().flatten().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Config("operator probabilities must lie in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn mutation_probability(&self, dim: usize) -> f64 {
        self.p_m.unwrap_or(1.0 / dim.max(1) as f64)
    }
}

/// SBX spread factor for a uniform draw `u` in `[0, 1)`.
pub fn sbx_spread_factor(u: f64, eta: f64) -> f64 {
    let exponent = 1.0 / (eta + 1.0);
    if u <= 0.5 {
        (2.0 * u).powf(exponent)
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(exponent)
    }
}

/// Children of one variable for a given spread factor, before clamping.
/// Their sum equals the parents' sum.
pub fn sbx_children(x1: f64, x2: f64, beta: f64) -> (f64, f64) {
    (
        0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2),
        0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2),
    )
}

/// Simulated binary crossover. With probability `p_c` every variable gets a
/// spread factor from the SBX density, and the two children of each variable
/// are swapped with probability one half. Otherwise the parents are copied.
pub fn sbx_crossover<R: Rng + ?Sized>(
    p1: &[f64],
    p2: &[f64],
    cfg: &OperatorConfig,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    debug_assert_eq!(p1.len(), p2.len());
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    if rng.gen::<f64>() >= cfg.p_c {
        return (c1, c2);
    }
    for i in 0..p1.len() {
        let beta = sbx_spread_factor(rng.gen::<f64>(), cfg.eta_c);
        let (mut a, mut b) = sbx_children(p1[i], p2[i], beta);
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut a, &mut b);
        }
        c1[i] = a.clamp(0.0, 1.0);
        c2[i] = b.clamp(0.0, 1.0);
    }
    (c1, c2)
}

/// Bounded polynomial perturbation of one variable in `[0, 1]` for a uniform
/// draw `r`. A value sitting on a bound can only move inward.
pub fn polynomial_step(x: f64, r: f64, eta: f64) -> f64 {
    let exponent = 1.0 / (eta + 1.0);
    let delta_q = if r < 0.5 {
        let xy = 1.0 - x;
        let val = 2.0 * r + (1.0 - 2.0 * r) * xy.powf(eta + 1.0);
        val.powf(exponent) - 1.0
    } else {
        let xy = x;
        let val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * xy.powf(eta + 1.0);
        1.0 - val.powf(exponent)
    };
    (x + delta_q).clamp(0.0, 1.0)
}

/// Mutates each variable independently with the configured probability.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    x: &[f64],
    cfg: &OperatorConfig,
    rng: &mut R,
) -> Vec<f64> {
    let p_m = cfg.mutation_probability(x.len());
    x.iter()
        .map(|&v| {
            if rng.gen::<f64>() < p_m {
                polynomial_step(v, rng.gen::<f64>(), cfg.eta_m)
            } else {
                v
            }
        })
        .collect()
}
