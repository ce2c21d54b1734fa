//! Engineering design objectives: four-bar truss, hatch cover and welded beam.
//!
//! Constraints of the hatch cover and welded beam are folded into the
//! objectives as printed: sums of `max(-g_i, 0)`.

use std::f64::consts::SQRT_2;

use super::TaskSetting;
use crate::error::{Error, Result};

/// Four-bar truss parameters: load `F`, stress `sigma`, length `L`, modulus `E`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrussParams {
    pub force: f64,
    pub stress: f64,
    pub length: f64,
    pub modulus: f64,
}

impl TrussParams {
    pub fn from_setting(s: &TaskSetting) -> Result<Self> {
        Ok(Self {
            force: s.require("F")?,
            stress: s.require("sigma")?,
            length: s.require("L")?,
            modulus: s.require("E")?,
        })
    }

    /// `a = F / sigma`; bars 1 and 4 range over `[a, 3a]`, bars 2 and 3 over `[sqrt(2) a, 3a]`.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let a = self.force / self.stress;
        (
            vec![a, SQRT_2 * a, SQRT_2 * a, a],
            vec![3.0 * a, 3.0 * a, 3.0 * a, 3.0 * a],
        )
    }
}

/// Structural volume and joint displacement of the four-bar truss.
///
/// The volume term uses `sqrt(x3)` exactly as in the published formulation.
pub fn eval_eo1(x: &[f64], p: &TrussParams) -> Result<Vec<f64>> {
    check_len(x, 4, "EO1")?;
    if let Some(i) = x.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Domain(format!("EO1 bar {} has nonpositive length {}", i + 1, x[i])));
    }
    let volume = p.length * (2.0 * x[0] + SQRT_2 * x[1] + x[2].sqrt() + x[3]);
    let displacement = p.force * p.length / p.modulus
        * (2.0 / x[0] + 2.0 * SQRT_2 / x[1] - 2.0 * SQRT_2 / x[2] + 2.0 / x[3]);
    Ok(vec![volume, displacement])
}

/// Hatch cover parameters: modulus `E`, allowed bending stress and deflection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HatchParams {
    pub modulus: f64,
    pub max_bending_stress: f64,
    pub max_deflection: f64,
}

pub const HATCH_LOWER: [f64; 2] = [0.5, 4.0];
pub const HATCH_UPPER: [f64; 2] = [4.0, 50.0];
const HATCH_MAX_SHEAR: f64 = 450.0;

impl HatchParams {
    pub fn from_setting(s: &TaskSetting) -> Result<Self> {
        Ok(Self {
            modulus: s.require("E")?,
            max_bending_stress: s.require("sigma_b_max")?,
            max_deflection: s.require("delta_max")?,
        })
    }
}

/// Hatch cover weight and total constraint violation.
pub fn eval_eo2(x: &[f64], p: &HatchParams) -> Result<Vec<f64>> {
    check_len(x, 2, "EO2")?;
    check_box(x, &HATCH_LOWER, &HATCH_UPPER, "EO2")?;
    let (thickness, height) = (x[0], x[1]);
    let buckling = p.modulus * thickness * thickness / 100.0;
    let bending = 4500.0 / (thickness * height);
    let shear = 1800.0 / height;
    let deflection = 56.2e4 / (p.modulus * thickness * height * height);
    let g = [
        1.0 - bending / p.max_bending_stress,
        1.0 - shear / HATCH_MAX_SHEAR,
        1.0 - deflection / p.max_deflection,
        1.0 - bending / buckling,
    ];
    let violation = g.iter().map(|&gi| (-gi).max(0.0)).sum();
    Ok(vec![thickness + 120.0 * height, violation])
}

/// Welded beam parameters: load `P`, length `L`, modulus `E`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeldedBeamParams {
    pub load: f64,
    pub length: f64,
    pub modulus: f64,
}

pub const BEAM_LOWER: [f64; 4] = [0.125, 0.1, 0.1, 0.125];
pub const BEAM_UPPER: [f64; 4] = [5.0, 10.0, 10.0, 5.0];
const BEAM_SHEAR_MODULUS: f64 = 12e6;
const BEAM_MAX_SHEAR: f64 = 13600.0;
const BEAM_MAX_STRESS: f64 = 30000.0;
const BEAM_PENALTY: f64 = 1000.0;

impl WeldedBeamParams {
    pub fn from_setting(s: &TaskSetting) -> Result<Self> {
        Ok(Self {
            load: s.require("P")?,
            length: s.require("L")?,
            modulus: s.require("E")?,
        })
    }
}

/// Intermediate welded-beam quantities, exposed for testing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamResponse {
    pub primary_shear: f64,
    pub secondary_shear: f64,
    pub shear: f64,
    pub bending_stress: f64,
    pub buckling_load: f64,
    pub violation: f64,
}

pub fn welded_beam_response(x: &[f64], p: &WeldedBeamParams) -> BeamResponse {
    let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
    let (load, length, modulus) = (p.load, p.length, p.modulus);

    let primary_shear = load / (SQRT_2 * x1 * x2);
    let moment = load * (length + x2 / 2.0);
    let half_sum = (x1 + x3) / 2.0;
    let radius = (x2 * x2 / 4.0 + half_sum * half_sum).sqrt();
    let polar = 2.0 * (SQRT_2 * x1 * x2 * (x2 * x2 / 12.0 + half_sum * half_sum));
    let secondary_shear = moment * radius / polar;
    let shear = (primary_shear * primary_shear
        + 2.0 * primary_shear * secondary_shear * x2 / (2.0 * radius)
        + secondary_shear * secondary_shear)
        .sqrt();
    let bending_stress = 6.0 * load * length / (x4 * x3 * x3);
    let buckling_load = 4.013 * modulus * (x3 * x3 * x4.powi(6) / 36.0).sqrt() / (length * length)
        * (1.0 - x3 / (2.0 * length) * (modulus / (4.0 * BEAM_SHEAR_MODULUS)).sqrt());

    let g = [
        BEAM_MAX_SHEAR - shear,
        BEAM_MAX_STRESS - bending_stress,
        x4 - x1,
        buckling_load - load,
    ];
    BeamResponse {
        primary_shear,
        secondary_shear,
        shear,
        bending_stress,
        buckling_load,
        violation: g.iter().map(|&gi| (-gi).max(0.0)).sum(),
    }
}

/// Welded beam cost and end deflection, both penalized by `1000 * violation`.
///
/// The cost keeps the literal `14` of the published formula regardless of `L`.
pub fn eval_eo3(x: &[f64], p: &WeldedBeamParams) -> Result<Vec<f64>> {
    check_len(x, 4, "EO3")?;
    if let Some(i) = x.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Domain(format!("EO3 variable {} is {}", i + 1, x[i])));
    }
    let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
    let penalty = BEAM_PENALTY * welded_beam_response(x, p).violation;
    let cost = 1.10471 * x1 * x1 * x2 + 0.04811 * x3 * x4 * (14.0 + x2) + penalty;
    let deflection =
        4.0 * p.load * p.length.powi(3) / (p.modulus * x4 * x3 * x3 * x3) + penalty;
    Ok(vec![cost, deflection])
}

pub(crate) fn check_len(x: &[f64], want: usize, family: &str) -> Result<()> {
    if x.len() != want {
        return Err(Error::Usage(format!(
            "{family} expects {want} variables, got {}",
            x.len()
        )));
    }
    Ok(())
}

pub(crate) fn check_box(x: &[f64], lower: &[f64], upper: &[f64], family: &str) -> Result<()> {
    for (i, ((&v, &lo), &hi)) in x.iter().zip(lower).zip(upper).enumerate() {
        if !(lo..=hi).contains(&v) {
            return Err(Error::Domain(format!(
                "{family} variable {} = {v} outside [{lo}, {hi}]",
                i + 1
            )));
        }
    }
    Ok(())
}
