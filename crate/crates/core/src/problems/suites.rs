//! Published task settings of the engineering and inventory suites.

use super::{Family, TaskSetting};

pub const SUITE_NAMES: [&str; 6] = ["EO1", "EO2", "EO3", "IM1", "IM2", "IM3"];

const TRUSS: [[f64; 4]; 3] = [
    [10.0, 10.0, 200.0, 2.0e5],
    [8.0, 10.0, 200.0, 1.5e5],
    [8.0, 8.0, 200.0, 1.5e5],
];

const HATCH: [[f64; 3]; 3] = [
    [700_000.0, 700.0, 1.5],
    [500_000.0, 700.0, 2.0],
    [500_000.0, 500.0, 2.0],
];

const BEAM: [[f64; 3]; 3] = [
    [6000.0, 14.0, 3.0e7],
    [4000.0, 14.0, 2.0e7],
    [4000.0, 10.0, 2.0e7],
];

// D, sigma_L, r, K, c
const IM1: [[f64; 5]; 3] = [
    [3412.0, 53.354, 0.26, 80.0, 27.5],
    [490.0, 5.027, 0.3, 80.0, 241.0],
    [4736.0, 57.911, 0.3, 135.0, 29.41],
];
const IM2: [[f64; 5]; 3] = [
    [4736.0, 57.911, 0.3, 135.0, 29.41],
    [200.0, 2.969, 0.26, 80.0, 233.0],
    [215.0, 2.781, 0.3, 80.0, 435.0],
];
const IM3: [[f64; 5]; 3] = [
    [215.0, 2.781, 0.3, 80.0, 435.0],
    [22774.0, 245.333, 0.26, 135.0, 12.6],
    [10557.0, 85.395, 0.26, 135.0, 2.14],
];

fn rows<const N: usize>(keys: [&str; N], table: &[[f64; N]]) -> Vec<TaskSetting> {
    table
        .iter()
        .enumerate()
        .map(|(i, row)| {
            TaskSetting::new(
                format!("Task{}", i + 1),
                keys.iter().zip(row).map(|(k, v)| (k.to_string(), *v)),
            )
        })
        .collect()
}

/// Family and per-task settings of a named suite, or `None` for unknown names.
pub fn suite_settings(name: &str) -> Option<(Family, Vec<TaskSetting>)> {
    const IM_KEYS: [&str; 5] = ["D", "sigma_L", "r", "K", "c"];
    let entry = match name.to_ascii_uppercase().as_str() {
        "EO1" => (Family::Eo1, rows(["F", "sigma", "L", "E"], &TRUSS)),
        "EO2" => (Family::Eo2, rows(["E", "sigma_b_max", "delta_max"], &HATCH)),
        "EO3" => (Family::Eo3, rows(["P", "L", "E"], &BEAM)),
        "IM1" => (Family::Inventory, rows(IM_KEYS, &IM1)),
        "IM2" => (Family::Inventory, rows(IM_KEYS, &IM2)),
        "IM3" => (Family::Inventory, rows(IM_KEYS, &IM3)),
        _ => return None,
    };
    Some(entry)
}
