//! Continuous-review `(Q, u)` inventory policy: expected annual cost against
//! expected stockouts, with normally distributed lead-time demand.

use super::engineering::{check_box, check_len};
use super::TaskSetting;
use crate::error::{Error, Result};
use crate::normal;

/// Demand `D`, lead-time demand deviation `sigma_L`, cost of capital `r`,
/// setup cost `K`, unit cost `c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InventoryParams {
    pub demand: f64,
    pub lead_time_sd: f64,
    pub capital_rate: f64,
    pub setup_cost: f64,
    pub unit_cost: f64,
}

impl InventoryParams {
    pub fn from_setting(s: &TaskSetting) -> Result<Self> {
        Ok(Self {
            demand: s.require("D")?,
            lead_time_sd: s.require("sigma_L")?,
            capital_rate: s.require("r")?,
            setup_cost: s.require("K")?,
            unit_cost: s.require("c")?,
        })
    }

    /// Economic order quantity `sqrt(2 K D / (r c))`.
    pub fn eoq(&self) -> f64 {
        (2.0 * self.setup_cost * self.demand / (self.capital_rate * self.unit_cost)).sqrt()
    }

    /// `Q` in `[EOQ, D]`, `u` in `[1, D / sigma_L]`.
    pub fn bounds(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let lower = vec![self.eoq(), 1.0];
        let upper = vec![self.demand, self.demand / self.lead_time_sd];
        for i in 0..2 {
            if !(upper[i] > lower[i]) {
                return Err(Error::Config(format!(
                    "inventory variable {} has empty range [{}, {}]",
                    i + 1,
                    lower[i],
                    upper[i]
                )));
            }
        }
        Ok((lower, upper))
    }
}

/// Objective pair without bound checks. `f2` is the expected number of
/// stockout occasions plus the expected number of units short per year.
pub fn inventory_objectives(order_qty: f64, reorder: f64, p: &InventoryParams) -> [f64; 2] {
    let cost = p.setup_cost * p.demand / order_qty
        + (order_qty / 2.0 + reorder * p.lead_time_sd) * p.capital_rate * p.unit_cost;
    let tail = normal::sf(reorder);
    let cycles = p.demand / order_qty;
    // The loss integral is nonnegative; the difference cancels for large u.
    let loss = (normal::pdf(reorder) - reorder * tail).max(0.0);
    let stockouts = cycles * tail + cycles * p.lead_time_sd * loss;
    [cost, stockouts]
}

pub fn eval_im(x: &[f64], p: &InventoryParams) -> Result<Vec<f64>> {
    check_len(x, 2, "IM")?;
    if !(x[0] > 0.0) {
        return Err(Error::Domain(format!("order quantity {} must be positive", x[0])));
    }
    let (lower, upper) = p.bounds()?;
    check_box(x, &lower, &upper, "IM")?;
    Ok(inventory_objectives(x[0], x[1], p).to_vec())
}
