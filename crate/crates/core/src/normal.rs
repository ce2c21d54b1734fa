//! Standard normal density and distribution function.
//!
//! The distribution function is evaluated through the complementary error
//! function of `libm` (the FreeBSD msun rational approximations, accurate to
//! about one ulp), which keeps the upper tail `1 - Phi(u)` accurate for large
//! `u` where `1.0 - cdf(u)` would cancel.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal probability density.
pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal cumulative distribution function.
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail probability `1 - cdf(x)`.
pub fn sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}
