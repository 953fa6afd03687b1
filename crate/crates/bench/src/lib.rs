//! Fixtures shared by the benches.

use std::f64::consts::PI;

use modspace::{data, Field, GridSpec};

/// Grid with `n` points on `[-L, L)`, `L = n pi / 32`, so `dxi = 1/32` throughout.
pub fn grid(n: usize) -> GridSpec {
    GridSpec::new(n, n as f64 * PI / 32.0).expect("power-of-two grid")
}

/// Small Gaussian with unit width.
pub fn gaussian(n: usize) -> Field {
    data::gaussian(grid(n), 1.0, 0.3, 0.0)
}
