//! Shared fixtures for the benchmark targets.

use driftlab_core::grid::{Field, Grid};
use driftlab_core::heat::heat_kernel_value;

/// Unit-mass heat-kernel profile on a symmetric grid.
pub fn gaussian_field(half_width: f64, n: usize, t0: f64) -> Field {
    let g = Grid::new(half_width, n).expect("valid grid");
    Field::from_fn(g, |x| heat_kernel_value(t0, x))
}
