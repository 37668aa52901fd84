//! Uniform symmetric 1D mesh and cell-sampled scalar fields.

use crate::error::{Error, Result};

/// Uniform mesh of `n_cells` cells on `[-half_width, half_width]`, cell
/// centers symmetric about the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    half_width: f64,
    n_cells: usize,
    dx: f64,
}

impl Grid {
    pub fn new(half_width: f64, n_cells: usize) -> Result<Grid> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "half_width must be positive and finite, got {half_width}"
            )));
        }
        if n_cells == 0 {
            return Err(Error::InvalidGrid("n_cells must be positive".into()));
        }
        let dx = 2.0 * half_width / n_cells as f64;
        Ok(Grid { half_width, n_cells, dx })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Center of cell `i`; computed on the symmetric lattice so that
    /// `center(n-1-i) == -center(i)` exactly.
    pub fn center(&self, i: usize) -> f64 {
        (2.0 * i as f64 + 1.0 - self.n_cells as f64) * 0.5 * self.dx
    }

    /// Left face of cell `i`; `face(n_cells)` is the right boundary.
    /// Faces mirror exactly: `face(n-i) == -face(i)`.
    pub fn face(&self, i: usize) -> f64 {
        (2.0 * i as f64 - self.n_cells as f64) * 0.5 * self.dx
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_cells).map(move |i| self.center(i))
    }

    /// Whether two grids share the same spacing up to round-off.
    pub fn same_spacing(&self, other: &Grid) -> bool {
        (self.dx - other.dx).abs() <= 1e-12 * self.dx.max(other.dx)
    }

    /// Grid with the same spacing, widened symmetrically to at least
    /// `half_width` (cells added in pairs so centers stay aligned).
    pub fn widened(&self, half_width: f64) -> Grid {
        if half_width <= self.half_width {
            return *self;
        }
        let extra = ((half_width - self.half_width) / self.dx).ceil() as usize;
        Grid {
            half_width: self.half_width + extra as f64 * self.dx,
            n_cells: self.n_cells + 2 * extra,
            dx: self.dx,
        }
    }
}

/// Cell-sampled real function on a [`Grid`] (values at cell centers).
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Field> {
        if values.len() != grid.n_cells() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} cells",
                values.len(),
                grid.n_cells()
            )));
        }
        Ok(Field { grid, values })
    }

    pub fn zeros(grid: Grid) -> Field {
        Field { grid, values: vec![0.0; grid.n_cells()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Field {
        let values = grid.centers().map(f).collect();
        Field { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Signed integral (midpoint rule).
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx()
    }

    /// Mass of |f|.
    pub fn mass(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.grid.dx()
    }

    pub fn norm_sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn norm_l2(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.dx()).sqrt()
    }

    /// Lp norm by the midpoint rule, p >= 1 finite. Values are normalized by
    /// the sup before exponentiation so that very large p does not underflow.
    pub fn norm_lp(&self, p: f64) -> f64 {
        let sup = self.norm_sup();
        if sup == 0.0 {
            return 0.0;
        }
        let sum = self
            .values
            .iter()
            .map(|v| (v.abs() / sup).powf(p))
            .sum::<f64>()
            * self.grid.dx();
        sup * sum.powf(1.0 / p)
    }

    pub fn scaled(&self, c: f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise product; the two fields must live on the same grid.
    pub fn pointwise_mul(&self, other: &Field) -> Result<Field> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Field { grid: self.grid, values })
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Field { grid: self.grid, values })
    }

    fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(
                "fields live on different grids".into(),
            ));
        }
        Ok(())
    }

    /// Centered-difference derivative, one-sided at the boundary cells.
    pub fn derivative(&self) -> Field {
        let n = self.values.len();
        let dx = self.grid.dx();
        let mut d = vec![0.0; n];
        if n == 1 {
            return Field { grid: self.grid, values: d };
        }
        d[0] = (self.values[1] - self.values[0]) / dx;
        d[n - 1] = (self.values[n - 1] - self.values[n - 2]) / dx;
        for i in 1..n - 1 {
            d[i] = (self.values[i + 1] - self.values[i - 1]) / (2.0 * dx);
        }
        Field { grid: self.grid, values: d }
    }

    /// Same values embedded in a wider grid (zero outside), centers aligned.
    pub fn zero_padded(&self, half_width: f64) -> Field {
        let wide = self.grid.widened(half_width);
        if wide == self.grid {
            return self.clone();
        }
        let extra = (wide.n_cells() - self.grid.n_cells()) / 2;
        let mut values = vec![0.0; wide.n_cells()];
        values[extra..extra + self.grid.n_cells()].copy_from_slice(&self.values);
        Field { grid: wide, values }
    }

    /// Restriction to a coarser-extent grid with the same spacing whose
    /// centers are a subset of this field's centers.
    pub fn restricted_to(&self, grid: Grid) -> Result<Field> {
        if !self.grid.same_spacing(&grid) {
            return Err(Error::GridMismatch("restriction requires equal spacing".into()));
        }
        let dx = self.grid.dx();
        let shift = (grid.center(0) - self.grid.center(0)) / dx;
        let offset = shift.round();
        if (shift - offset).abs() > 1e-9 || offset < 0.0 {
            return Err(Error::GridMismatch(
                "target grid centers are not aligned with the source lattice".into(),
            ));
        }
        let offset = offset as usize;
        if offset + grid.n_cells() > self.grid.n_cells() {
            return Err(Error::GridMismatch("target grid extends beyond the source".into()));
        }
        let values = self.values[offset..offset + grid.n_cells()].to_vec();
        Field::new(grid, values)
    }

    /// Value of the piecewise-linear interpolant through the cell-center
    /// samples. The interpolant falls linearly to zero at the domain
    /// boundaries and vanishes outside.
    pub fn interp_value(&self, x: f64) -> f64 {
        let g = &self.grid;
        let l = g.half_width();
        if x.abs() >= l || self.values.is_empty() {
            return 0.0;
        }
        let first = g.center(0);
        let last = g.center(g.n_cells() - 1);
        if x <= first {
            // between -L (value 0) and the first center
            let w = (x + l) / (g.dx() / 2.0);
            return w * self.values[0];
        }
        if x >= last {
            let w = (l - x) / (g.dx() / 2.0);
            return w * self.values[g.n_cells() - 1];
        }
        let s = (x - first) / g.dx();
        let i = (s.floor() as usize).min(g.n_cells() - 2);
        let frac = s - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }
}
