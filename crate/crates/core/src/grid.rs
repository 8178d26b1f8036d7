//! Cell-centered tensor grids on boxes and the scalar fields that live on them.
//!
//! Cells are indexed row-major: `idx = j * nx + i`, with `j = 0` and `ny = 1`
//! in one dimension. Cell centers sit at `(i + 1/2) h`, so no unknown ever
//! coincides with the boundary. All integrals use the midpoint rule.

use crate::error::{Error, Result};

/// Uniform, isotropic cell-centered grid on `(0, lx)` or `(0, lx) x (0, ly)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    lx: f64,
    ly: f64,
    nx: usize,
    ny: usize,
    h: f64,
}

impl GridSpec {
    pub fn line(lx: f64, nx: usize) -> Result<Self> {
        if !(lx.is_finite() && lx > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "extent must be positive, got {lx}"
            )));
        }
        if nx < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 cells, got {nx}"
            )));
        }
        Ok(Self {
            dim: 1,
            lx,
            ly: 1.0,
            nx,
            ny: 1,
            h: lx / nx as f64,
        })
    }

    /// Rectangle with square cells; `ly / ny` must equal `lx / nx`.
    pub fn rect(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        let mut g = Self::line(lx, nx)?;
        if !(ly.is_finite() && ly > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "extent must be positive, got {ly}"
            )));
        }
        if ny < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 cells, got {ny}"
            )));
        }
        let hy = ly / ny as f64;
        if ((hy - g.h) / g.h).abs() > 1e-12 {
            return Err(Error::InvalidGrid(format!(
                "spacing must be isotropic: lx/nx = {} but ly/ny = {hy}",
                g.h
            )));
        }
        g.dim = 2;
        g.ly = ly;
        g.ny = ny;
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    /// Cells along y; 1 for a line.
    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn extents(&self) -> (f64, f64) {
        (self.lx, self.ly)
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Measure of a single cell, `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        match self.dim {
            1 => self.lx,
            _ => self.lx * self.ly,
        }
    }

    pub fn center(&self, idx: usize) -> [f64; 2] {
        let i = idx % self.nx;
        let j = idx / self.nx;
        let x = (i as f64 + 0.5) * self.h;
        let y = if self.dim == 1 {
            0.0
        } else {
            (j as f64 + 0.5) * self.h
        };
        [x, y]
    }

    /// Same grid refined by `factor` along every axis.
    pub fn refined(&self, factor: usize) -> Self {
        let mut g = *self;
        g.nx *= factor;
        if self.dim == 2 {
            g.ny *= factor;
        }
        g.h = self.lx / g.nx as f64;
        g
    }
}

/// Cell values of a scalar on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field values"));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Samples `f` at cell centers.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|k| {
                let [x, y] = grid.center(k);
                f(x, y)
            })
            .collect();
        Self { grid, values }
    }

    /// Internal constructor for values already known to fit the grid.
    pub(crate) fn from_raw(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field::from_raw(self.grid, self.values.iter().map(|&x| f(x)).collect())
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        self.same_grid(other)?;
        Ok(Field::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Midpoint-rule integral over the domain.
    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// Discrete `L^p` norm for `p >= 1`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::param("p", format!("need 1 <= p < inf, got {p}")));
        }
        let vol = self.grid.cell_volume();
        let s = if p == 1.0 {
            self.values.iter().map(|v| v.abs()).sum::<f64>()
        } else if p == 2.0 {
            self.values.iter().map(|v| v * v).sum::<f64>()
        } else {
            self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>()
        };
        Ok((s * vol).powf(1.0 / p))
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Average value, `integrate(f) / |Omega|`.
    pub fn mean(&self) -> f64 {
        self.integrate() / self.grid.volume()
    }

    /// Discrete inner product `sum f g h^dim`.
    pub fn dot(&self, other: &Field) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.grid.cell_volume())
    }

    /// `max |f - g|` over cells.
    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit(nx: usize) -> GridSpec {
        GridSpec::line(1.0, nx).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::line(1.0, 1).is_err());
        assert!(GridSpec::line(0.0, 4).is_err());
        assert!(GridSpec::rect(1.0, 2.0, 4, 4).is_err());
        let g = GridSpec::rect(1.0, 2.0, 4, 8).unwrap();
        assert_eq!(g.len(), 32);
        assert_relative_eq!(g.volume(), 2.0);
    }

    #[test]
    fn centers_avoid_boundary() {
        let g = unit(4);
        assert_relative_eq!(g.center(0)[0], 0.125);
        assert_relative_eq!(g.center(3)[0], 0.875);
    }

    #[test]
    fn integrate_examples() {
        for nx in [2, 7, 64] {
            assert_relative_eq!(
                Field::constant(unit(nx), 3.0).integrate(),
                3.0,
                epsilon = 1e-14
            );
        }
        assert_eq!(Field::zeros(unit(5)).integrate(), 0.0);
        let f = Field::from_fn(unit(4), |x, _| x);
        assert_relative_eq!(f.integrate(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn lp_norm_examples() {
        let g = unit(8);
        for p in [1.0, 2.0, 3.5] {
            assert_relative_eq!(
                Field::constant(g, -1.5).lp_norm(p).unwrap(),
                1.5,
                epsilon = 1e-14
            );
        }
        let two = Field::new(GridSpec::line(2.0, 2).unwrap(), vec![3.0, 4.0]).unwrap();
        assert_relative_eq!(two.lp_norm(2.0).unwrap(), 5.0, epsilon = 1e-14);

        let half = Field::new(g, (0..8).map(|k| if k < 4 { 2.0 } else { 0.0 }).collect()).unwrap();
        // sum = 4 cells * 2^3 * (1/8) = 4
        assert_relative_eq!(
            half.lp_norm(3.0).unwrap(),
            2.0 * 0.5f64.powf(1.0 / 3.0),
            epsilon = 1e-14
        );
        assert!(half.lp_norm(0.5).is_err());
    }

    #[test]
    fn linf_and_mean_examples() {
        assert_eq!(Field::constant(unit(3), -2.0).linf_norm(), 2.0);
        assert_eq!(Field::zeros(unit(3)).linf_norm(), 0.0);

        let s = Field::from_fn(unit(8), |x, _| (2.0 * std::f64::consts::PI * x).sin());
        let oracle = (0..8)
            .map(|i| ((2.0 * std::f64::consts::PI * (i as f64 + 0.5) / 8.0).sin()).abs())
            .fold(0.0, f64::max);
        assert_eq!(s.linf_norm(), oracle);

        assert_relative_eq!(Field::constant(unit(9), 0.7).mean(), 0.7, epsilon = 1e-15);
        assert_relative_eq!(
            Field::from_fn(unit(10), |x, _| x).mean(),
            0.5,
            epsilon = 1e-15
        );
        let mut spike = vec![0.0; 16];
        spike[5] = 16.0;
        assert_relative_eq!(
            Field::new(unit(16), spike).unwrap().mean(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Field::new(unit(2), vec![1.0, f64::NAN]).is_err());
        assert!(Field::new(unit(2), vec![1.0]).is_err());
    }
}
