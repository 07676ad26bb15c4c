use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Uniform periodic grid straddling the origin.
///
/// The requested span is shifted by less than half a cell so that `x = 0` is
/// exactly the grid point at [`SpatialGrid::zero_index`]. Points are
/// `x_j = (j - zero_index) dx` for `j in 0..n`; the right end of the span is
/// the periodic image of the left end and is not stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    n: usize,
    dx: f64,
    zero_index: usize,
}

impl SpatialGrid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        ensure(x_min.is_finite() && x_max.is_finite(), || "grid bounds must be finite".into())?;
        ensure(x_min < 0.0 && 0.0 < x_max, || {
            format!("grid must straddle the origin, got [{x_min}, {x_max}]")
        })?;
        ensure(n_points >= 16 && n_points.is_multiple_of(2), || {
            format!("grid needs an even number of points >= 16, got {n_points}")
        })?;
        let dx = (x_max - x_min) / n_points as f64;
        let zero_index = (-x_min / dx).round() as usize;
        ensure(zero_index > 0 && zero_index < n_points - 1, || {
            "grid has no interior point at the origin".into()
        })?;
        Ok(Self { n: n_points, dx, zero_index })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Index of the grid point at `x = 0`.
    #[inline]
    pub fn zero_index(&self) -> usize {
        self.zero_index
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - self.zero_index as f64) * self.dx
    }

    pub fn x_min(&self) -> f64 {
        self.x(0)
    }

    /// Right end of the periodic cell (excluded from the grid).
    pub fn x_max(&self) -> f64 {
        self.x(self.n)
    }

    pub fn length(&self) -> f64 {
        self.dx * self.n as f64
    }

    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length()
    }

    /// Wavenumber of FFT bin `j` (standard FFT ordering, Nyquist bin negative).
    #[inline]
    pub fn k(&self, j: usize) -> f64 {
        let m = if j < self.n / 2 { j as f64 } else { j as f64 - self.n as f64 };
        m * self.dk()
    }

    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    pub fn k_nyquist(&self) -> f64 {
        PI / self.dx
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.k(j)).collect()
    }

    /// Index of the grid point at `x`, if `x` lies on the grid to within `1e-9 dx`.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let s = x / self.dx + self.zero_index as f64;
        let j = s.round();
        if (s - j).abs() <= 1e-9 && j >= 0.0 && (j as usize) < self.n {
            Some(j as usize)
        } else {
            None
        }
    }

    /// Number of points in each edge band used for boundary-mass checks.
    pub fn boundary_band(&self) -> usize {
        (self.n / 50).max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_exact_grid_point() {
        let g = SpatialGrid::new(-40.0, 60.0, 4096).unwrap();
        assert_eq!(g.x(g.zero_index()), 0.0);
        assert_eq!(g.zero_index(), 1638);
        assert!((g.length() - 100.0).abs() < 1e-12);
        assert!(g.x_min() < 0.0 && g.x_max() > 0.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(SpatialGrid::new(1.0, 2.0, 64).is_err());
        assert!(SpatialGrid::new(-1.0, 1.0, 15).is_err());
        assert!(SpatialGrid::new(-1.0, 1.0, 17).is_err());
        assert!(SpatialGrid::new(-1.0, 1.0, 8).is_err());
    }

    #[test]
    fn wavenumber_ordering() {
        let g = SpatialGrid::new(-8.0, 8.0, 16).unwrap();
        assert_eq!(g.k(0), 0.0);
        assert!((g.k(1) - g.dk()).abs() < 1e-15);
        assert!((g.k(8) + g.k_nyquist()).abs() < 1e-12);
        assert!((g.k(15) + g.dk()).abs() < 1e-15);
    }

    #[test]
    fn index_lookup() {
        let g = SpatialGrid::new(-10.24, 30.72, 32768).unwrap();
        let j = g.index_of(-0.1).unwrap();
        assert!((g.x(j) + 0.1).abs() < 1e-12);
        assert!(g.index_of(-0.1 + 0.3 * g.dx()).is_none());
    }
}
