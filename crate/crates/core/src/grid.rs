//! Uniform centered grids over `ℝ^d`.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dimensions a grid may carry: a position space of dimension `n ∈ {1, 2}`
/// and its phase space of dimension `2n`.
pub const SUPPORTED_DIMS: [usize; 3] = [1, 2, 4];

/// A tensor-product grid with `N` nodes per axis covering `[-L, L)`.
///
/// Nodes are `x_j = -L + j h` with `h = 2L/N`. Flat indices are row-major,
/// the last axis varying fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    half_extent: f64,
}

impl Grid {
    pub fn new(dim: usize, points_per_axis: usize, half_extent: f64) -> Result<Self> {
        if !SUPPORTED_DIMS.contains(&dim) {
            return Err(Error::InvalidGrid("dimension must be 1, 2 or 4"));
        }
        if !points_per_axis.is_multiple_of(2) {
            return Err(Error::InvalidGrid("points per axis must be even"));
        }
        if points_per_axis < 8 {
            return Err(Error::InvalidGrid("points per axis must be at least 8"));
        }
        if !(half_extent > 0.0) || !half_extent.is_finite() {
            return Err(Error::InvalidGrid("half extent must be positive and finite"));
        }
        Ok(Self {
            dim,
            n: points_per_axis,
            half_extent,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.n as f64
    }

    /// Total number of nodes, `N^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `h^d`, the quadrature weight of one node.
    pub fn cell_volume(&self) -> f64 {
        let mut v = 1.0;
        for _ in 0..self.dim {
            v *= self.spacing();
        }
        v
    }

    /// Coordinate of node `j` along any axis.
    pub fn node(&self, j: usize) -> f64 {
        -self.half_extent + j as f64 * self.spacing()
    }

    pub fn axis_nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Writes the per-axis indices of `flat` into `out` (length `dim`).
    pub fn multi_index(&self, mut flat: usize, out: &mut [usize]) {
        debug_assert_eq!(out.len(), self.dim);
        for slot in out.iter_mut().rev() {
            *slot = flat % self.n;
            flat /= self.n;
        }
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dim);
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    /// Writes the coordinates of node `flat` into `out`.
    pub fn point(&self, mut flat: usize, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        for slot in out.iter_mut().rev() {
            *slot = self.node(flat % self.n);
            flat /= self.n;
        }
    }

    /// Grid on which the Fourier transform of a field on `self` is sampled:
    /// spacing `1/(2L)` and half-extent `N/(4L)`.
    pub fn frequency_grid(&self) -> Grid {
        Grid {
            dim: self.dim,
            n: self.n,
            half_extent: self.n as f64 / (4.0 * self.half_extent),
        }
    }

    /// Same box, twice as many nodes per axis.
    pub fn refined(&self) -> Grid {
        Grid {
            n: 2 * self.n,
            ..*self
        }
    }

    pub fn with_dim(&self, dim: usize) -> Result<Grid> {
        Grid::new(dim, self.n, self.half_extent)
    }

    /// True when the frequency grid coincides with the grid itself
    /// (`L² = N/4`), so that position and frequency share one spacing.
    pub fn is_self_dual(&self) -> bool {
        let target = self.n as f64 / 4.0;
        (self.half_extent * self.half_extent - target).abs() <= 1e-12 * target
    }

    /// Equality up to rounding in the half extent.
    pub fn compatible(&self, other: &Grid) -> bool {
        self.dim == other.dim
            && self.n == other.n
            && (self.half_extent - other.half_extent).abs() <= 1e-12 * self.half_extent
    }

    pub(crate) fn ensure_compatible(&self, other: &Grid) -> Result<()> {
        if self.compatible(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_nodes() {
        let g = Grid::new(1, 8, 4.0).unwrap();
        assert_eq!(g.spacing(), 1.0);
        assert_eq!(
            g.axis_nodes(),
            alloc::vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]
        );
    }

    #[test]
    fn phase_grid_arithmetic() {
        let g = Grid::new(2, 256, 8.0).unwrap();
        assert_eq!(g.len(), 65536);
        assert_eq!(g.spacing(), 1.0 / 16.0);
        assert!(g.is_self_dual());
        assert!(g.frequency_grid().compatible(&g));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(
            Grid::new(1, 7, 4.0),
            Err(Error::InvalidGrid("points per axis must be even"))
        );
        assert!(Grid::new(1, 8, 0.0).is_err());
        assert!(Grid::new(1, 8, -1.0).is_err());
        assert!(Grid::new(3, 8, 1.0).is_err());
        assert!(Grid::new(1, 6, 1.0).is_err());
    }

    #[test]
    fn index_round_trip() {
        let g = Grid::new(4, 8, 1.0).unwrap();
        let mut idx = [0usize; 4];
        for flat in [0, 1, 7, 8, 511, 4095] {
            g.multi_index(flat, &mut idx);
            assert_eq!(g.flat_index(&idx), flat);
        }
        let mut p = [0.0; 4];
        g.point(g.flat_index(&[0, 1, 2, 7]), &mut p);
        assert_eq!(p, [-1.0, -0.75, -0.5, 0.75]);
    }
}
