//! Complex fields sampled on a [`Grid`].

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Complex values at every node of a grid, row-major.
///
/// Every constructor rejects NaN and infinite values.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values })
    }

    /// Internal constructor for values already known to be finite.
    pub(crate) fn from_parts(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Samples `f` at every node; `f` receives the node coordinates.
    pub fn from_fn<F: FnMut(&[f64]) -> Complex64>(grid: Grid, mut f: F) -> Result<Self> {
        let mut point = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|flat| {
                grid.point(flat, &mut point);
                f(&point)
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn conj(&self) -> Self {
        Self::from_parts(self.grid, self.values.iter().map(|v| v.conj()).collect())
    }

    pub fn scale(&self, c: Complex64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|v| v * c).collect())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &SampledField, b: Complex64) -> Result<Self> {
        self.grid.ensure_compatible(&other.grid)?;
        Self::new(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        )
    }

    /// Pointwise product.
    pub fn mul(&self, other: &SampledField) -> Result<Self> {
        self.grid.ensure_compatible(&other.grid)?;
        Self::new(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x * y)
                .collect(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// `max_j |self_j - other_j|`.
    pub fn sup_distance(&self, other: &SampledField) -> Result<f64> {
        self.grid.ensure_compatible(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }

    /// Largest magnitude on the outer layer of nodes (any index equal to 0 or
    /// `N-1`). Tails above the working tolerance mean the box is too small.
    pub fn boundary_max(&self) -> f64 {
        let n = self.grid.points_per_axis();
        let mut idx = vec![0usize; self.grid.dim()];
        let mut m: f64 = 0.0;
        for (flat, v) in self.values.iter().enumerate() {
            self.grid.multi_index(flat, &mut idx);
            if idx.iter().any(|&i| i == 0 || i == n - 1) {
                m = m.max(v.norm());
            }
        }
        m
    }

    /// Keeps nodes whose coordinates all lie in `[-r, r]` and returns the sup
    /// distance to `other` over them.
    pub fn sup_distance_within(&self, other: &SampledField, r: f64) -> Result<f64> {
        self.grid.ensure_compatible(&other.grid)?;
        let mut p = vec![0.0; self.grid.dim()];
        let mut m: f64 = 0.0;
        for (flat, (a, b)) in self.values.iter().zip(&other.values).enumerate() {
            self.grid.point(flat, &mut p);
            if p.iter().all(|x| x.abs() <= r) {
                m = m.max((a - b).norm());
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_bad_length() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); 8];
        v[3].re = f64::NAN;
        assert_eq!(SampledField::new(g, v), Err(Error::NonFinite));
        assert!(matches!(
            SampledField::new(g, vec![Complex64::new(0.0, 0.0); 7]),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn boundary_max_picks_outer_layer() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); 64];
        v[g.flat_index(&[3, 3])] = Complex64::new(5.0, 0.0);
        v[g.flat_index(&[0, 4])] = Complex64::new(0.0, 2.0);
        let f = SampledField::new(g, v).unwrap();
        assert_eq!(f.boundary_max(), 2.0);
        assert_eq!(f.max_abs(), 5.0);
    }
}
