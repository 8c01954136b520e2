//! Coherent states, anti-Wick operators and the kernel/Weyl-symbol
//! correspondence.
//!
//! Conventions: `Ψ₀(u) = 2^{n/4} e^{-π|u|²}`, `Ψ_X = τ_X Ψ₀` with
//! `τ_{(x,ξ)} f(u) = f(u - x) e^{2iπ(u - x/2)·ξ}`, and the anti-Wick operator
//! of a symbol `F` has kernel `∫ F(X) Ψ_X(u) conj(Ψ_X(v)) dX`. No `(2π)^{-n}`
//! prefactor is applied: with unit-norm coherent states the symbol `F ≡ 1`
//! must give the identity.
//!
//! Phase-space grids order their axes as `(x_1..x_n, ξ_1..ξ_n)`. The Weyl
//! correspondence needs a self-dual phase grid (`L² = N/4`) and a kernel
//! sampled on the position grid with `2N` nodes over the same box, so that
//! `x ± t/2` falls on kernel nodes whenever `x` and `t` are phase-grid nodes.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods shadow these whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::grid::Grid;
use crate::spectral::{fourier, inner, inverse_fourier, upsample_axis};
use crate::sum::pairwise_map;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A phase-space point `X = (x, ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub position: Vec<f64>,
    pub frequency: Vec<f64>,
}

impl PhasePoint {
    pub fn new(position: Vec<f64>, frequency: Vec<f64>) -> Result<Self> {
        if position.len() != frequency.len() {
            return Err(Error::DimensionMismatch {
                expected: position.len(),
                found: frequency.len(),
            });
        }
        Ok(Self {
            position,
            frequency,
        })
    }

    pub fn origin(n: usize) -> Self {
        Self {
            position: vec![0.0; n],
            frequency: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.position.len()
    }
}

/// Sampled kernel `K_A(x_u, x_v)`; the operator acts by
/// `(Af)(x_u) = Σ_v K[u, v] f(x_v) hⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseKernel {
    grid: Grid,
    matrix: Vec<Complex64>,
}

impl DenseKernel {
    pub fn new(grid: Grid, matrix: Vec<Complex64>) -> Result<Self> {
        let m = grid.len();
        if matrix.len() != m * m {
            return Err(Error::ShapeMismatch {
                expected: m * m,
                found: matrix.len(),
            });
        }
        if !matrix.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, matrix })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            matrix: vec![ZERO; grid.len() * grid.len()],
        }
    }

    /// The identity operator, `I / hⁿ`.
    pub fn identity(grid: Grid) -> Self {
        let mut k = Self::zeros(grid);
        let d = 1.0 / grid.cell_volume();
        let m = grid.len();
        for i in 0..m {
            k.matrix[i * m + i] = Complex64::new(d, 0.0);
        }
        k
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of rows (`Nⁿ`).
    pub fn size(&self) -> usize {
        self.grid.len()
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.size() + col]
    }

    pub fn apply(&self, f: &SampledField) -> Result<SampledField> {
        self.grid.ensure_compatible(f.grid())?;
        let m = self.size();
        let vol = self.grid.cell_volume();
        let fv = f.values();
        let out = (0..m)
            .map(|u| {
                let row = &self.matrix[u * m..(u + 1) * m];
                pairwise_map(0, m, &|v| row[v] * fv[v]) * vol
            })
            .collect();
        SampledField::new(self.grid, out)
    }

    /// `max |K - K†|` entrywise.
    pub fn hermitian_defect(&self) -> f64 {
        let m = self.size();
        let mut worst: f64 = 0.0;
        for u in 0..m {
            for v in u..m {
                let d = self.matrix[u * m + v] - self.matrix[v * m + u].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// `max |K - other|` entrywise.
    pub fn sup_distance(&self, other: &DenseKernel) -> Result<f64> {
        self.grid.ensure_compatible(&other.grid)?;
        Ok(self
            .matrix
            .iter()
            .zip(&other.matrix)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentTerm {
    pub coeff: Complex64,
    pub left: PhasePoint,
    pub right: PhasePoint,
}

/// `Σ_j c_j |Ψ_{X_j}⟩⟨Ψ_{Y_j}|`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoherentCombo {
    pub terms: Vec<CoherentTerm>,
}

impl CoherentCombo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_term(mut self, coeff: Complex64, left: PhasePoint, right: PhasePoint) -> Self {
        self.terms.push(CoherentTerm { coeff, left, right });
        self
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        for t in &self.terms {
            for d in [t.left.dim(), t.right.dim()] {
                if d != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: d,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Operator given by its anti-Wick symbol `F`, sampled on a `2n`-dimensional
/// phase grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiWickFromSymbol {
    symbol: SampledField,
}

impl AntiWickFromSymbol {
    pub fn new(symbol: SampledField) -> Result<Self> {
        let d = symbol.grid().dim();
        if !d.is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: d + 1,
                found: d,
            });
        }
        Ok(Self { symbol })
    }

    pub fn symbol(&self) -> &SampledField {
        &self.symbol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorRep {
    Kernel(DenseKernel),
    Coherent(CoherentCombo),
    AntiWick(AntiWickFromSymbol),
}

impl OperatorRep {
    pub fn apply(&self, f: &SampledField) -> Result<SampledField> {
        apply(self, f)
    }
}

/// Samples the coherent state `Ψ_X` on a position grid.
pub fn coherent_state(point: &PhasePoint, grid: &Grid) -> Result<SampledField> {
    let n = grid.dim();
    if point.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: point.dim(),
        });
    }
    let norm = 2f64.powf(n as f64 / 4.0);
    SampledField::from_fn(*grid, |u| {
        let mut r2 = 0.0;
        let mut phase = 0.0;
        for i in 0..n {
            let (x, xi) = (point.position[i], point.frequency[i]);
            r2 += (u[i] - x) * (u[i] - x);
            phase += (u[i] - 0.5 * x) * xi;
        }
        Complex64::from_polar(norm * (-PI * r2).exp(), 2.0 * PI * phase)
    })
}

/// Contracts `axis` of a row-major array against `table` (`rows × shape[axis]`),
/// replacing that axis by one of length `rows`.
fn contract_axis(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
    table: &[Complex64],
    rows: usize,
) -> (Vec<Complex64>, Vec<usize>) {
    let len = shape[axis];
    let inner_stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out = vec![ZERO; outer * rows * inner_stride];
    for o in 0..outer {
        for r in 0..rows {
            let trow = &table[r * len..(r + 1) * len];
            for i in 0..inner_stride {
                let mut acc = ZERO;
                for (m, t) in trow.iter().enumerate() {
                    acc += t * data[(o * len + m) * inner_stride + i];
                }
                out[(o * rows + r) * inner_stride + i] = acc;
            }
        }
    }
    let mut new_shape = shape.to_vec();
    new_shape[axis] = rows;
    (out, new_shape)
}

/// Assembles the kernel of the anti-Wick operator with symbol `F` on
/// `pos_grid`, by the Riemann sum over the phase grid of `F`.
///
/// Since `Ψ_X(u) conj(Ψ_X(v)) = 2^{n/2} e^{-π(|u-x|² + |v-x|²)} e^{2iπ(u-v)·ξ}`,
/// the ξ-sum only depends on `u - v` and is done once per phase position.
pub fn assemble_antiwick(symbol: &AntiWickFromSymbol, pos_grid: &Grid) -> Result<DenseKernel> {
    let phase = *symbol.symbol.grid();
    let n = pos_grid.dim();
    if phase.dim() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            found: phase.dim(),
        });
    }
    let np = phase.points_per_axis();
    let npos = pos_grid.points_per_axis();
    let h = pos_grid.spacing();
    let ndiff = 2 * npos - 1;
    let m = pos_grid.len();
    let block = np.pow(n as u32);

    // e^{2iπ t_k ξ_j} with t_k = (k - (N-1)) h
    let xi = phase.axis_nodes();
    let mut wave = Vec::with_capacity(ndiff * np);
    for k in 0..ndiff {
        let t = (k as f64 - (npos - 1) as f64) * h;
        for &x in &xi {
            wave.push(Complex64::from_polar(1.0, 2.0 * PI * t * x));
        }
    }
    // e^{-π (u_a - x_b)²}
    let pos = pos_grid.axis_nodes();
    let mut bump = Vec::with_capacity(npos * np);
    for &u in &pos {
        for &x in &xi {
            bump.push((-PI * (u - x) * (u - x)).exp());
        }
    }

    let mut pos_idx = vec![0usize; m * n];
    for flat in 0..m {
        pos_grid.multi_index(flat, &mut pos_idx[flat * n..(flat + 1) * n]);
    }

    let values = symbol.symbol.values();
    let mut matrix = vec![ZERO; m * m];
    let mut xidx = vec![0usize; n];
    let xgrid = Grid::new(n, np, phase.half_extent())?;
    let mut weight = vec![0.0; m];
    for xflat in 0..block {
        let slice = &values[xflat * block..(xflat + 1) * block];
        if slice.iter().all(|v| *v == ZERO) {
            continue;
        }
        xgrid.multi_index(xflat, &mut xidx);
        let mut g = slice.to_vec();
        let mut shape = vec![np; n];
        for axis in 0..n {
            let (next, next_shape) = contract_axis(&g, &shape, axis, &wave, ndiff);
            g = next;
            shape = next_shape;
        }
        for (u, w) in weight.iter_mut().enumerate() {
            let ui = &pos_idx[u * n..(u + 1) * n];
            *w = (0..n).map(|a| bump[ui[a] * np + xidx[a]]).product();
        }
        for u in 0..m {
            let wu = weight[u];
            if wu == 0.0 {
                continue;
            }
            let ui = &pos_idx[u * n..(u + 1) * n];
            let row = &mut matrix[u * m..(u + 1) * m];
            for (v, slot) in row.iter_mut().enumerate() {
                let vi = &pos_idx[v * n..(v + 1) * n];
                let mut k = 0;
                for a in 0..n {
                    k = k * ndiff + (ui[a] + npos - 1 - vi[a]);
                }
                *slot += g[k] * (wu * weight[v]);
            }
        }
    }
    let scale = 2f64.powf(n as f64 / 2.0) * phase.cell_volume();
    for v in matrix.iter_mut() {
        *v *= scale;
    }
    DenseKernel::new(*pos_grid, matrix)
}

/// Kernel of `Σ_j c_j |Ψ_{X_j}⟩⟨Ψ_{Y_j}|` on `pos_grid`.
pub fn kernel_from_coherent(combo: &CoherentCombo, pos_grid: &Grid) -> Result<DenseKernel> {
    combo.check_dim(pos_grid.dim())?;
    let m = pos_grid.len();
    let mut k = DenseKernel::zeros(*pos_grid);
    for t in &combo.terms {
        let left = coherent_state(&t.left, pos_grid)?;
        let right = coherent_state(&t.right, pos_grid)?;
        for (u, l) in left.values().iter().enumerate() {
            let cl = t.coeff * l;
            let row = &mut k.matrix[u * m..(u + 1) * m];
            for (slot, r) in row.iter_mut().zip(right.values()) {
                *slot += cl * r.conj();
            }
        }
    }
    Ok(k)
}

/// Phase grid matching a kernel grid: half as many nodes per axis, same box,
/// twice the dimension. Must be self-dual.
pub fn phase_grid_for_kernel(kernel_grid: &Grid) -> Result<Grid> {
    let nr = kernel_grid.points_per_axis();
    if !nr.is_multiple_of(4) {
        return Err(Error::InvalidGrid(
            "kernel grid needs a multiple of 4 points per axis",
        ));
    }
    let phase = Grid::new(2 * kernel_grid.dim(), nr / 2, kernel_grid.half_extent())?;
    if !phase.is_self_dual() {
        return Err(Error::NotSelfDual {
            points_per_axis: phase.points_per_axis(),
            half_extent: phase.half_extent(),
        });
    }
    Ok(phase)
}

/// Kernel grid matching a phase grid (the inverse of
/// [`phase_grid_for_kernel`]).
pub fn kernel_grid_for_phase(phase: &Grid) -> Result<Grid> {
    if !phase.dim().is_multiple_of(2) {
        return Err(Error::InvalidGrid("phase grid dimension must be even"));
    }
    if !phase.is_self_dual() {
        return Err(Error::NotSelfDual {
            points_per_axis: phase.points_per_axis(),
            half_extent: phase.half_extent(),
        });
    }
    Ok(phase.with_dim(phase.dim() / 2)?.refined())
}

/// `σ(x, ξ) = ∫ e^{-2iπ t·ξ} K(x + t/2, x - t/2) dt` at every phase-grid node.
///
/// For phase node `x_m` and `t_k = k h` the kernel is read at refined indices
/// `2m ± k`; pairs outside the box count as zero.
pub fn weyl_from_kernel(kernel: &DenseKernel) -> Result<SampledField> {
    let kgrid = *kernel.grid();
    let phase = phase_grid_for_kernel(&kgrid)?;
    let n = kgrid.dim();
    let nr = kgrid.points_per_axis() as isize;
    let np = phase.points_per_axis();
    let half = (np / 2) as isize;
    let tgrid = Grid::new(n, np, phase.half_extent())?;
    let block = tgrid.len();
    let msize = kernel.size();

    let mut out = vec![ZERO; phase.len()];
    let mut m_idx = vec![0usize; n];
    let mut j_idx = vec![0usize; n];
    let mut p = vec![0usize; n];
    let mut q = vec![0usize; n];
    let mut slice = vec![ZERO; block];
    for mflat in 0..block {
        tgrid.multi_index(mflat, &mut m_idx);
        for (jflat, slot) in slice.iter_mut().enumerate() {
            tgrid.multi_index(jflat, &mut j_idx);
            let mut inside = true;
            for a in 0..n {
                let k = j_idx[a] as isize - half;
                let pa = 2 * m_idx[a] as isize + k;
                let qa = 2 * m_idx[a] as isize - k;
                if pa < 0 || pa >= nr || qa < 0 || qa >= nr {
                    inside = false;
                    break;
                }
                p[a] = pa as usize;
                q[a] = qa as usize;
            }
            *slot = if inside {
                kernel.matrix[kgrid.flat_index(&p) * msize + kgrid.flat_index(&q)]
            } else {
                ZERO
            };
        }
        let transformed = fourier(&SampledField::from_parts(tgrid, slice.clone()));
        out[mflat * block..(mflat + 1) * block].copy_from_slice(transformed.values());
    }
    SampledField::new(phase, out)
}

/// `K(x, y) = ∫ e^{2iπ(x-y)·ξ} σ((x+y)/2, ξ) dξ` at every node pair of the
/// refined kernel grid.
///
/// Node pairs whose midpoint is a phase node and whose separation is a
/// phase-grid step reproduce the input of [`weyl_from_kernel`] exactly. The
/// other pairs use trigonometric interpolation of `σ` in `x` (midpoints at
/// quarter steps) and a half-step shift in `t`. Separations with `|x - y| ≥ L`
/// along some axis are outside the resolved window and set to zero.
pub fn kernel_from_weyl(symbol: &SampledField) -> Result<DenseKernel> {
    let phase = *symbol.grid();
    let kgrid = kernel_grid_for_phase(&phase)?;
    let n = kgrid.dim();
    let np = phase.points_per_axis();
    let h = phase.spacing();
    let nr = kgrid.points_per_axis() as isize;
    let xi_grid = Grid::new(n, np, phase.half_extent())?;
    let block = xi_grid.len();
    let msize = kgrid.len();

    let mut data = symbol.values().to_vec();
    let mut shape = vec![np; 2 * n];
    for axis in 0..n {
        let (next, next_shape) = upsample_axis(&data, &shape, axis, 4);
        data = next;
        shape = next_shape;
    }
    let sgrid_len = (4 * np).pow(n as u32);

    let mut matrix = vec![ZERO; msize * msize];
    let mut s_idx = vec![0usize; n];
    let mut j_idx = vec![0usize; n];
    let mut xi_pt = vec![0.0; n];
    let mut p = vec![0usize; n];
    let mut q = vec![0usize; n];
    let mut column = vec![ZERO; block];
    for sflat in 0..sgrid_len {
        let mut rem = sflat;
        for a in (0..n).rev() {
            s_idx[a] = rem % (4 * np);
            rem /= 4 * np;
        }
        let src = &data[sflat * block..(sflat + 1) * block];
        for (k, slot) in column.iter_mut().enumerate() {
            xi_grid.point(k, &mut xi_pt);
            let mut shift = 0.0;
            for a in 0..n {
                if s_idx[a] % 2 == 1 {
                    shift += 0.5 * h * xi_pt[a];
                }
            }
            *slot = src[k] * Complex64::from_polar(1.0, 2.0 * PI * shift);
        }
        let g = inverse_fourier(&SampledField::from_parts(xi_grid, column.clone()));
        for (jflat, v) in g.values().iter().enumerate() {
            xi_grid.multi_index(jflat, &mut j_idx);
            let mut inside = true;
            for a in 0..n {
                let s = s_idx[a] as isize;
                let d = 2 * (j_idx[a] as isize - (np / 2) as isize) + s % 2;
                let pa = (s + d) / 2;
                let qa = (s - d) / 2;
                if pa < 0 || pa >= nr || qa < 0 || qa >= nr {
                    inside = false;
                    break;
                }
                p[a] = pa as usize;
                q[a] = qa as usize;
            }
            if inside {
                matrix[kgrid.flat_index(&p) * msize + kgrid.flat_index(&q)] = *v;
            }
        }
    }
    DenseKernel::new(kgrid, matrix)
}

/// Applies an operator to a field on its position grid. Coherent
/// combinations are applied through inner products, never densified.
pub fn apply(op: &OperatorRep, f: &SampledField) -> Result<SampledField> {
    match op {
        OperatorRep::Kernel(k) => k.apply(f),
        OperatorRep::Coherent(c) => {
            let grid = *f.grid();
            c.check_dim(grid.dim())?;
            let mut acc = vec![ZERO; grid.len()];
            for t in &c.terms {
                let right = coherent_state(&t.right, &grid)?;
                let amp = t.coeff * inner(f, &right)?;
                let left = coherent_state(&t.left, &grid)?;
                for (slot, l) in acc.iter_mut().zip(left.values()) {
                    *slot += amp * l;
                }
            }
            SampledField::new(grid, acc)
        }
        OperatorRep::AntiWick(a) => assemble_antiwick(a, f.grid())?.apply(f),
    }
}

/// Closed-form Weyl symbol of the rank-one kernel `|Ψ₀⟩⟨Ψ₀|` in dimension
/// `n`: `2ⁿ e^{-2π|X|²}`.
pub fn vacuum_projector_symbol(phase: &Grid) -> Result<SampledField> {
    let n = phase.dim() / 2;
    let c = SQRT_2.powi(2 * n as i32);
    SampledField::from_fn(*phase, |p| {
        Complex64::new(c * (-2.0 * PI * p.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0)
    })
}
