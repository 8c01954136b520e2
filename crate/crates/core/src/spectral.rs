//! Continuous-convention Fourier transforms and quadratures on grids.
//!
//! The transform is `û(ξ) = ∫ u(x) e^{-2iπ x·ξ} dx`, approximated by the
//! Riemann sum over the grid. With nodes `x_j = -L + jh` and frequencies
//! `ξ_k = -N/(4L) + k/(2L)` the sum reduces to an FFT with `(-1)^j`, `(-1)^k`
//! and `(-1)^{N/2}` sign factors per axis.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::Result;
use crate::fft::{transform_axis, Plan};
use crate::field::SampledField;
use crate::grid::Grid;
use crate::sum::{pairwise_complex, pairwise_map};

fn index_parity(grid: &Grid, flat: usize, idx: &mut [usize]) -> bool {
    grid.multi_index(flat, idx);
    idx.iter().sum::<usize>() % 2 == 1
}

fn transform(f: &SampledField, inverse: bool) -> SampledField {
    let grid = *f.grid();
    let d = grid.dim();
    let n = grid.points_per_axis();
    let out_grid = grid.frequency_grid();
    // Riemann weight of the input grid in either direction.
    let weight = grid.cell_volume();
    // (-1)^{N/2} per axis.
    let global_sign = if (n / 2 * d) % 2 == 1 { -1.0 } else { 1.0 };
    let mut idx = vec![0usize; d];
    let mut data: Vec<Complex64> = f
        .values()
        .iter()
        .enumerate()
        .map(|(flat, v)| if index_parity(&grid, flat, &mut idx) { -v } else { *v })
        .collect();
    let plan = Plan::new(n);
    for axis in 0..d {
        transform_axis(&mut data, d, axis, &plan, inverse);
    }
    for (flat, v) in data.iter_mut().enumerate() {
        let s = if index_parity(&grid, flat, &mut idx) {
            -global_sign
        } else {
            global_sign
        };
        *v *= s * weight;
    }
    SampledField::from_parts(out_grid, data)
}

/// Forward transform; the result lives on `f.grid().frequency_grid()`.
pub fn fourier(f: &SampledField) -> SampledField {
    transform(f, false)
}

/// Inverse transform with kernel `e^{+2iπx·ξ}`; exact inverse of [`fourier`].
pub fn inverse_fourier(f: &SampledField) -> SampledField {
    transform(f, true)
}

/// `⟨f, g⟩ = ∫ f · conj(g)`, conjugate-linear in the second slot.
pub fn inner(f: &SampledField, g: &SampledField) -> Result<Complex64> {
    f.grid().ensure_compatible(g.grid())?;
    let (a, b) = (f.values(), g.values());
    let s = pairwise_map(0, a.len(), &|i| a[i] * b[i].conj());
    Ok(s * f.grid().cell_volume())
}

/// `∫ f` by the Riemann sum over the grid.
pub fn integrate(f: &SampledField) -> Complex64 {
    pairwise_complex(f.values()) * f.grid().cell_volume()
}

/// `∫ f g` (bilinear, no conjugation).
pub fn integrate_product(f: &SampledField, g: &SampledField) -> Result<Complex64> {
    f.grid().ensure_compatible(g.grid())?;
    let (a, b) = (f.values(), g.values());
    Ok(pairwise_map(0, a.len(), &|i| a[i] * b[i]) * f.grid().cell_volume())
}

/// Trigonometric interpolation by an integer `factor` along `axis` of a
/// row-major array with the given `shape`. Output sample `s` sits at input
/// position `s / factor`; original samples are reproduced up to rounding.
pub(crate) fn upsample_axis(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
    factor: usize,
) -> (Vec<Complex64>, Vec<usize>) {
    let n = shape[axis];
    let m = n * factor;
    let inner_stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out_shape = shape.to_vec();
    out_shape[axis] = m;
    let mut out = vec![Complex64::new(0.0, 0.0); outer * m * inner_stride];
    let small = Plan::new(n);
    let large = Plan::new(m);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut padded = vec![Complex64::new(0.0, 0.0); m];
    let scale = 1.0 / n as f64;
    for o in 0..outer {
        for i in 0..inner_stride {
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = data[(o * n + k) * inner_stride + i];
            }
            small.transform(&mut line, false);
            padded.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            padded[..n / 2].copy_from_slice(&line[..n / 2]);
            padded[n / 2 + 1 + m - n..m].copy_from_slice(&line[n / 2 + 1..n]);
            let nyq = line[n / 2] * 0.5;
            padded[n / 2] = nyq;
            padded[m - n / 2] = nyq;
            large.transform(&mut padded, true);
            for (s, v) in padded.iter().enumerate() {
                out[(o * m + s) * inner_stride + i] = v * scale;
            }
        }
    }
    (out, out_shape)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    #[allow(unused_imports)] // inherent methods shadow these whenever std is linked
use num_traits::Float;

    fn gaussian(grid: Grid, a: f64) -> SampledField {
        SampledField::from_fn(grid, |p| {
            Complex64::new((-a * p.iter().map(|x| x * x).sum::<f64>()).exp(), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn unit_gaussian_is_self_dual() {
        let g = Grid::new(1, 256, 8.0).unwrap();
        let u = gaussian(g, PI);
        let uh = fourier(&u);
        assert!(uh.sup_distance(&gaussian(*uh.grid(), PI)).unwrap() < 1e-13);
    }

    #[test]
    fn width_two_gaussian_transform() {
        // Closed form √(π/a) e^{-π²ξ²/a} at a = 2.
        let g = Grid::new(1, 256, 8.0).unwrap();
        let uh = fourier(&gaussian(g, 2.0));
        let expected = SampledField::from_fn(*uh.grid(), |p| {
            Complex64::new((PI / 2.0).sqrt() * (-PI * PI * p[0] * p[0] / 2.0).exp(), 0.0)
        })
        .unwrap();
        assert!(uh.sup_distance(&expected).unwrap() < 1e-13);
    }

    #[test]
    fn shifted_gaussian_picks_up_phase_in_two_dims() {
        let g = Grid::new(2, 64, 4.0).unwrap();
        let b = [0.5, -0.25];
        let u = SampledField::from_fn(g, |p| {
            let r2 = (p[0] - b[0]).powi(2) + (p[1] - b[1]).powi(2);
            Complex64::new((-PI * r2).exp(), 0.0)
        })
        .unwrap();
        let uh = fourier(&u);
        let expected = SampledField::from_fn(*uh.grid(), |q| {
            let r2 = q[0] * q[0] + q[1] * q[1];
            let ph = -2.0 * PI * (q[0] * b[0] + q[1] * b[1]);
            Complex64::new(0.0, ph).exp() * (-PI * r2).exp()
        })
        .unwrap();
        assert!(uh.sup_distance(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn zero_maps_to_zero_and_round_trip_is_identity() {
        let g = Grid::new(1, 64, 3.0).unwrap();
        let z = SampledField::zeros(g);
        assert_eq!(fourier(&z).max_abs(), 0.0);
        let u = SampledField::from_fn(g, |p| Complex64::new(p[0].sin(), p[0].cos() * 0.3)).unwrap();
        let back = inverse_fourier(&fourier(&u));
        assert!(back.grid().compatible(&g));
        let err = back
            .values()
            .iter()
            .zip(u.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn inner_products_of_gaussians() {
        let g = Grid::new(1, 256, 8.0).unwrap();
        let psi0 = gaussian(g, PI).scale(Complex64::new(2f64.powf(0.25), 0.0)).unwrap();
        assert!((inner(&psi0, &psi0).unwrap() - 1.0).norm() < 1e-14);
        let u = gaussian(g, PI);
        assert!((inner(&u, &u).unwrap().re - 0.5f64.sqrt()).abs() < 1e-14);
        assert_eq!(inner(&u, &SampledField::zeros(g)).unwrap(), Complex64::new(0.0, 0.0));
        let other = Grid::new(1, 128, 8.0).unwrap();
        assert!(inner(&u, &SampledField::zeros(other)).is_err());
    }

    #[test]
    fn upsampling_reproduces_samples_and_interpolates() {
        let n = 32;
        let data: Vec<Complex64> = (0..n)
            .map(|j| {
                let x = 2.0 * PI * j as f64 / n as f64;
                Complex64::new((3.0 * x).cos(), (2.0 * x).sin())
            })
            .collect();
        let (up, shape) = upsample_axis(&data, &[n], 0, 4);
        assert_eq!(shape, alloc::vec![4 * n]);
        for (s, v) in up.iter().enumerate() {
            let x = 2.0 * PI * s as f64 / (4 * n) as f64;
            let expect = Complex64::new((3.0 * x).cos(), (2.0 * x).sin());
            assert!((v - expect).norm() < 1e-13);
        }
    }
}
