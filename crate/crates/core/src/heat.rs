//! The heat semigroup `e^{Δ/8π}` and its inverses.
//!
//! `e^{Δ/8π} f = 2^{d/2} f ∗ e^{-2π|·|²}`, the Fourier multiplier
//! `e^{-π|ξ|²/2}`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods shadow these whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::gaussian::{AnalyticGaussianSum, AxisFactor};
use crate::grid::Grid;
use crate::spectral::{fourier, inverse_fourier};

/// Residual above which a desmoothing is flagged.
pub const RESIDUAL_FLAG: f64 = 1e-4;
/// Relative spectral tail above which a desmoothing is flagged.
pub const SPECTRAL_TAIL_FLAG: f64 = 1e-3;
/// Outer fraction of the kept frequency band inspected by the tail diagnostic.
pub const TAIL_SHELL: f64 = 0.1;

pub const DEFAULT_REL_THRESHOLD: f64 = 1e-12;
pub const DEFAULT_STRIP_HALFWIDTH: f64 = 3.0;
pub const DEFAULT_Y_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesmoothMethod {
    FourierRegularized,
    ComplexShift,
}

impl DesmoothMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::FourierRegularized => "fourier-regularized",
            Self::ComplexShift => "complex-shift",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DesmoothParams {
    FourierRegularized {
        rel_threshold: f64,
        /// Smallest `|ξ|` among discarded modes; `None` when the full
        /// spectrum was kept.
        cutoff_frequency: Option<f64>,
        kept_modes: usize,
    },
    ComplexShift {
        strip_halfwidth: f64,
        y_nodes: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesmoothReport {
    pub result: SampledField,
    pub method: DesmoothMethod,
    pub params: DesmoothParams,
    /// `sup |smooth(result) - u|`, recomputed.
    pub residual: f64,
    /// `max |Φ̂|` over the outer shell of the kept band, relative to `max |Φ̂|`.
    /// Small for well-posed inputs; of order one when `Φ̂` grows toward the
    /// cutoff.
    pub spectral_tail: f64,
}

impl DesmoothReport {
    pub fn ill_posed(&self) -> bool {
        self.residual > RESIDUAL_FLAG || self.spectral_tail > SPECTRAL_TAIL_FLAG
    }
}

fn multiplier(grid: &Grid, sign: f64) -> Vec<f64> {
    let mut xi = vec![0.0; grid.dim()];
    (0..grid.len())
        .map(|k| {
            grid.point(k, &mut xi);
            (sign * PI * 0.5 * xi.iter().map(|v| v * v).sum::<f64>()).exp()
        })
        .collect()
}

fn norm_at(grid: &Grid, k: usize, buf: &mut [f64]) -> f64 {
    grid.point(k, buf);
    buf.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn spectral_tail(spectrum: &SampledField, kept: &[bool]) -> f64 {
    let grid = spectrum.grid();
    let mut buf = vec![0.0; grid.dim()];
    let vals = spectrum.values();
    let mut peak: f64 = 0.0;
    let mut radius: f64 = 0.0;
    for (k, v) in vals.iter().enumerate() {
        if kept[k] {
            peak = peak.max(v.norm());
            radius = radius.max(norm_at(grid, k, &mut buf));
        }
    }
    if peak == 0.0 {
        return 0.0;
    }
    let inner = (1.0 - TAIL_SHELL) * radius;
    let mut tail: f64 = 0.0;
    for (k, v) in vals.iter().enumerate() {
        if kept[k] && norm_at(grid, k, &mut buf) >= inner {
            tail = tail.max(v.norm());
        }
    }
    tail / peak
}

/// `e^{Δ/8π} f` by the Fourier multiplier.
pub fn smooth(f: &SampledField) -> SampledField {
    let spec = fourier(f);
    let m = multiplier(spec.grid(), -1.0);
    let damped: Vec<Complex64> = spec.values().iter().zip(&m).map(|(v, w)| v * w).collect();
    let back = inverse_fourier(&SampledField::from_parts(*spec.grid(), damped));
    SampledField::from_parts(*f.grid(), back.into_values())
}

/// `2^{d/2} f ∗ e^{-2π|·|²}` by direct quadrature, one axis at a time.
pub fn smooth_convolution(f: &SampledField) -> SampledField {
    let grid = *f.grid();
    let d = grid.dim();
    let n = grid.points_per_axis();
    let h = grid.spacing();
    let weights: Vec<f64> = (0..n)
        .map(|k| {
            let t = k as f64 * h;
            core::f64::consts::SQRT_2 * h * (-2.0 * PI * t * t).exp()
        })
        .collect();
    let mut data = f.values().to_vec();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        let block = stride * n;
        for base in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (i, slot) in line.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..n {
                        acc += data[start + j * stride] * weights[i.abs_diff(j)];
                    }
                    *slot = acc;
                }
                for (i, v) in line.iter().enumerate() {
                    data[start + i * stride] = *v;
                }
            }
        }
    }
    SampledField::from_parts(grid, data)
}

/// Inverse smoothing by Fourier division, dropping modes with
/// `|û| < rel_threshold · max |û|`.
pub fn desmooth_fourier(u: &SampledField, rel_threshold: f64) -> Result<DesmoothReport> {
    if !(rel_threshold > 0.0 && rel_threshold < 1.0) {
        return Err(Error::InvalidParameter("rel_threshold must lie in (0, 1)"));
    }
    let spec = fourier(u);
    let fgrid = *spec.grid();
    let peak = spec.max_abs();
    let m = multiplier(&fgrid, 1.0);
    let mut buf = vec![0.0; fgrid.dim()];
    let mut kept = vec![false; fgrid.len()];
    let mut cutoff: Option<f64> = None;
    let mut values = Vec::with_capacity(fgrid.len());
    for (k, v) in spec.values().iter().enumerate() {
        if peak > 0.0 && v.norm() >= rel_threshold * peak {
            kept[k] = true;
            values.push(v * m[k]);
        } else {
            if peak > 0.0 {
                let r = norm_at(&fgrid, k, &mut buf);
                cutoff = Some(cutoff.map_or(r, |c: f64| c.min(r)));
            }
            values.push(Complex64::new(0.0, 0.0));
        }
    }
    let phi_hat = SampledField::new(fgrid, values)?;
    let tail = spectral_tail(&phi_hat, &kept);
    let result = SampledField::from_parts(*u.grid(), inverse_fourier(&phi_hat).into_values());
    let residual = smooth(&result).sup_distance(u)?;
    Ok(DesmoothReport {
        result,
        method: DesmoothMethod::FourierRegularized,
        params: DesmoothParams::FourierRegularized {
            rel_threshold,
            cutoff_frequency: cutoff,
            kept_modes: kept.iter().filter(|k| **k).count(),
        },
        residual,
        spectral_tail: tail,
    })
}

/// Checks that every width lies in `(0, 2π)`, where the strip construction
/// converges.
pub fn check_strip_convergence(u: &AnalyticGaussianSum) -> Result<()> {
    for t in u.terms() {
        for f in &t.factors {
            if !(f.width > 0.0) {
                return Err(Error::Divergent("width must be positive"));
            }
            if f.width >= 2.0 * PI {
                return Err(Error::Divergent("width must be below 2π"));
            }
        }
    }
    Ok(())
}

/// `√2 ∫_{-Y}^{Y} e^{-2πy²} FT_x[f(· + iy)](ξ) dy` for one axis factor, by
/// the trapezoid rule in `y`.
fn strip_factor(f: &AxisFactor, axis: &Grid, y_max: f64, y_nodes: usize) -> Result<Vec<Complex64>> {
    let dy = 2.0 * y_max / y_nodes as f64;
    let mut acc = vec![Complex64::new(0.0, 0.0); axis.len()];
    let mut line = vec![Complex64::new(0.0, 0.0); axis.len()];
    for k in 0..=y_nodes {
        let y = -y_max + k as f64 * dy;
        let w = if k == 0 || k == y_nodes { 0.5 * dy } else { dy };
        for (j, slot) in line.iter_mut().enumerate() {
            *slot = f.eval_weighted(Complex64::new(axis.node(j), y), -2.0 * PI * y * y)?;
        }
        let ft = fourier(&SampledField::from_parts(*axis, line.clone()));
        for (a, v) in acc.iter_mut().zip(ft.values()) {
            *a += v * w;
        }
    }
    for a in acc.iter_mut() {
        *a *= core::f64::consts::SQRT_2;
    }
    Ok(acc)
}

/// Inverse smoothing by integrating the holomorphic extension of `u` over a
/// strip: `κ(ξ) = 2^{n/2} ∫∫ u(x+iy) e^{-2π(|y|² + i x·ξ)} dx dy`,
/// `Φ = F^{-1} κ`. The integral factorizes over terms and axes.
pub fn desmooth_complex(
    u: &AnalyticGaussianSum,
    grid: &Grid,
    strip_halfwidth: f64,
    y_nodes: usize,
) -> Result<DesmoothReport> {
    if u.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: u.dim(),
        });
    }
    if !(strip_halfwidth > 0.0 && strip_halfwidth.is_finite()) {
        return Err(Error::InvalidParameter("strip half-width must be positive"));
    }
    if y_nodes < 2 {
        return Err(Error::InvalidParameter("need at least 2 strip intervals"));
    }
    check_strip_convergence(u)?;
    let d = grid.dim();
    let axis = grid.with_dim(1)?;
    let fgrid = grid.frequency_grid();
    let n = grid.points_per_axis();
    let mut kappa = vec![Complex64::new(0.0, 0.0); fgrid.len()];
    let mut idx = vec![0usize; d];
    for t in u.terms() {
        let tables = t
            .factors
            .iter()
            .map(|f| strip_factor(f, &axis, strip_halfwidth, y_nodes))
            .collect::<Result<Vec<_>>>()?;
        for (k, slot) in kappa.iter_mut().enumerate() {
            fgrid.multi_index(k, &mut idx);
            let mut v = t.coeff;
            for (a, table) in tables.iter().enumerate() {
                v *= table[idx[a]];
            }
            *slot += v;
        }
        debug_assert_eq!(tables.first().map_or(n, |t| t.len()), n);
    }
    let kappa = SampledField::new(fgrid, kappa)?;
    let tail = spectral_tail(&kappa, &vec![true; fgrid.len()]);
    let result = SampledField::from_parts(*grid, inverse_fourier(&kappa).into_values());
    let target = u.sample(grid, &vec![0.0; d])?;
    let residual = smooth(&result).sup_distance(&target)?;
    Ok(DesmoothReport {
        result,
        method: DesmoothMethod::ComplexShift,
        params: DesmoothParams::ComplexShift {
            strip_halfwidth,
            y_nodes,
        },
        residual,
        spectral_tail: tail,
    })
}

/// Closed form of `e^{-Δ/8π}` applied to `e^{-a x²}` per axis:
/// `Φ̂(ξ) = √(π/a) e^{-(π²/a - π/2) ξ²}`, i.e. `Φ = c e^{-b x²}` with
/// `b = 2πa/(2π - a)` and `c = √(2π/(2π - a))`. Valid for `0 < a < 2π`.
pub fn gaussian_preimage(a: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && a < 2.0 * PI) {
        return Err(Error::Divergent("width must lie in (0, 2π)"));
    }
    let b = 2.0 * PI * a / (2.0 * PI - a);
    let c = (2.0 * PI / (2.0 * PI - a)).sqrt();
    Ok((b, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianTerm;

    fn g1() -> Grid {
        Grid::new(1, 256, 8.0).unwrap()
    }

    fn gauss(grid: Grid, c: f64, a: f64) -> SampledField {
        SampledField::from_fn(grid, |x| {
            Complex64::new(c * (-a * x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn smooth_examples() {
        let g = g1();
        let out = smooth(&gauss(g, 2f64.sqrt(), 2.0 * PI));
        assert!(out.sup_distance(&gauss(g, 1.0, PI)).unwrap() < 1e-12);
        let out = smooth(&gauss(g, 1.0, PI));
        let exact = gauss(g, (2.0f64 / 3.0).sqrt(), 2.0 * PI / 3.0);
        assert!(out.sup_distance(&exact).unwrap() < 1e-12);
        assert_eq!(smooth(&SampledField::zeros(g)).max_abs(), 0.0);
    }

    #[test]
    fn multiplier_matches_convolution() {
        let g = Grid::new(2, 128, 6.0).unwrap();
        let f = SampledField::from_fn(g, |x| {
            Complex64::new((-2.0 * (x[0] - 0.3).powi(2) - x[1] * x[1]).exp(), x[0] * (-x[0] * x[0] - 3.0 * x[1] * x[1]).exp())
        })
        .unwrap();
        assert!(smooth(&f).sup_distance(&smooth_convolution(&f)).unwrap() < 1e-10);
    }

    #[test]
    fn fourier_desmoothing_of_a_gaussian() {
        let g = g1();
        let r = desmooth_fourier(&gauss(g, 1.0, PI), DEFAULT_REL_THRESHOLD).unwrap();
        assert!(r.residual < 1e-8);
        assert!(r.result.sup_distance(&gauss(g, 2f64.sqrt(), 2.0 * PI)).unwrap() < 1e-5);
        assert!(!r.ill_posed());
        let z = desmooth_fourier(&SampledField::zeros(g), DEFAULT_REL_THRESHOLD).unwrap();
        assert_eq!(z.result.max_abs(), 0.0);
        assert_eq!(z.residual, 0.0);
    }

    #[test]
    fn fourier_desmoothing_flags_wide_inputs() {
        let r = desmooth_fourier(&gauss(g1(), 1.0, 7.0), DEFAULT_REL_THRESHOLD).unwrap();
        assert!(r.spectral_tail > 0.5);
        assert!(r.ill_posed());
    }

    #[test]
    fn complex_shift_matches_closed_form() {
        let g = g1();
        for a in [2.0, PI, 4.0] {
            let u = AnalyticGaussianSum::gaussian(a, &[0.0]).unwrap();
            let r = desmooth_complex(&u, &g, 3.0, 64).unwrap();
            let (b, c) = gaussian_preimage(a).unwrap();
            let err = r.result.sup_distance(&gauss(g, c, b)).unwrap();
            assert!(err < 1e-6, "a = {a}: {err}");
            assert!(r.residual < 1e-6, "a = {a}: {}", r.residual);
        }
    }

    #[test]
    fn complex_shift_of_odd_input() {
        let g = g1();
        let u = AnalyticGaussianSum::from_terms(
            1,
            vec![GaussianTerm::new(Complex64::new(1.0, 0.0), vec![AxisFactor::new(1, PI, 0.0)])],
        )
        .unwrap();
        let r = desmooth_complex(&u, &g, 3.0, 64).unwrap();
        assert!(r.residual < 1e-6);
        let v = r.result.values();
        for j in 1..g.len() {
            assert!((v[j] + v[g.len() - j]).norm() < 1e-9);
        }
    }

    #[test]
    fn methods_agree_in_two_dimensions() {
        let g = Grid::new(2, 64, 4.0).unwrap();
        let u = AnalyticGaussianSum::gaussian(3.0, &[0.5, -0.25]).unwrap();
        let c = desmooth_complex(&u, &g, 3.0, 64).unwrap();
        let f = desmooth_fourier(&u.sample(&g, &[0.0, 0.0]).unwrap(), 1e-15).unwrap();
        assert!(c.residual < 1e-6);
        assert!(c.result.sup_distance(&f.result).unwrap() < 1e-6);
    }

    #[test]
    fn strip_rejects_non_members() {
        let g = g1();
        for a in [2.0 * PI + 0.1, 0.0] {
            let u = AnalyticGaussianSum::from_terms(
                1,
                vec![GaussianTerm::new(Complex64::new(1.0, 0.0), vec![AxisFactor::gaussian(a, 0.0)])],
            )
            .unwrap();
            assert!(matches!(desmooth_complex(&u, &g, 3.0, 64), Err(Error::Divergent(_))));
        }
    }

    #[test]
    fn smoothing_commutes_with_grid_shifts() {
        let g = Grid::new(1, 64, 4.0).unwrap();
        let f = SampledField::from_fn(g, |x| Complex64::new((-(x[0] - 0.2).powi(2)).exp(), 0.0)).unwrap();
        let shifted = SampledField::new(g, {
            let mut v = f.values().to_vec();
            v.rotate_right(3);
            v
        })
        .unwrap();
        let a = smooth(&shifted);
        let mut b = smooth(&f).into_values();
        b.rotate_right(3);
        for (x, y) in a.values().iter().zip(&b) {
            assert!((x - y).norm() < 1e-14);
        }
    }
}
