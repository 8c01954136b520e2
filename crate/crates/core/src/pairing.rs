//! Evaluation of the anti-Wick symbol as a functional:
//! `⟨T(A), u⟩ = ∫ σ^Weyl(A) Φ` where `e^{Δ/8π} Φ = u`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::gaussian::AnalyticGaussianSum;
use crate::grid::Grid;
use crate::heat::{
    desmooth_complex, desmooth_fourier, smooth, DesmoothMethod, DesmoothReport,
    DEFAULT_REL_THRESHOLD, DEFAULT_STRIP_HALFWIDTH, DEFAULT_Y_NODES,
};
use crate::quantize::{kernel_from_coherent, kernel_grid_for_phase, weyl_from_kernel, OperatorRep};
use crate::spectral::integrate_product;
use crate::sum::pairwise_map;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingParams {
    pub rel_threshold: f64,
    pub strip_halfwidth: f64,
    pub y_nodes: usize,
}

impl Default for PairingParams {
    fn default() -> Self {
        Self {
            rel_threshold: DEFAULT_REL_THRESHOLD,
            strip_halfwidth: DEFAULT_STRIP_HALFWIDTH,
            y_nodes: DEFAULT_Y_NODES,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairingResult {
    pub value: Complex64,
    pub method: DesmoothMethod,
    /// Residual of the heat inversion.
    pub residual: f64,
    pub spectral_tail: f64,
    /// `|value - value on every other node|`.
    pub quadrature_error_estimate: f64,
    /// The heat inversion was flagged as unreliable.
    pub flagged: bool,
}

/// Weyl symbol of an operator on a `2n`-dimensional phase grid.
pub fn weyl_symbol(op: &OperatorRep, phase_grid: &Grid) -> Result<SampledField> {
    let sigma = match op {
        OperatorRep::Kernel(k) => weyl_from_kernel(k)?,
        OperatorRep::Coherent(c) => {
            let kgrid = kernel_grid_for_phase(phase_grid)?;
            weyl_from_kernel(&kernel_from_coherent(c, &kgrid)?)?
        }
        OperatorRep::AntiWick(a) => {
            phase_grid.ensure_compatible(a.symbol().grid())?;
            smooth(a.symbol())
        }
    };
    phase_grid.ensure_compatible(sigma.grid())?;
    Ok(sigma)
}

/// Heat inversion of `u` on `grid` by the chosen method.
pub fn desmooth(
    u: &AnalyticGaussianSum,
    grid: &Grid,
    method: DesmoothMethod,
    params: &PairingParams,
) -> Result<DesmoothReport> {
    match method {
        DesmoothMethod::ComplexShift => {
            desmooth_complex(u, grid, params.strip_halfwidth, params.y_nodes)
        }
        DesmoothMethod::FourierRegularized => {
            desmooth_fourier(&u.sample(grid, &vec![0.0; grid.dim()])?, params.rel_threshold)
        }
    }
}

/// `∫ f g` over the nodes with even indices only, on the grid of step `2h`.
fn coarse_product(f: &SampledField, g: &SampledField) -> Complex64 {
    let grid = f.grid();
    let d = grid.dim();
    let n = grid.points_per_axis();
    let half = n / 2;
    let count = half.pow(d as u32);
    let (a, b) = (f.values(), g.values());
    let index = |mut c: usize| {
        let mut flat = 0;
        let mut stride = 1;
        for _ in 0..d {
            flat += 2 * (c % half) * stride;
            c /= half;
            stride *= n;
        }
        flat
    };
    let s = pairwise_map(0, count, &|c| {
        let k = index(c);
        a[k] * b[k]
    });
    s * grid.cell_volume() * (1u64 << d) as f64
}

/// `⟨T(A), u⟩` for a test function on the phase space.
pub fn antiwick_pair(
    op: &OperatorRep,
    u: &AnalyticGaussianSum,
    phase_grid: &Grid,
    method: DesmoothMethod,
    params: &PairingParams,
) -> Result<PairingResult> {
    if u.dim() != phase_grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: phase_grid.dim(),
            found: u.dim(),
        });
    }
    let sigma = weyl_symbol(op, phase_grid)?;
    let report = desmooth(u, phase_grid, method, params)?;
    let phi = &report.result;
    // Bilinear pairing written through the sesquilinear product.
    let value = crate::spectral::inner(&sigma, &phi.conj())?;
    let coarse = coarse_product(&sigma, phi);
    Ok(PairingResult {
        value,
        method,
        residual: report.residual,
        spectral_tail: report.spectral_tail,
        quadrature_error_estimate: (value - coarse).norm(),
        flagged: report.ill_posed(),
    })
}

/// `∫ F u` by direct quadrature on the grid of `F`.
pub fn antiwick_pair_reference(f: &SampledField, u: &AnalyticGaussianSum) -> Result<Complex64> {
    let grid = *f.grid();
    if u.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: u.dim(),
        });
    }
    let samples = u.sample(&grid, &vec![0.0; grid.dim()])?;
    integrate_product(f, &samples)
}

/// Pairs every operator with every test function.
pub fn pair_family(
    ops: &[OperatorRep],
    tests: &[AnalyticGaussianSum],
    phase_grid: &Grid,
    method: DesmoothMethod,
    params: &PairingParams,
) -> Result<Vec<Vec<PairingResult>>> {
    ops.iter()
        .map(|op| {
            tests
                .iter()
                .map(|u| antiwick_pair(op, u, phase_grid, method, params))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{AxisFactor, GaussianTerm};
    use crate::quantize::{
        assemble_antiwick, vacuum_projector_symbol, AntiWickFromSymbol, CoherentCombo, DenseKernel,
        PhasePoint,
    };
    use core::f64::consts::PI;

    fn phase() -> Grid {
        Grid::new(2, 128, 32f64.sqrt()).unwrap()
    }

    fn symbol(grid: Grid, f: impl Fn(&[f64]) -> f64) -> AntiWickFromSymbol {
        AntiWickFromSymbol::new(SampledField::from_fn(grid, |x| Complex64::new(f(x), 0.0)).unwrap())
            .unwrap()
    }

    #[test]
    fn weyl_symbol_examples() {
        let g = phase();
        let one = weyl_symbol(&OperatorRep::AntiWick(symbol(g, |_| 1.0)), &g).unwrap();
        assert!(one.values().iter().all(|v| (v - 1.0).norm() < 1e-12));
        let combo = CoherentCombo::new().with_term(
            Complex64::new(1.0, 0.0),
            PhasePoint::origin(1),
            PhasePoint::origin(1),
        );
        let s = weyl_symbol(&OperatorRep::Coherent(combo), &g).unwrap();
        assert!(s.sup_distance(&vacuum_projector_symbol(&g).unwrap()).unwrap() < 1e-9);
        let zero = DenseKernel::zeros(kernel_grid_for_phase(&g).unwrap());
        assert_eq!(weyl_symbol(&OperatorRep::Kernel(zero), &g).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn pairing_examples() {
        let g = phase();
        let u = AnalyticGaussianSum::gaussian(PI, &[0.0, 0.0]).unwrap();
        let params = PairingParams::default();
        let one = OperatorRep::AntiWick(symbol(g, |_| 1.0));
        let r = antiwick_pair(&one, &u, &g, DesmoothMethod::ComplexShift, &params).unwrap();
        assert!((r.value - 1.0).norm() < 1e-6 && !r.flagged);
        let gauss = OperatorRep::AntiWick(symbol(g, |x| (-PI * (x[0] * x[0] + x[1] * x[1])).exp()));
        let r = antiwick_pair(&gauss, &u, &g, DesmoothMethod::ComplexShift, &params).unwrap();
        assert!((r.value - 0.5).norm() < 1e-6);
        let zero = OperatorRep::Kernel(DenseKernel::zeros(kernel_grid_for_phase(&g).unwrap()));
        let r = antiwick_pair(&zero, &u, &g, DesmoothMethod::ComplexShift, &params).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn reference_examples() {
        let g = phase();
        let one = SampledField::from_fn(g, |_| Complex64::new(1.0, 0.0)).unwrap();
        let u = AnalyticGaussianSum::gaussian(PI, &[0.0, 0.0]).unwrap();
        assert!((antiwick_pair_reference(&one, &u).unwrap() - 1.0).norm() < 1e-12);
        let odd = AnalyticGaussianSum::from_terms(
            2,
            vec![GaussianTerm::new(
                Complex64::new(1.0, 0.0),
                vec![AxisFactor::new(1, PI, 0.0), AxisFactor::gaussian(PI, 0.0)],
            )],
        )
        .unwrap();
        assert!(antiwick_pair_reference(&one, &odd).unwrap().norm() < 1e-12);
        let f = u.sample(&g, &[0.0, 0.0]).unwrap();
        assert!((antiwick_pair_reference(&f, &u).unwrap() - 0.5).norm() < 1e-12);
    }

    #[test]
    fn assembled_operator_matches_reference() {
        let g = phase();
        let f = symbol(g, |x| (-(x[0] - 0.3).powi(2) - 0.5 * x[1] * x[1]).exp() + 0.5);
        let kernel = assemble_antiwick(&f, &kernel_grid_for_phase(&g).unwrap()).unwrap();
        let u = AnalyticGaussianSum::gaussian(3.0, &[0.2, -0.1]).unwrap();
        let r = antiwick_pair(
            &OperatorRep::Kernel(kernel),
            &u,
            &g,
            DesmoothMethod::ComplexShift,
            &PairingParams::default(),
        )
        .unwrap();
        let reference = antiwick_pair_reference(f.symbol(), &u).unwrap();
        assert!((r.value - reference).norm() < 1e-3 * (1.0 + reference.norm()));
    }

    #[test]
    fn wide_test_functions_are_flagged() {
        let g = phase();
        let u = AnalyticGaussianSum::gaussian(7.0, &[0.0, 0.0]).unwrap();
        let one = OperatorRep::AntiWick(symbol(g, |_| 1.0));
        let params = PairingParams::default();
        let r = antiwick_pair(&one, &u, &g, DesmoothMethod::FourierRegularized, &params).unwrap();
        assert!(r.flagged);
        assert!(matches!(
            antiwick_pair(&one, &u, &g, DesmoothMethod::ComplexShift, &params),
            Err(Error::Divergent(_))
        ));
    }
}
