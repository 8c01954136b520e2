//! Values checked against closed forms or brute-force quadrature written
//! independently of the library code paths.

use std::f64::consts::PI;

use antiwick_core::gsnorm::{hermite_bound_margin, hermite_sup, phi_weight, psi_weight, WeightParams};
use antiwick_core::heat::{gaussian_preimage, smooth};
use antiwick_core::quantize::{kernel_from_coherent, weyl_from_kernel, CoherentCombo, PhasePoint};
use antiwick_core::spectral::fourier;
use antiwick_core::*;

fn gauss(grid: Grid, c: f64, a: f64) -> SampledField {
    SampledField::from_fn(grid, |x| Complex64::new(c * (-a * x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0))
        .unwrap()
}

#[test]
fn gaussian_fourier_transform() {
    let g = Grid::new(1, 256, 8.0).unwrap();
    for a in [0.5, PI, 5.0] {
        let fh = fourier(&gauss(g, 1.0, a));
        let exact = gauss(*fh.grid(), (PI / a).sqrt(), PI * PI / a);
        assert!(fh.sup_distance(&exact).unwrap() < 1e-12, "a = {a}");
    }
}

#[test]
fn smoothing_against_brute_force_convolution() {
    let g = Grid::new(1, 200, 6.0).unwrap();
    let h = g.spacing();
    let f = |x: f64| (x - 0.4) * (-1.7 * (x - 0.4).powi(2)).exp();
    let sampled = SampledField::from_fn(g, |x| Complex64::new(f(x[0]), 0.0)).unwrap();
    let out = smooth(&sampled);
    for j in (0..g.len()).step_by(7) {
        let x = g.node(j);
        let mut acc = 0.0;
        for k in -4000..=4000 {
            let y = k as f64 * h / 10.0;
            acc += f(x - y) * (-2.0 * PI * y * y).exp();
        }
        let exact = 2f64.sqrt() * acc * h / 10.0;
        assert!((out.values()[j].re - exact).abs() < 1e-10, "x = {x}");
    }
}

#[test]
fn displaced_projector_has_gaussian_wigner_function() {
    let kgrid = Grid::new(1, 512, 8.0).unwrap();
    let (x0, xi0) = (0.7, -1.1);
    let p = PhasePoint::new(vec![x0], vec![xi0]).unwrap();
    let combo = CoherentCombo::new().with_term(Complex64::new(1.0, 0.0), p.clone(), p);
    let sigma = weyl_from_kernel(&kernel_from_coherent(&combo, &kgrid).unwrap()).unwrap();
    let exact = SampledField::from_fn(*sigma.grid(), |z| {
        Complex64::new(2.0 * (-2.0 * PI * ((z[0] - x0).powi(2) + (z[1] - xi0).powi(2))).exp(), 0.0)
    })
    .unwrap();
    assert!(sigma.sup_distance(&exact).unwrap() < 1e-10);
}

#[test]
fn heat_preimage_widths() {
    // e^{Δ/8π} maps c e^{-b x²} to e^{-a x²}: check by the Gaussian convolution
    // law directly, √(2)c·√(π/(b+2π))·e^{-2πb x²/(b+2π)}.
    for a in [1.0, 2.0, PI, 4.0, 6.0] {
        let (b, c) = gaussian_preimage(a).unwrap();
        let width = 2.0 * PI * b / (b + 2.0 * PI);
        let amp = 2f64.sqrt() * c * (PI / (b + 2.0 * PI)).sqrt();
        assert!((width - a).abs() < 1e-12);
        assert!((amp - 1.0).abs() < 1e-12, "a = {a}: {amp}");
    }
}

#[test]
fn weight_values() {
    let w = WeightParams::new(0.5, 0.25, 1.0).unwrap();
    assert_eq!(phi_weight(&[1.0], &w), 0.25);
    assert_eq!(psi_weight(&[1.0], &w), 1.5);
}

#[test]
fn hermite_values_by_calculus() {
    assert!((hermite_sup(1) - (-0.5f64).exp()).abs() < 1e-12);
    // d²/dx² e^{-x²/2} = (x² - 1) e^{-x²/2}; |·| peaks at x = 0 with value 1.
    assert!((hermite_sup(2) - 1.0).abs() < 1e-12);
    assert!((hermite_bound_margin(0) - 2.2390).abs() < 1e-4);
}
