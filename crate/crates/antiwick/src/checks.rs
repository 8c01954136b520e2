//! Verification suites behind `antiwick check`.

use std::f64::consts::PI;

use antiwick_core::gsnorm::{
    e_space_divergence, e_space_norm, gevrey_order_estimate, gs_constant, hermite_margins,
    hermite_norm_slacks, holo_bound_check, power_sum_slack, sup_ratio_slack, WeightParams,
};
use antiwick_core::heat::{
    desmooth_complex, desmooth_fourier, gaussian_preimage, smooth, DEFAULT_REL_THRESHOLD,
};
use antiwick_core::pairing::{antiwick_pair, antiwick_pair_reference, PairingParams};
use antiwick_core::quantize::{assemble_antiwick, kernel_grid_for_phase, AntiWickFromSymbol, OperatorRep};
use antiwick_core::heat::DesmoothMethod;
use antiwick_core::{AnalyticGaussianSum, AxisFactor, Complex64, Error, GaussianTerm, Grid};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

pub const SUITES: [&str; 7] = [
    "hermite-bound",
    "gs-constant",
    "holo-bound",
    "e-space",
    "gevrey",
    "heat-roundtrip",
    "pairing-consistency",
];

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub params: Value,
    pub values: Value,
    pub pass: bool,
    /// A numerical flag was raised (ill-posed inversion or divergence).
    pub flagged: bool,
}

impl CheckReport {
    fn new(suite: &str, params: Value, values: Value, pass: bool) -> Self {
        Self {
            suite: suite.into(),
            params,
            values,
            pass,
            flagged: false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    /// Largest Hermite order for `hermite-bound`.
    pub m_max: usize,
    /// Extra test-function width for `pairing-consistency`.
    pub wide: Option<f64>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { m_max: 200, wide: None }
    }
}

pub fn run(suite: &str, opts: &CheckOptions) -> CliResult<CheckReport> {
    match suite {
        "hermite-bound" => hermite_bound(opts.m_max),
        "gs-constant" => gs_suite(),
        "holo-bound" => holo_suite(),
        "e-space" => e_space_suite(),
        "gevrey" => gevrey_suite(),
        "heat-roundtrip" => heat_suite(),
        "pairing-consistency" => pairing_suite(opts.wide),
        other => Err(CliError::Usage(format!(
            "unknown suite {other:?}; expected one of {} or all",
            SUITES.join(", ")
        ))),
    }
}

fn term(coeff: f64, factors: Vec<AxisFactor>) -> GaussianTerm {
    GaussianTerm::new(Complex64::new(coeff, 0.0), factors)
}

fn sum(dim: usize, terms: Vec<GaussianTerm>) -> AnalyticGaussianSum {
    AnalyticGaussianSum::from_terms(dim, terms).expect("valid test function")
}

/// Three one-dimensional members of every `S(λ, μ)` with `λ, μ ≥ 1/2`.
pub fn members_1d() -> Vec<(&'static str, AnalyticGaussianSum)> {
    vec![
        ("exp(-pi x^2)", sum(1, vec![term(1.0, vec![AxisFactor::gaussian(PI, 0.0)])])),
        (
            "exp(-2(x-0.3)^2) + 0.5 exp(-4x^2)",
            sum(
                1,
                vec![
                    term(1.0, vec![AxisFactor::gaussian(2.0, 0.3)]),
                    term(0.5, vec![AxisFactor::gaussian(4.0, 0.0)]),
                ],
            ),
        ),
        ("x exp(-3x^2)", sum(1, vec![term(1.0, vec![AxisFactor::new(1, 3.0, 0.0)])])),
    ]
}

fn hermite_bound(m_max: usize) -> CliResult<CheckReport> {
    let margins = hermite_margins(m_max);
    let norm_max = m_max.min(60);
    let slacks = hermite_norm_slacks(norm_max);
    let xs: Vec<f64> = (0..=60).map(|k| 10f64.powf(-3.0 + 0.1 * k as f64)).collect();
    let nus = [0.25, 0.5, 0.55, 0.75, 0.9];
    let ratio_min = xs.iter().map(|&x| sup_ratio_slack(x)).fold(f64::INFINITY, f64::min);
    let power_min = xs
        .iter()
        .flat_map(|&x| nus.iter().map(move |&nu| power_sum_slack(x, nu)))
        .fold(f64::INFINITY, f64::min);
    let min_margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    let min_slack = slacks.iter().cloned().fold(f64::INFINITY, f64::min);
    let pass = min_margin >= 1.0 && min_slack >= 0.0 && ratio_min >= 0.0 && power_min >= 0.0;
    Ok(CheckReport::new(
        "hermite-bound",
        json!({"m_max": m_max, "norm_m_max": norm_max, "x_range": [xs[0], xs[xs.len() - 1]], "nu": nus}),
        json!({
            "margins": margins,
            "min_margin": min_margin,
            "norm_slacks": slacks,
            "min_norm_slack": min_slack,
            "min_sup_ratio_slack": ratio_min,
            "min_power_sum_slack": power_min,
        }),
        pass,
    ))
}

fn gs_suite() -> CliResult<CheckReport> {
    let (lambda, mu) = (0.5, 0.5);
    let rows = members_1d()
        .par_iter()
        .map(|(name, u)| {
            let lo = gs_constant(u, lambda, mu, 10, 10)?;
            let hi = gs_constant(u, lambda, mu, 20, 20)?;
            let wide = gs_constant(u, 1.0, 1.0, 10, 10)?;
            let ratio = hi.a_est / lo.a_est;
            let ok = lo.member && hi.member && ratio <= 1.25 && wide.a_est <= lo.a_est;
            Ok((json!({
                "function": name,
                "a_est_10": lo.a_est,
                "a_est_20": hi.a_est,
                "k_est": hi.k_est,
                "ratio": ratio,
                "a_est_lambda_mu_1": wide.a_est,
                "by_order": hi.by_order,
            }), ok))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let one = AnalyticGaussianSum::constant(1, Complex64::new(1.0, 0.0));
    let control = gs_constant(&one, lambda, mu, 4, 4)?;
    let pass = rows.iter().all(|r| r.1) && !control.member;
    Ok(CheckReport::new(
        "gs-constant",
        json!({"lambda": lambda, "mu": mu, "orders": [10, 20], "max_ratio": 1.25}),
        json!({
            "members": rows.into_iter().map(|r| r.0).collect::<Vec<_>>(),
            "control": {"function": "1", "member": control.member},
        }),
        pass,
    ))
}

fn holo_suite() -> CliResult<CheckReport> {
    let (lambda, mu, x_max, y_max) = (0.5, 0.45, 4.0, 3.0);
    let rows = members_1d()
        .par_iter()
        .map(|(name, u)| {
            let est = gs_constant(u, lambda, mu, 20, 20)?;
            let w = WeightParams::new(lambda, mu, est.a_est)?;
            let b = holo_bound_check(u, &w, x_max, y_max)?;
            Ok((json!({
                "function": name,
                "A": est.a_est,
                "k_inner": b.k_inner,
                "k_outer": b.k_outer,
                "k_est": b.k_est,
                "ok": b.ok,
            }), b.ok))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let grow = sum(1, vec![term(1.0, vec![AxisFactor::gaussian(-1.0, 0.0)])]);
    let control = holo_bound_check(&grow, &WeightParams::new(lambda, mu, 1.0)?, x_max, y_max)?;
    let pass = rows.iter().all(|r| r.1) && !control.ok;
    Ok(CheckReport::new(
        "holo-bound",
        json!({"lambda": lambda, "mu": mu, "x_max": x_max, "y_max": y_max}),
        json!({
            "members": rows.into_iter().map(|r| r.0).collect::<Vec<_>>(),
            "control": {"function": "exp(z^2)", "ok": control.ok},
        }),
        pass,
    ))
}

fn e_space_suite() -> CliResult<CheckReport> {
    let grid = Grid::new(1, 256, 8.0)?;
    let cases: Vec<(f64, u32)> = [PI, 2.0, 4.5]
        .iter()
        .flat_map(|&a| [0u32, 4].map(|m| (a, m)))
        .collect();
    let rows = cases
        .par_iter()
        .map(|&(a, m)| {
            let u = AnalyticGaussianSum::gaussian(a, &[0.0])?;
            let y3 = e_space_norm(&u, m, 3.0, &grid, 64)?;
            let y4 = e_space_norm(&u, m, 4.0, &grid, 96)?;
            let rel = (y3.value - y4.value).abs() / y4.value;
            let ok = y3.value.is_finite() && rel < 0.01;
            Ok((json!({
                "width": a,
                "m": m,
                "value_y3": y3.value,
                "value_y4": y4.value,
                "tail_bound_y3": y3.tail_bound,
                "relative_change": rel,
            }), ok))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let wide = AnalyticGaussianSum::gaussian(2.0 * PI + 0.1, &[0.0])?;
    let divergent = match e_space_norm(&wide, 0, 3.0, &grid, 64) {
        Err(Error::Divergent(_)) => true,
        Err(e) => return Err(e.into()),
        Ok(_) => false,
    };
    let pass = rows.iter().all(|r| r.1) && divergent;
    Ok(CheckReport::new(
        "e-space",
        json!({"grid": grid_json(&grid), "strip": [3.0, 4.0], "y_nodes": [64, 96], "max_relative_change": 0.01}),
        json!({
            "cases": rows.into_iter().map(|r| r.0).collect::<Vec<_>>(),
            "divergent_width": 2.0 * PI + 0.1,
            "divergence_flagged": divergent,
            "divergence_reason": e_space_divergence(&wide),
        }),
        pass,
    ))
}

fn gevrey_suite() -> CliResult<CheckReport> {
    let m_max = 40;
    let mut fs: Vec<(String, AnalyticGaussianSum)> = members_1d()
        .into_iter()
        .map(|(name, f)| Ok((format!("smooth({name})"), f.smoothed()?)))
        .collect::<Result<_, Error>>()?;
    fs.push(("exp(-x^2/4)".into(), AnalyticGaussianSum::gaussian(0.25, &[0.0])?));
    let rows = fs
        .par_iter()
        .map(|(name, u)| {
            let fit = gevrey_order_estimate(u, m_max)?;
            let ok = fit.s_est <= 0.6 && fit.fit_residual < 0.05;
            Ok((json!({
                "function": name,
                "s_est": fit.s_est,
                "c_est": fit.c_est,
                "k_est": fit.k_est,
                "fit_residual": fit.fit_residual,
            }), ok))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let pass = rows.iter().all(|r| r.1);
    Ok(CheckReport::new(
        "gevrey",
        json!({"m_max": m_max, "max_s": 0.6, "max_residual": 0.05}),
        json!({"fits": rows.into_iter().map(|r| r.0).collect::<Vec<_>>()}),
        pass,
    ))
}

fn grid_json(g: &Grid) -> Value {
    json!({"dim": g.dim(), "N": g.points_per_axis(), "L": g.half_extent()})
}

/// Sup error of the complex-shift inversion of `e^{-a x²}` against the closed
/// form, and of smoothing it back.
pub fn complex_shift_case(a: f64, grid: &Grid, strip: f64, y_nodes: usize) -> CliResult<(f64, f64, f64)> {
    let u = AnalyticGaussianSum::gaussian(a, &[0.0])?;
    let report = desmooth_complex(&u, grid, strip, y_nodes)?;
    let (b, c) = gaussian_preimage(a)?;
    let exact = AnalyticGaussianSum::gaussian(b, &[0.0])?
        .scale(Complex64::new(c, 0.0))
        .sample(grid, &[0.0])?;
    let err = report.result.sup_distance(&exact)?;
    Ok((err, report.residual, report.spectral_tail))
}

fn heat_suite() -> CliResult<CheckReport> {
    let grid = Grid::new(1, 256, 8.0)?;
    let stored = AnalyticGaussianSum::gaussian(PI, &[0.0])?.sample(&grid, &[0.0])?;
    let back = desmooth_fourier(&smooth(&stored), DEFAULT_REL_THRESHOLD)?;
    let stored_err = back.result.sup_distance(&stored)?;

    let wide_grid = Grid::new(1, 256, 4.0)?;
    let cases = [
        (2.0, grid, 3.0, 64),
        (PI, grid, 3.0, 64),
        (4.0, grid, 3.0, 64),
        (6.0, wide_grid, 9.0, 256),
    ];
    let rows = cases
        .par_iter()
        .map(|&(a, g, y, nodes)| {
            let (err, residual, tail) = complex_shift_case(a, &g, y, nodes)?;
            Ok((json!({
                "width": a,
                "grid": grid_json(&g),
                "strip": y,
                "y_nodes": nodes,
                "sup_error": err,
                "residual": residual,
                "spectral_tail": tail,
            }), err < 1e-6 && residual < 1e-6))
        })
        .collect::<CliResult<Vec<_>>>()?;

    let seven = AnalyticGaussianSum::gaussian(7.0, &[0.0])?;
    let f7 = desmooth_fourier(&seven.sample(&grid, &[0.0])?, DEFAULT_REL_THRESHOLD)?;
    let c7 = match desmooth_complex(&seven, &grid, 3.0, 64) {
        Err(Error::Divergent(_)) => true,
        Err(e) => return Err(e.into()),
        Ok(r) => r.ill_posed(),
    };
    let flagged = f7.ill_posed() && c7;
    let pass = stored_err < 1e-8 && rows.iter().all(|r| r.1) && flagged;
    Ok(CheckReport::new(
        "heat-roundtrip",
        json!({"grid": grid_json(&grid), "threshold": DEFAULT_REL_THRESHOLD, "tolerance": 1e-6, "stored_tolerance": 1e-8}),
        json!({
            "stored_roundtrip_sup_error": stored_err,
            "complex_shift": rows.into_iter().map(|r| r.0).collect::<Vec<_>>(),
            "wide_input": {
                "width": 7.0,
                "fourier_residual": f7.residual,
                "fourier_spectral_tail": f7.spectral_tail,
                "fourier_flagged": f7.ill_posed(),
                "complex_shift_flagged": c7,
            },
        }),
        pass,
    ))
}

/// Symbols on the phase plane used by `pairing-consistency`.
pub fn pairing_symbols() -> Vec<(&'static str, AnalyticGaussianSum)> {
    let g = AxisFactor::gaussian;
    vec![
        ("1", AnalyticGaussianSum::constant(2, Complex64::new(1.0, 0.0))),
        ("exp(-pi|X|^2)", sum(2, vec![term(1.0, vec![g(PI, 0.0), g(PI, 0.0)])])),
        (
            "exp(-(x-0.5)^2 - 2(xi+0.25)^2) + 0.5 x exp(-|X|^2)",
            sum(
                2,
                vec![
                    term(1.0, vec![g(1.0, 0.5), g(2.0, -0.25)]),
                    term(0.5, vec![AxisFactor::new(1, 1.0, 0.0), g(1.0, 0.0)]),
                ],
            ),
        ),
    ]
}

/// Test functions on the phase plane used by `pairing-consistency`.
pub fn pairing_tests() -> Vec<(&'static str, AnalyticGaussianSum)> {
    let g = AxisFactor::gaussian;
    vec![
        ("exp(-pi|X|^2)", sum(2, vec![term(1.0, vec![g(PI, 0.0), g(PI, 0.0)])])),
        ("exp(-2(x-0.4)^2 - 3 xi^2)", sum(2, vec![term(1.0, vec![g(2.0, 0.4), g(3.0, 0.0)])])),
        (
            "(1 + xi) exp(-4|X|^2)",
            sum(
                2,
                vec![
                    term(1.0, vec![g(4.0, 0.0), g(4.0, 0.0)]),
                    term(1.0, vec![g(4.0, 0.0), AxisFactor::new(1, 4.0, 0.0)]),
                ],
            ),
        ),
    ]
}

pub fn pairing_grid() -> Grid {
    Grid::new(2, 256, 8.0).expect("valid grid")
}

fn pairing_suite(wide: Option<f64>) -> CliResult<CheckReport> {
    let phase = pairing_grid();
    let kgrid = kernel_grid_for_phase(&phase)?;
    let params = PairingParams::default();
    let symbols = pairing_symbols();
    let tests = pairing_tests();
    let ops = symbols
        .par_iter()
        .map(|(_, f)| {
            let sampled = f.sample(&phase, &[0.0, 0.0])?;
            let kernel = assemble_antiwick(&AntiWickFromSymbol::new(sampled.clone())?, &kgrid)?;
            Ok((sampled, OperatorRep::Kernel(kernel)))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let pairs: Vec<(usize, usize)> = (0..ops.len())
        .flat_map(|i| (0..tests.len()).map(move |j| (i, j)))
        .collect();
    let rows = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (sampled, op) = &ops[i];
            let u = &tests[j].1;
            let r = antiwick_pair(op, u, &phase, DesmoothMethod::ComplexShift, &params)?;
            let reference = antiwick_pair_reference(sampled, u)?;
            let rel = (r.value - reference).norm() / reference.norm();
            Ok((json!({
                "symbol": symbols[i].0,
                "test_function": tests[j].0,
                "value": [r.value.re, r.value.im],
                "reference": [reference.re, reference.im],
                "relative_error": rel,
                "residual": r.residual,
                "quadrature_error_estimate": r.quadrature_error_estimate,
            }), rel < 1e-3 && !r.flagged))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let pass = rows.iter().all(|r| r.1);
    let mut values = json!({"pairs": rows.into_iter().map(|r| r.0).collect::<Vec<_>>()});
    let mut flagged = false;
    if let Some(a) = wide {
        let u = AnalyticGaussianSum::gaussian(a, &[0.0, 0.0])?;
        let op = &ops[0].1;
        let fourier = antiwick_pair(op, &u, &phase, DesmoothMethod::FourierRegularized, &params)?;
        let complex = match antiwick_pair(op, &u, &phase, DesmoothMethod::ComplexShift, &params) {
            Ok(r) => json!({"flagged": r.flagged, "residual": r.residual}),
            Err(Error::Divergent(why)) => json!({"flagged": true, "divergent": why}),
            Err(e) => return Err(e.into()),
        };
        flagged = fourier.flagged || complex["flagged"] == true;
        values["wide"] = json!({
            "width": a,
            "fourier": {
                "value": [fourier.value.re, fourier.value.im],
                "residual": fourier.residual,
                "spectral_tail": fourier.spectral_tail,
                "flagged": fourier.flagged,
            },
            "complex_shift": complex,
        });
    }
    let mut report = CheckReport::new(
        "pairing-consistency",
        json!({
            "grid": grid_json(&phase),
            "method": DesmoothMethod::ComplexShift.name(),
            "strip": params.strip_halfwidth,
            "y_nodes": params.y_nodes,
            "max_relative_error": 1e-3,
            "wide": wide,
        }),
        values,
        pass,
    );
    report.flagged = flagged;
    Ok(report)
}
