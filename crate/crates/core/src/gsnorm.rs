//! Numerical regularity probes: Gelfand-Shilov constants, the holomorphic
//! majorant, the strip integral norm, Hermite bounds and Gevrey orders.
//!
//! Derivatives of a Gaussian sum are evaluated per axis by Leibniz' rule and
//! the three-term recurrence `g_{k+1} = -2a w g_k - 2a k g_{k-1}` for
//! `g_k = ∂^k e^{-a w²}`. Expanding into monomials instead loses every digit
//! at orders beyond about 30.
//!
//! Factorials and large powers are handled as logarithms throughout.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods shadow these whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::gaussian::{AnalyticGaussianSum, AxisFactor, LOG_OVERFLOW_GUARD};
use crate::grid::Grid;

/// Largest probed derivative or monomial order per axis.
pub const MAX_GS_ORDER: usize = 40;
/// Largest order accepted by the Gevrey fit.
pub const MAX_GEVREY_ORDER: usize = 60;
/// Largest polynomial weight exponent in the strip norm.
pub const MAX_ESPACE_WEIGHT: u32 = 16;

fn ln_factorial(k: usize) -> f64 {
    libm::lgamma(k as f64 + 1.0)
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn ln_sum_exp(values: &[f64]) -> f64 {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top.is_infinite() {
        return top;
    }
    top + values.iter().map(|v| (v - top).exp()).sum::<f64>().ln()
}

/// Parameters of the weights `φ` and `ψ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    pub lambda: f64,
    pub mu: f64,
    pub a: f64,
}

impl WeightParams {
    pub fn new(lambda: f64, mu: f64, a: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter("lambda must be positive"));
        }
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::InvalidParameter("mu must lie in (0, 1)"));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter("A must be positive"));
        }
        Ok(Self { lambda, mu, a })
    }
}

/// `φ(x) = (λ/2) Σ |x_j / A|^{1/λ}`.
pub fn phi_weight(x: &[f64], w: &WeightParams) -> f64 {
    let p = 1.0 / w.lambda;
    0.5 * w.lambda * x.iter().map(|v| (v / w.a).abs().powf(p)).sum::<f64>()
}

/// `ψ(y) = 2(1-μ) Σ |A y_j|^{1/(1-μ)}`.
pub fn psi_weight(y: &[f64], w: &WeightParams) -> f64 {
    let nu = 1.0 - w.mu;
    2.0 * nu * y.iter().map(|v| (w.a * v).abs().powf(1.0 / nu)).sum::<f64>()
}

/// `∂^k [(x-b)^p e^{-a(x-b)²}]` for `k = 0..=kmax` at a real point.
fn factor_derivatives(f: &AxisFactor, x: f64, kmax: usize, out: &mut [f64]) {
    let w = x - f.center;
    let a = f.width;
    let p = f.power as usize;
    let mut g = vec![0.0; kmax + 1];
    g[0] = (-a * w * w).exp();
    if kmax >= 1 {
        g[1] = -2.0 * a * w * g[0];
    }
    for k in 1..kmax {
        g[k + 1] = -2.0 * a * (w * g[k] + k as f64 * g[k - 1]);
    }
    for (k, slot) in out.iter_mut().enumerate().take(kmax + 1) {
        let mut acc = 0.0;
        for j in 0..=k.min(p) {
            let c = (ln_binomial(k, j) + ln_factorial(p) - ln_factorial(p - j)).exp();
            acc += c * w.powi((p - j) as i32) * g[k - j];
        }
        *slot = acc;
    }
}

/// `ln` of an upper bound for `|x|^α |∂^k factor(x)|` valid at `|x| = r`
/// and decreasing beyond it once `r` exceeds the last stationary point.
fn ln_factor_envelope(f: &AxisFactor, r: f64, alpha: usize, k: usize) -> f64 {
    let b = f.center.abs();
    let w = (r - b).max(0.0);
    let a = f.width;
    let p = f.power as usize;
    let t = (2.0 * a).sqrt() * w;
    let mut terms = Vec::new();
    for j in 0..=k.min(p) {
        let m = k - j;
        // |He_m(t)| ≤ E[(|t| + |Z|)^m], E|Z|^i = 2^{i/2} Γ((i+1)/2) / √π.
        let he: Vec<f64> = (0..=m)
            .map(|i| {
                let ln_abs_z = 0.5 * i as f64 * 2f64.ln() + libm::lgamma((i as f64 + 1.0) / 2.0)
                    - 0.5 * PI.ln();
                ln_binomial(m, i) + (m - i) as f64 * t.ln() + ln_abs_z
            })
            .collect();
        terms.push(
            ln_binomial(k, j) + ln_factorial(p) - ln_factorial(p - j)
                + (p - j) as f64 * w.ln()
                + 0.5 * m as f64 * (2.0 * a).ln()
                + ln_sum_exp(&he),
        );
    }
    alpha as f64 * (w + b).ln() + ln_sum_exp(&terms) - a * w * w
}

/// Per-axis derivative tables of every term on a symmetric probe grid.
struct Probe<'a> {
    u: &'a AnalyticGaussianSum,
    nodes: Vec<f64>,
    radius: f64,
    kmax: usize,
    /// `[term][axis][node * (kmax+1) + k]`
    tables: Vec<Vec<Vec<f64>>>,
}

impl<'a> Probe<'a> {
    fn new(u: &'a AnalyticGaussianSum, kmax: usize, alpha_max: usize) -> Self {
        let n = u.dim();
        let a_min = u.min_width();
        let b_max = u
            .terms()
            .iter()
            .flat_map(|t| t.factors.iter())
            .fold(0.0f64, |m, f| m.max(f.center.abs()));
        let degree = (kmax + alpha_max + u.max_power() as usize) as f64;
        let radius = b_max + (2.0 * (degree + 1.0) / a_min).sqrt() + 8.0 / a_min.sqrt();
        let points = match n {
            1 => 4096,
            2 => 160,
            _ => 24,
        };
        let h = 2.0 * radius / points as f64;
        let nodes: Vec<f64> = (0..=points).map(|j| -radius + j as f64 * h).collect();
        let tables = u
            .terms()
            .iter()
            .map(|t| {
                t.factors
                    .iter()
                    .map(|f| {
                        let mut table = vec![0.0; nodes.len() * (kmax + 1)];
                        for (j, &x) in nodes.iter().enumerate() {
                            factor_derivatives(
                                f,
                                x,
                                kmax,
                                &mut table[j * (kmax + 1)..(j + 1) * (kmax + 1)],
                            );
                        }
                        table
                    })
                    .collect()
            })
            .collect();
        Self {
            u,
            nodes,
            radius,
            kmax,
            tables,
        }
    }

    fn grid_len(&self) -> usize {
        self.nodes.len().pow(self.u.dim() as u32)
    }

    fn index(&self, mut flat: usize, idx: &mut [usize]) {
        let m = self.nodes.len();
        for slot in idx.iter_mut().rev() {
            *slot = flat % m;
            flat /= m;
        }
    }

    /// `ln |∂^β u|` at every probe point.
    fn ln_derivative(&self, beta: &[usize]) -> Vec<f64> {
        let n = self.u.dim();
        let stride = self.kmax + 1;
        let mut idx = vec![0usize; n];
        (0..self.grid_len())
            .map(|flat| {
                self.index(flat, &mut idx);
                let mut acc = Complex64::new(0.0, 0.0);
                for (t, tab) in self.u.terms().iter().zip(&self.tables) {
                    let mut v = t.coeff;
                    for a in 0..n {
                        v *= tab[a][idx[a] * stride + beta[a]];
                    }
                    acc += v;
                }
                acc.norm().ln()
            })
            .collect()
    }

    /// `ln sup |x^α ∂^β u|`: grid maximum combined with the tail envelope
    /// outside the probe box.
    fn ln_sup(&self, ln_deriv: &[f64], alpha: &[usize], beta: &[usize]) -> f64 {
        let n = self.u.dim();
        let ln_abs: Vec<f64> = self.nodes.iter().map(|x| x.abs().ln()).collect();
        let mut idx = vec![0usize; n];
        let mut best = f64::NEG_INFINITY;
        for (flat, &d) in ln_deriv.iter().enumerate() {
            if d == f64::NEG_INFINITY {
                continue;
            }
            self.index(flat, &mut idx);
            let mut v = d;
            for a in 0..n {
                if alpha[a] > 0 {
                    v += alpha[a] as f64 * ln_abs[idx[a]];
                }
            }
            best = best.max(v);
        }
        best.max(self.ln_tail(alpha, beta))
    }

    fn ln_tail(&self, alpha: &[usize], beta: &[usize]) -> f64 {
        let n = self.u.dim();
        let stride = self.kmax + 1;
        let ln_abs: Vec<f64> = self.nodes.iter().map(|x| x.abs().ln()).collect();
        let mut per_term = Vec::new();
        for (t, tab) in self.u.terms().iter().zip(&self.tables) {
            let edge: Vec<f64> = (0..n)
                .map(|a| ln_factor_envelope(&t.factors[a], self.radius, alpha[a], beta[a]))
                .collect();
            let line_sup: Vec<f64> = (0..n)
                .map(|a| {
                    let inside = (0..self.nodes.len()).fold(f64::NEG_INFINITY, |m, j| {
                        let v = tab[a][j * stride + beta[a]].abs().ln()
                            + alpha[a] as f64 * if alpha[a] > 0 { ln_abs[j] } else { 0.0 };
                        m.max(v)
                    });
                    inside.max(edge[a])
                })
                .collect();
            let total: f64 = line_sup.iter().sum();
            let worst = (0..n).fold(f64::NEG_INFINITY, |m, a| {
                m.max(total - line_sup[a] + edge[a])
            });
            per_term.push(t.coeff.norm().ln() + worst);
        }
        ln_sum_exp(&per_term)
    }
}

fn multi_indices(n: usize, max: usize) -> Vec<Vec<usize>> {
    let count = (max + 1).pow(n as u32);
    (0..count)
        .map(|mut flat| {
            let mut idx = vec![0usize; n];
            for slot in idx.iter_mut().rev() {
                *slot = flat % (max + 1);
                flat /= max + 1;
            }
            idx
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GSEstimate {
    pub lambda: f64,
    pub mu: f64,
    /// Smallest `A` satisfying the factorial bound over the probed orders.
    pub a_est: f64,
    /// `sup |u|` on the real space; `∞` when not estimated.
    pub k_est: f64,
    pub max_alpha: usize,
    pub max_beta: usize,
    /// Running maximum of the estimate over total orders `1..`; entry `k-1`
    /// uses every probe with `|α| + |β| ≤ k`.
    pub by_order: Vec<f64>,
    /// Finite estimate (the function is not rejected outright).
    pub member: bool,
}

/// Estimates the constant `A` of `|x^α ∂^β u| ≤ A^{|α|+|β|} (α!)^λ (β!)^μ`
/// over `α ≤ max_alpha`, `β ≤ max_beta` per axis.
pub fn gs_constant(
    u: &AnalyticGaussianSum,
    lambda: f64,
    mu: f64,
    max_alpha: usize,
    max_beta: usize,
) -> Result<GSEstimate> {
    if !(lambda > 0.0 && mu > 0.0) {
        return Err(Error::InvalidParameter("lambda and mu must be positive"));
    }
    for order in [max_alpha, max_beta] {
        if order > MAX_GS_ORDER {
            return Err(Error::OrderOverflow {
                order,
                max: MAX_GS_ORDER,
            });
        }
    }
    let n = u.dim();
    let top = n * (max_alpha + max_beta);
    if u.is_zero() {
        return Ok(GSEstimate {
            lambda,
            mu,
            a_est: 0.0,
            k_est: 0.0,
            max_alpha,
            max_beta,
            by_order: vec![0.0; top],
            member: true,
        });
    }
    if !u.is_decaying() {
        return Ok(GSEstimate {
            lambda,
            mu,
            a_est: f64::INFINITY,
            k_est: f64::INFINITY,
            max_alpha,
            max_beta,
            by_order: vec![f64::INFINITY; top],
            member: false,
        });
    }
    let probe = Probe::new(u, max_beta, max_alpha);
    let alphas = multi_indices(n, max_alpha);
    let mut by_order = vec![f64::NEG_INFINITY; top];
    let mut k_est = 0.0;
    for beta in multi_indices(n, max_beta) {
        let ln_d = probe.ln_derivative(&beta);
        let bsum: usize = beta.iter().sum();
        let ln_bfac: f64 = beta.iter().map(|&b| ln_factorial(b)).sum();
        for alpha in &alphas {
            let asum: usize = alpha.iter().sum();
            let ln_sup = probe.ln_sup(&ln_d, alpha, &beta);
            if asum + bsum == 0 {
                k_est = ln_sup.exp();
                continue;
            }
            let ln_afac: f64 = alpha.iter().map(|&a| ln_factorial(a)).sum();
            let v = (ln_sup - lambda * ln_afac - mu * ln_bfac) / (asum + bsum) as f64;
            let slot = &mut by_order[asum + bsum - 1];
            *slot = slot.max(v);
        }
    }
    let mut running = f64::NEG_INFINITY;
    for v in by_order.iter_mut() {
        running = running.max(*v);
        *v = running.exp();
    }
    let a_est = by_order.last().copied().unwrap_or(0.0);
    Ok(GSEstimate {
        lambda,
        mu,
        a_est,
        k_est,
        max_alpha,
        max_beta,
        by_order,
        member: a_est.is_finite(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoloBound {
    /// `max e^{φ(x)} |u(x+iy)| e^{-ψ(y)}` over the given rectangle.
    pub k_inner: f64,
    /// Same over the rectangle with doubled half-widths.
    pub k_outer: f64,
    pub k_est: f64,
    pub ok: bool,
}

/// Relative growth of the majorant tolerated between the two rectangles.
pub const HOLO_STABILITY: f64 = 0.1;

fn ln_holo_max(u: &AnalyticGaussianSum, w: &WeightParams, x_max: f64, y_max: f64, nodes: usize) -> f64 {
    let n = u.dim();
    let axis_x: Vec<f64> = (0..nodes)
        .map(|j| -x_max + 2.0 * x_max * j as f64 / (nodes - 1) as f64)
        .collect();
    let axis_y: Vec<f64> = (0..nodes)
        .map(|j| -y_max + 2.0 * y_max * j as f64 / (nodes - 1) as f64)
        .collect();
    let total = nodes.pow(2 * n as u32);
    let mut idx = vec![0usize; 2 * n];
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    let mut best = f64::NEG_INFINITY;
    for mut flat in 0..total {
        for slot in idx.iter_mut().rev() {
            *slot = flat % nodes;
            flat /= nodes;
        }
        for a in 0..n {
            x[a] = axis_x[idx[a]];
            y[a] = axis_y[idx[n + a]];
            z[a] = Complex64::new(x[a], y[a]);
        }
        let v = phi_weight(&x, w) + u.log_abs(&z) - psi_weight(&y, w);
        if v.is_nan() {
            return f64::INFINITY;
        }
        best = best.max(v);
    }
    best
}

/// Checks `e^{φ(x)} |u(x+iy)| ≤ K e^{ψ(y)}` on `|x_j| ≤ x_max`, `|y_j| ≤ y_max`
/// and on the doubled rectangle.
pub fn holo_bound_check(u: &AnalyticGaussianSum, w: &WeightParams, x_max: f64, y_max: f64) -> Result<HoloBound> {
    if !(x_max > 0.0 && y_max >= 0.0) {
        return Err(Error::InvalidParameter("rectangle half-widths must be positive"));
    }
    let nodes = match u.dim() {
        1 => 241,
        2 => 17,
        _ => 7,
    };
    let inner = ln_holo_max(u, w, x_max, y_max, nodes);
    let outer = ln_holo_max(u, w, 2.0 * x_max, 2.0 * y_max, 2 * nodes - 1);
    let finite = |v: f64| v < LOG_OVERFLOW_GUARD;
    let k_inner = if finite(inner) { inner.exp() } else { f64::INFINITY };
    let k_outer = if finite(outer) { outer.exp() } else { f64::INFINITY };
    let ok = k_inner.is_finite() && k_outer.is_finite() && k_outer <= (1.0 + HOLO_STABILITY) * k_inner;
    Ok(HoloBound {
        k_inner,
        k_outer,
        k_est: k_inner.max(k_outer),
        ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ESpaceNorm {
    /// Quadrature over the truncated strip.
    pub value: f64,
    /// Upper bound for the part with some `|y_j| > Y`.
    pub tail_bound: f64,
}

/// Structural divergence test: the integral converges iff every width lies in
/// `(0, 2π)`.
pub fn e_space_divergence(u: &AnalyticGaussianSum) -> Option<&'static str> {
    if u.is_zero() {
        return None;
    }
    if u.min_width() <= 0.0 {
        return Some("non-decaying along the real axis");
    }
    if u.max_width() >= 2.0 * PI {
        return Some("width at or above 2π: the strip integrand grows");
    }
    None
}

/// `∫_{ℂⁿ} e^{-2π|Im z|²} (1 + |Re z|)^m |u(z)| dz` over `|Im z_j| ≤ Y`, with
/// the remaining tail bounded in closed form.
pub fn e_space_norm(
    u: &AnalyticGaussianSum,
    m: u32,
    y_max: f64,
    grid: &Grid,
    y_nodes: usize,
) -> Result<ESpaceNorm> {
    if m > MAX_ESPACE_WEIGHT {
        return Err(Error::InvalidParameter("weight exponent above 16"));
    }
    if grid.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: grid.dim(),
        });
    }
    if !(y_max > 0.0) || y_nodes < 2 {
        return Err(Error::InvalidParameter("strip needs Y > 0 and at least 2 intervals"));
    }
    if u.is_zero() {
        return Ok(ESpaceNorm {
            value: 0.0,
            tail_bound: 0.0,
        });
    }
    if let Some(why) = e_space_divergence(u) {
        return Err(Error::Divergent(why));
    }
    let n = u.dim();
    let dy = 2.0 * y_max / y_nodes as f64;
    let ys: Vec<(f64, f64)> = (0..=y_nodes)
        .map(|k| {
            let w = if k == 0 || k == y_nodes { 0.5 * dy } else { dy };
            (-y_max + k as f64 * dy, w)
        })
        .collect();
    let ycount = ys.len().pow(n as u32);
    let mut x = vec![0.0; n];
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    let mut partial = Vec::with_capacity(grid.len());
    for flat in 0..grid.len() {
        grid.point(flat, &mut x);
        let ln_w = m as f64 * (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt()).ln();
        let mut acc = 0.0;
        for mut yf in 0..ycount {
            let mut weight = 1.0;
            let mut y2 = 0.0;
            for a in (0..n).rev() {
                let (y, wy) = ys[yf % ys.len()];
                yf /= ys.len();
                weight *= wy;
                y2 += y * y;
                z[a] = Complex64::new(x[a], y);
            }
            acc += weight * (u.log_abs(&z) + ln_w - 2.0 * PI * y2).exp();
        }
        partial.push(acc);
    }
    let value = crate::sum::pairwise(&partial) * grid.cell_volume();
    Ok(ESpaceNorm {
        value,
        tail_bound: e_space_tail(u, m, y_max),
    })
}

/// `2∫_Y^∞ y^q e^{-κy²} dy ≤ 2 Y^q e^{-κY²} / (2κY - q/Y)` when the
/// denominator is positive, else the full-line value.
fn y_tail(q: u32, kappa: f64, y: f64) -> f64 {
    let den = 2.0 * kappa * y - q as f64 / y;
    if den > 0.0 {
        2.0 * y.powi(q as i32) * (-kappa * y * y).exp() / den
    } else {
        y_full(q, kappa)
    }
}

/// `∫_ℝ |y|^q e^{-κy²} dy = Γ((q+1)/2) / κ^{(q+1)/2}`.
fn y_full(q: u32, kappa: f64) -> f64 {
    let s = (q as f64 + 1.0) / 2.0;
    libm::tgamma(s) / kappa.powf(s)
}

/// `∫_ℝ (1+|x|)^m |x-b|^q e^{-a(x-b)²} dx` by a fine trapezoid rule.
fn x_moment(m: u32, q: u32, a: f64, b: f64) -> f64 {
    let r = (2.0 * (m + q + 1) as f64 / a).sqrt() + 10.0 / a.sqrt();
    let nodes = 4000;
    let h = 2.0 * r / nodes as f64;
    let vals: Vec<f64> = (0..=nodes)
        .map(|j| {
            let w = -r + j as f64 * h;
            let x = w + b;
            (1.0 + x.abs()).powi(m as i32) * w.abs().powi(q as i32) * (-a * w * w).exp()
        })
        .collect();
    crate::sum::pairwise(&vals) * h
}

fn e_space_tail(u: &AnalyticGaussianSum, m: u32, y_max: f64) -> f64 {
    let mut total = 0.0;
    for t in u.terms() {
        let mut full = Vec::new();
        let mut tail = Vec::new();
        for f in &t.factors {
            // |x - b + iy|^p ≤ c (|x-b|^p + |y|^p) and (1+|x|) ≤ Π_j (1+|x_j|).
            let c = 2f64.powi(f.power.max(1) as i32 - 1);
            let kappa = 2.0 * PI - f.width;
            let x0 = x_moment(m, 0, f.width, f.center);
            let xp = x_moment(m, f.power, f.width, f.center);
            full.push(c * (xp * y_full(0, kappa) + x0 * y_full(f.power, kappa)));
            tail.push(c * (xp * y_tail(0, kappa, y_max) + x0 * y_tail(f.power, kappa, y_max)));
        }
        let prod: f64 = full.iter().product();
        let bound: f64 = (0..full.len())
            .map(|a| prod / full[a] * tail[a])
            .sum();
        total += t.coeff.norm() * bound;
    }
    total
}

/// `sup_x |g_m(x)|` for `g_m = f_m / √(m!)`, `f_m = d^m/dx^m e^{-x²/2}`, for
/// every `m ≤ m_max`.
pub fn hermite_sups(m_max: usize) -> Vec<f64> {
    let r = (2.0 * m_max as f64).sqrt() + 5.0;
    let h = 1e-3;
    let points = (2.0 * r / h).ceil() as usize;
    let mut best = vec![(0.0f64, 0.0f64); m_max + 1];
    let mut g = vec![0.0; m_max + 1];
    for j in 0..=points {
        let x = -r + j as f64 * h;
        scaled_hermite(x, &mut g);
        for (slot, v) in best.iter_mut().zip(&g) {
            if v.abs() > slot.0 {
                *slot = (v.abs(), x);
            }
        }
    }
    best.iter()
        .enumerate()
        .map(|(m, &(v, x))| refine_hermite(m, x - h, x + h).max(v))
        .collect()
}

fn scaled_hermite(x: f64, g: &mut [f64]) {
    g[0] = (-0.5 * x * x).exp();
    if g.len() > 1 {
        g[1] = -x * g[0];
    }
    for m in 1..g.len() - 1 {
        g[m + 1] = (-x * g[m] - (m as f64).sqrt() * g[m - 1]) / ((m + 1) as f64).sqrt();
    }
}

fn hermite_at(m: usize, x: f64) -> f64 {
    let mut g = vec![0.0; m + 1];
    scaled_hermite(x, &mut g);
    g[m].abs()
}

/// Golden-section maximization of `|g_m|` on `[lo, hi]`.
fn refine_hermite(m: usize, mut lo: f64, mut hi: f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - phi * (hi - lo);
    let mut d = lo + phi * (hi - lo);
    let (mut fc, mut fd) = (hermite_at(m, c), hermite_at(m, d));
    for _ in 0..60 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = hermite_at(m, c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = hermite_at(m, d);
        }
    }
    fc.max(fd)
}

/// `sup_x |d^m/dx^m e^{-x²/2}|`.
pub fn hermite_sup(m: usize) -> f64 {
    hermite_sups(m)[m] * (0.5 * ln_factorial(m)).exp()
}

/// `ln` of the bound `√2 (2π)^{1/4} √(m!) (m+1)^{1/4}`.
pub fn ln_hermite_bound(m: usize) -> f64 {
    0.5 * 2f64.ln() + 0.25 * (2.0 * PI).ln() + 0.5 * ln_factorial(m) + 0.25 * ((m + 1) as f64).ln()
}

/// Bound divided by the supremum; at least one when the bound holds.
pub fn hermite_bound_margin(m: usize) -> f64 {
    hermite_margins(m)[m]
}

/// [`hermite_bound_margin`] for every order up to `m_max`.
pub fn hermite_margins(m_max: usize) -> Vec<f64> {
    hermite_sups(m_max)
        .iter()
        .enumerate()
        .map(|(m, s)| {
            (0.5 * 2f64.ln() + 0.25 * (2.0 * PI).ln() + 0.25 * ((m + 1) as f64).ln()).exp() / s
        })
        .collect()
}

/// `ln(√(2π) m!) - ln ‖f_m‖²` for `m ≤ m_max`; nonnegative when the norm
/// bound holds.
pub fn hermite_norm_slacks(m_max: usize) -> Vec<f64> {
    let r = (2.0 * m_max as f64).sqrt() + 8.0;
    let h = 1e-3;
    let points = (2.0 * r / h).ceil() as usize;
    let mut acc = vec![0.0; m_max + 1];
    let mut g = vec![0.0; m_max + 1];
    for j in 0..=points {
        scaled_hermite(-r + j as f64 * h, &mut g);
        let w = if j == 0 || j == points { 0.5 * h } else { h };
        for (a, v) in acc.iter_mut().zip(&g) {
            *a += w * v * v;
        }
    }
    acc.iter().map(|s| 0.5 * (2.0 * PI).ln() - s.ln()).collect()
}

/// `ln sup_k x^k/k! - ln(½ e^{x/2})` for `x > 0`.
pub fn sup_ratio_slack(x: f64) -> f64 {
    let k = x.floor();
    let ln_sup = [k, k + 1.0]
        .iter()
        .map(|&k| k * x.ln() - libm::lgamma(k + 1.0))
        .fold(f64::NEG_INFINITY, f64::max);
    ln_sup - (0.5f64.ln() + 0.5 * x)
}

/// `ln(C e^{2νx}) - ln Σ_k (x^k/k!)^ν` with `C = Σ_k 2^{-kν}`, for `x > 0`.
pub fn power_sum_slack(x: f64, nu: f64) -> f64 {
    let c = 1.0 / (1.0 - 2f64.powf(-nu));
    let kmax = (4.0 * x + 60.0 / nu + 50.0) as usize;
    let terms: Vec<f64> = (0..=kmax)
        .map(|k| nu * (k as f64 * x.ln() - ln_factorial(k)))
        .collect();
    c.ln() + 2.0 * nu * x - ln_sum_exp(&terms)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GevreyFit {
    /// Fitted exponent `s` of `(m!)^s`.
    pub s_est: f64,
    pub c_est: f64,
    pub k_est: f64,
    /// `√(Σ r² / Σ (y - ȳ)²)` of the log fit.
    pub fit_residual: f64,
    /// Per-axis fits when `dim > 1`; the reported values are the worst axis.
    pub per_axis: Vec<(f64, f64, f64)>,
}

/// Least-squares fit of `ln sup |∂^m u| ≈ ln K + m ln C + s ln m!` over
/// `m = 2..=m_max`, for pure derivatives along each axis.
pub fn gevrey_order_estimate(u: &AnalyticGaussianSum, m_max: usize) -> Result<GevreyFit> {
    if m_max > MAX_GEVREY_ORDER {
        return Err(Error::OrderOverflow {
            order: m_max,
            max: MAX_GEVREY_ORDER,
        });
    }
    if m_max < 5 {
        return Err(Error::InvalidParameter("Gevrey fit needs m_max ≥ 5"));
    }
    if u.is_zero() {
        return Err(Error::DegenerateFit("zero function"));
    }
    if !u.is_decaying() {
        return Err(Error::DegenerateFit("non-decaying input"));
    }
    let n = u.dim();
    let probe = Probe::new(u, m_max, 0);
    let zeros = vec![0usize; n];
    let mut per_axis = Vec::with_capacity(n);
    let mut worst: Option<(f64, f64, f64, f64)> = None;
    for axis in 0..n {
        let mut ys = Vec::new();
        for m in 2..=m_max {
            let mut beta = zeros.clone();
            beta[axis] = m;
            let ln_d = probe.ln_derivative(&beta);
            let v = probe.ln_sup(&ln_d, &zeros, &beta);
            if !v.is_finite() {
                return Err(Error::DegenerateFit("vanishing derivative"));
            }
            ys.push((m, v));
        }
        let (k, c, s, res) = fit_three(&ys)?;
        per_axis.push((s, c, res));
        if worst.is_none_or(|w| s > w.2) {
            worst = Some((k, c, s, res));
        }
    }
    let (k, c, s, res) = worst.expect("dim ≥ 1");
    Ok(GevreyFit {
        s_est: s,
        c_est: c,
        k_est: k,
        fit_residual: res,
        per_axis,
    })
}

/// Normal equations for `y ≈ β₀ + β₁ m + β₂ ln m!`.
fn fit_three(points: &[(usize, f64)]) -> Result<(f64, f64, f64, f64)> {
    let rows: Vec<[f64; 3]> = points
        .iter()
        .map(|&(m, _)| [1.0, m as f64, ln_factorial(m)])
        .collect();
    let mut ata = [[0.0; 3]; 3];
    let mut aty = [0.0; 3];
    for (r, &(_, y)) in rows.iter().zip(points) {
        for i in 0..3 {
            aty[i] += r[i] * y;
            for j in 0..3 {
                ata[i][j] += r[i] * r[j];
            }
        }
    }
    let coef = solve3(ata, aty).ok_or(Error::DegenerateFit("singular normal equations"))?;
    let mean = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (r, &(_, y)) in rows.iter().zip(points) {
        let fit = coef[0] * r[0] + coef[1] * r[1] + coef[2] * r[2];
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - mean) * (y - mean);
    }
    if ss_tot == 0.0 {
        return Err(Error::DegenerateFit("constant derivative sups"));
    }
    Ok((coef[0].exp(), coef[1].exp(), coef[2], (ss_res / ss_tot).sqrt()))
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianTerm;

    fn gauss(a: f64) -> AnalyticGaussianSum {
        AnalyticGaussianSum::gaussian(a, &[0.0]).unwrap()
    }

    #[test]
    fn weight_examples() {
        let w = WeightParams::new(0.5, 0.25, 1.0).unwrap();
        assert!((phi_weight(&[1.0], &w) - 0.25).abs() < 1e-15);
        assert!((psi_weight(&[1.0], &w) - 1.5).abs() < 1e-15);
        assert_eq!(phi_weight(&[0.0, 0.0], &w), 0.0);
        assert!(WeightParams::new(0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn derivative_recurrence_matches_closure() {
        let f = AxisFactor::new(2, 1.3, 0.4);
        let u = AnalyticGaussianSum::from_terms(
            1,
            vec![GaussianTerm::new(Complex64::new(1.0, 0.0), vec![f])],
        )
        .unwrap();
        let mut table = vec![0.0; 7];
        factor_derivatives(&f, 0.9, 6, &mut table);
        let mut d = u.clone();
        for k in 0..=6 {
            let exact = d.eval_real(&[0.9]).re;
            assert!((table[k] - exact).abs() < 1e-10 * (1.0 + exact.abs()), "k = {k}");
            d = d.derivative(0);
        }
    }

    #[test]
    fn gs_constant_stabilizes() {
        let u = gauss(PI);
        let a10 = gs_constant(&u, 0.5, 0.5, 10, 10).unwrap();
        let a20 = gs_constant(&u, 0.5, 0.5, 20, 20).unwrap();
        assert!(a10.member && a10.a_est.is_finite());
        assert!((a10.k_est - 1.0).abs() < 1e-9);
        assert!(a20.a_est >= a10.a_est);
        assert!(a20.a_est <= 1.25 * a10.a_est, "{} {}", a10.a_est, a20.a_est);
        assert!(a10.by_order.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn gs_constant_is_monotone_in_exponents() {
        let u = gauss(PI);
        let loose = gs_constant(&u, 1.0, 1.0, 8, 8).unwrap();
        let tight = gs_constant(&u, 0.5, 0.5, 8, 8).unwrap();
        assert!(loose.a_est <= tight.a_est);
    }

    #[test]
    fn constants_are_not_members() {
        let one = AnalyticGaussianSum::constant(1, Complex64::new(1.0, 0.0));
        let est = gs_constant(&one, 0.5, 0.5, 4, 4).unwrap();
        assert!(!est.member && est.a_est.is_infinite());
    }

    #[test]
    fn gs_constant_order_guard() {
        assert!(matches!(
            gs_constant(&gauss(1.0), 0.5, 0.5, 41, 2),
            Err(Error::OrderOverflow { .. })
        ));
    }

    #[test]
    fn holo_bound_rejects_growth() {
        let grow = AnalyticGaussianSum::from_terms(
            1,
            vec![GaussianTerm::new(Complex64::new(1.0, 0.0), vec![AxisFactor::gaussian(-1.0, 0.0)])],
        )
        .unwrap();
        let w = WeightParams::new(0.5, 0.45, 1.0).unwrap();
        assert!(!holo_bound_check(&grow, &w, 3.0, 2.0).unwrap().ok);
    }

    #[test]
    fn e_space_examples() {
        let g = Grid::new(1, 256, 8.0).unwrap();
        let u = gauss(PI);
        let a = e_space_norm(&u, 0, 3.0, &g, 64).unwrap();
        let b = e_space_norm(&u, 0, 4.0, &g, 96).unwrap();
        assert!(a.value.is_finite() && (a.value - b.value).abs() < 0.01 * b.value);
        assert!(a.tail_bound >= b.value - a.value - 1e-9);
        // ∫∫ e^{-2πy²} e^{-π(x²-y²)} = 1
        assert!((b.value - 1.0).abs() < 1e-6, "{}", b.value);
        assert!(matches!(
            e_space_norm(&gauss(2.0 * PI + 0.1), 0, 3.0, &g, 64),
            Err(Error::Divergent(_))
        ));
        let zero = AnalyticGaussianSum::zero(1);
        assert_eq!(e_space_norm(&zero, 3, 3.0, &g, 64).unwrap().value, 0.0);
    }

    #[test]
    fn hermite_examples() {
        assert!((hermite_sup(0) - 1.0).abs() < 1e-12);
        assert!((hermite_sup(1) - (-0.5f64).exp()).abs() < 1e-12);
        let bound = ln_hermite_bound(0).exp();
        assert!((bound - 2.0f64.sqrt() * (2.0 * PI).powf(0.25)).abs() < 1e-12);
        assert!((hermite_bound_margin(0) - bound).abs() < 1e-12);
        assert!(hermite_margins(60).iter().all(|&m| m >= 1.0));
        assert!(hermite_norm_slacks(20).iter().all(|&s| s >= 0.0));
    }

    #[test]
    fn proof_chain_slacks() {
        for k in 0..40 {
            let x = 10f64.powf(-3.0 + 0.15 * k as f64);
            assert!(sup_ratio_slack(x) >= 0.0, "x = {x}");
            for nu in [0.3, 0.55, 0.9] {
                assert!(power_sum_slack(x, nu) >= 0.0, "x = {x}, nu = {nu}");
            }
        }
    }

    #[test]
    fn gevrey_of_a_gaussian() {
        let fit = gevrey_order_estimate(&gauss(0.25), 40).unwrap();
        assert!(fit.s_est <= 0.6, "{}", fit.s_est);
        assert!(fit.fit_residual < 0.05);
        let scaled = gevrey_order_estimate(&gauss(0.25).scale(Complex64::new(7.0, 0.0)), 40).unwrap();
        assert!((scaled.s_est - fit.s_est).abs() < 1e-9);
        assert!(gevrey_order_estimate(&AnalyticGaussianSum::zero(1), 10).is_err());
    }
}
