//! Exact sums of polynomial-times-Gaussian terms.
//!
//! A term is `c · Π_i (z_i - b_i)^{p_i} e^{-a_i (z_i - b_i)²}`. The family is
//! closed under differentiation, multiplication by a coordinate and the heat
//! semigroup, and every term is entire, so these sums serve both as test
//! functions on `ℝ^d` and as their holomorphic extensions to `ℂ^d`.
//!
//! Widths `a_i > 0` give Gaussian decay. Zero and negative widths are accepted
//! (constants, polynomials, growing Gaussians) so that non-members can be
//! represented and rejected by the regularity checks.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods shadow these whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::grid::Grid;

/// Log-magnitude above which strip evaluations are rejected.
pub const LOG_OVERFLOW_GUARD: f64 = 700.0;

/// One axis factor `(z - center)^power · e^{-width (z - center)²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisFactor {
    pub power: u32,
    pub width: f64,
    pub center: f64,
}

impl AxisFactor {
    pub fn new(power: u32, width: f64, center: f64) -> Self {
        Self {
            power,
            width,
            center,
        }
    }

    pub fn gaussian(width: f64, center: f64) -> Self {
        Self::new(0, width, center)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let w = z - self.center;
        w.powi(self.power as i32) * (-w * w * self.width).exp()
    }

    /// Complex logarithm of the factor, `None` at a zero of the monomial.
    pub fn log_eval(&self, z: Complex64) -> Option<Complex64> {
        let w = z - self.center;
        let exponent = -w * w * self.width;
        if self.power == 0 {
            return Some(exponent);
        }
        if w.norm() == 0.0 {
            return None;
        }
        Some(w.ln() * self.power as f64 + exponent)
    }

    /// Evaluates `factor(z) · e^{log_weight}` with the weight folded into the
    /// exponent, so large intermediate magnitudes never materialize.
    pub fn eval_weighted(&self, z: Complex64, log_weight: f64) -> Result<Complex64> {
        match self.log_eval(z) {
            None => Ok(Complex64::new(0.0, 0.0)),
            Some(l) => {
                let l = l + log_weight;
                if l.re > LOG_OVERFLOW_GUARD {
                    return Err(Error::StripOverflow { log_magnitude: l.re });
                }
                Ok(l.exp())
            }
        }
    }

    fn is_valid(&self) -> bool {
        self.width.is_finite() && self.center.is_finite()
    }
}

/// `coeff · Π_i factors[i](z_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTerm {
    pub coeff: Complex64,
    pub factors: Vec<AxisFactor>,
}

impl GaussianTerm {
    pub fn new(coeff: Complex64, factors: Vec<AxisFactor>) -> Self {
        Self { coeff, factors }
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.factors
            .iter()
            .zip(z)
            .fold(self.coeff, |acc, (f, zi)| acc * f.eval(*zi))
    }

    /// `ln |term(z)|`, `-∞` at zeros.
    pub fn log_abs(&self, z: &[Complex64]) -> f64 {
        let mut acc = self.coeff.norm().ln();
        for (f, zi) in self.factors.iter().zip(z) {
            match f.log_eval(*zi) {
                Some(l) => acc += l.re,
                None => return f64::NEG_INFINITY,
            }
        }
        acc
    }

    fn log_eval(&self, z: &[Complex64]) -> Option<Complex64> {
        if self.coeff.norm() == 0.0 {
            return None;
        }
        let mut acc = self.coeff.ln();
        for (f, zi) in self.factors.iter().zip(z) {
            acc += f.log_eval(*zi)?;
        }
        Some(acc)
    }
}

/// Finite sum of tensor-product terms on `ℂ^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticGaussianSum {
    dim: usize,
    terms: Vec<GaussianTerm>,
}

impl AnalyticGaussianSum {
    /// The zero function.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(dim: usize, terms: Vec<GaussianTerm>) -> Result<Self> {
        let mut s = Self::zero(dim);
        for t in terms {
            s.push(t)?;
        }
        Ok(s)
    }

    /// `e^{-width |z - center|²}`.
    pub fn gaussian(width: f64, center: &[f64]) -> Result<Self> {
        let factors = center
            .iter()
            .map(|&b| AxisFactor::gaussian(width, b))
            .collect();
        Self::from_terms(
            center.len(),
            vec![GaussianTerm::new(Complex64::new(1.0, 0.0), factors)],
        )
    }

    /// The constant function `c`.
    pub fn constant(dim: usize, c: Complex64) -> Self {
        Self {
            dim,
            terms: vec![GaussianTerm::new(c, vec![AxisFactor::gaussian(0.0, 0.0); dim])],
        }
    }

    pub fn push(&mut self, term: GaussianTerm) -> Result<()> {
        if term.factors.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: term.factors.len(),
            });
        }
        if !(term.coeff.re.is_finite() && term.coeff.im.is_finite())
            || !term.factors.iter().all(AxisFactor::is_valid)
        {
            return Err(Error::NonFinite);
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[GaussianTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.norm() == 0.0)
    }

    fn live_factors(&self) -> impl Iterator<Item = &AxisFactor> {
        self.terms
            .iter()
            .filter(|t| t.coeff.norm() != 0.0)
            .flat_map(|t| t.factors.iter())
    }

    /// True when every nonzero term has positive width on every axis.
    pub fn is_decaying(&self) -> bool {
        self.live_factors().all(|f| f.width > 0.0)
    }

    /// Smallest width over nonzero terms (`+∞` for the zero function).
    pub fn min_width(&self) -> f64 {
        self.live_factors().fold(f64::INFINITY, |m, f| m.min(f.width))
    }

    pub fn max_width(&self) -> f64 {
        self.live_factors().fold(f64::NEG_INFINITY, |m, f| m.max(f.width))
    }

    pub fn max_power(&self) -> u32 {
        self.live_factors().fold(0, |m, f| m.max(f.power))
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        debug_assert_eq!(z.len(), self.dim);
        self.terms.iter().map(|t| t.eval(z)).sum()
    }

    pub fn eval_real(&self, x: &[f64]) -> Complex64 {
        let z: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.eval(&z)
    }

    /// `u(z) · e^{log_weight}` with each term evaluated in log form.
    pub fn eval_weighted(&self, z: &[Complex64], log_weight: f64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            if let Some(l) = t.log_eval(z) {
                let l = l + log_weight;
                if l.re > LOG_OVERFLOW_GUARD {
                    return Err(Error::StripOverflow { log_magnitude: l.re });
                }
                acc += l.exp();
            }
        }
        Ok(acc)
    }

    /// `ln |u(z)|` computed without overflow (`-∞` where `u(z) = 0`).
    pub fn log_abs(&self, z: &[Complex64]) -> f64 {
        let logs: Vec<Option<Complex64>> = self.terms.iter().map(|t| t.log_eval(z)).collect();
        let top = logs
            .iter()
            .flatten()
            .fold(f64::NEG_INFINITY, |m, l| m.max(l.re));
        if top == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let s: Complex64 = logs.iter().flatten().map(|l| (l - top).exp()).sum();
        top + s.norm().ln()
    }

    /// Samples `u(x_j + i y)` on every node `x_j` of `grid`.
    pub fn sample(&self, grid: &Grid, imag_shift: &[f64]) -> Result<SampledField> {
        if grid.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: grid.dim(),
            });
        }
        if imag_shift.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: imag_shift.len(),
            });
        }
        let mut z = vec![Complex64::new(0.0, 0.0); self.dim];
        SampledField::from_fn(*grid, |x| {
            for ((zi, xi), yi) in z.iter_mut().zip(x).zip(imag_shift) {
                *zi = Complex64::new(*xi, *yi);
            }
            self.eval(&z)
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| GaussianTerm::new(t.coeff * c, t.factors.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self {
            dim: self.dim,
            terms,
        }
        .simplified())
    }

    /// Merges terms with identical factors and drops zero coefficients.
    pub fn simplified(&self) -> Self {
        let mut out: Vec<GaussianTerm> = Vec::new();
        for t in &self.terms {
            match out.iter_mut().find(|o| o.factors == t.factors) {
                Some(o) => o.coeff += t.coeff,
                None => out.push(t.clone()),
            }
        }
        out.retain(|t| t.coeff.norm() != 0.0);
        Self {
            dim: self.dim,
            terms: out,
        }
    }

    /// `∂u/∂z_axis`, exact.
    pub fn derivative(&self, axis: usize) -> Self {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            let f = t.factors[axis];
            if f.power > 0 {
                let mut factors = t.factors.clone();
                factors[axis].power -= 1;
                terms.push(GaussianTerm::new(t.coeff * f.power as f64, factors));
            }
            if f.width != 0.0 {
                let mut factors = t.factors.clone();
                factors[axis].power += 1;
                terms.push(GaussianTerm::new(t.coeff * (-2.0 * f.width), factors));
            }
        }
        Self {
            dim: self.dim,
            terms,
        }
        .simplified()
    }

    /// `z_axis · u(z)`, exact.
    pub fn mul_coordinate(&self, axis: usize) -> Self {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            let f = t.factors[axis];
            let mut up = t.factors.clone();
            up[axis].power += 1;
            terms.push(GaussianTerm::new(t.coeff, up));
            if f.center != 0.0 {
                terms.push(GaussianTerm::new(t.coeff * f.center, t.factors.clone()));
            }
        }
        Self {
            dim: self.dim,
            terms,
        }
        .simplified()
    }

    /// Image under the heat semigroup `e^{Δ/8π}`, i.e. convolution with
    /// `2^{d/2} e^{-2π|x|²}`, in closed form. Needs nonnegative widths.
    pub fn smoothed(&self) -> Result<Self> {
        let mut terms = Vec::new();
        for t in &self.terms {
            let mut partial: Vec<(Complex64, Vec<AxisFactor>)> =
                vec![(t.coeff, Vec::with_capacity(self.dim))];
            for f in &t.factors {
                let expansion = smooth_factor(f)?;
                let mut next = Vec::with_capacity(partial.len() * expansion.len());
                for (c, fs) in &partial {
                    for (e, g) in &expansion {
                        let mut fs2 = fs.clone();
                        fs2.push(*g);
                        next.push((c * e, fs2));
                    }
                }
                partial = next;
            }
            terms.extend(partial.into_iter().map(|(c, fs)| GaussianTerm::new(c, fs)));
        }
        Ok(Self {
            dim: self.dim,
            terms,
        }
        .simplified())
    }
}

/// Heat smoothing of one axis factor.
///
/// With `w = x - b`, `∫ √2 e^{-2π(w-s)²} s^p e^{-a s²} ds` equals
/// `√r · e^{-a r w²} · E[(r w + Z)^p]` where `r = 2π/(2π+a)` and
/// `Z ~ N(0, 1/(2(2π+a)))`. Expanding the moment gives a sum of factors with
/// the same center and width `a r`.
fn smooth_factor(f: &AxisFactor) -> Result<Vec<(f64, AxisFactor)>> {
    if f.width < 0.0 {
        return Err(Error::Divergent("heat smoothing of a growing Gaussian"));
    }
    let a = f.width;
    let r = 2.0 * PI / (2.0 * PI + a);
    let var = 0.5 / (2.0 * PI + a);
    let new_width = a * r;
    let pref = r.sqrt();
    let p = f.power as usize;
    let mut out = Vec::new();
    // binomial(p, k), (k-1)!! var^{k/2}
    let mut binom = 1.0;
    let mut moment = 1.0;
    for k in 0..=p {
        if k > 0 {
            binom = binom * (p - k + 1) as f64 / k as f64;
            if k % 2 == 0 {
                moment *= (k - 1) as f64 * var;
            }
        }
        if k % 2 == 1 {
            continue;
        }
        let coeff = pref * binom * r.powi((p - k) as i32) * moment;
        out.push((coeff, AxisFactor::new((p - k) as u32, new_width, f.center)));
    }
    Ok(out)
}

/// Samples `f(x + i·imag_shift)` on `grid`.
pub fn sample(f: &AnalyticGaussianSum, grid: &Grid, imag_shift: &[f64]) -> Result<SampledField> {
    f.sample(grid, imag_shift)
}
