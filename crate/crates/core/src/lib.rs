//! Weyl and anti-Wick symbol calculus on discretized phase space.
//!
//! The crate is `no_std` and only needs `alloc`. It provides:
//!
//! - [`grid`], [`field`], [`spectral`]: uniform centered grids, sampled complex
//!   fields, the continuous Fourier transform `û(ξ) = ∫ u(x) e^{-2iπx·ξ} dx` and
//!   the `L²` inner product.
//! - [`gaussian`]: exact polynomial-times-Gaussian sums that can be evaluated at
//!   complex arguments, differentiated and smoothed in closed form.
//! - [`quantize`]: coherent states, anti-Wick operator assembly and the
//!   kernel/Weyl-symbol correspondence.
//! - [`heat`]: the Gaussian smoothing semigroup `e^{Δ/8π}` and two ways of
//!   inverting it.
//! - [`gsnorm`]: numerical regularity estimates (Gelfand-Shilov constants,
//!   holomorphic growth bounds, strip integrals, Hermite bounds, Gevrey order).
//! - [`pairing`]: evaluation of the anti-Wick symbol of an operator as a linear
//!   functional on analytic test functions.
#![no_std]

extern crate alloc;

pub mod error;
pub mod field;
pub mod gaussian;
pub mod grid;
pub mod gsnorm;
pub mod heat;
pub mod pairing;
pub mod quantize;
pub mod spectral;

mod fft;
mod sum;

pub use error::{Error, Result};
pub use field::SampledField;
pub use gaussian::{AnalyticGaussianSum, AxisFactor, GaussianTerm};
pub use grid::Grid;
pub use num_complex::Complex64;
