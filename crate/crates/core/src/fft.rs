//! Complex FFT used by the spectral transforms.
//!
//! Radix-2 for power-of-two lengths, a direct `O(n²)` DFT otherwise. Both use
//! twiddles evaluated directly (no recurrences), so results are reproducible.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods shadow these whenever std is linked
use num_traits::Float;

pub(crate) struct Plan {
    n: usize,
    /// `e^{-2iπk/n}` for `k < n`.
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Plan {
    pub(crate) fn new(n: usize) -> Self {
        let twiddles = (0..n)
            .map(|k| {
                let theta = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();
        let bitrev = if n.is_power_of_two() {
            let bits = n.trailing_zeros();
            (0..n)
                .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
                .collect()
        } else {
            Vec::new()
        };
        Self { n, twiddles, bitrev }
    }

    pub(crate) fn len(&self) -> usize {
        self.n
    }

    /// In-place unnormalized transform with kernel `e^{∓2iπjk/n}`
    /// (`inverse = false` takes the minus sign).
    pub(crate) fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        debug_assert_eq!(buf.len(), self.n);
        if self.n.is_power_of_two() {
            self.radix2(buf, inverse);
        } else {
            self.direct(buf, inverse);
        }
    }

    fn twiddle(&self, k: usize, inverse: bool) -> Complex64 {
        let w = self.twiddles[k % self.n];
        if inverse {
            w.conj()
        } else {
            w
        }
    }

    fn radix2(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.n;
        for i in 0..n {
            let j = self.bitrev[i];
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let step = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddle(k * step, inverse);
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }

    fn direct(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let input = buf.to_vec();
        for (k, out) in buf.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, x) in input.iter().enumerate() {
                acc += *x * self.twiddle((j * k) % n, inverse);
            }
            *out = acc;
        }
    }
}

/// Applies `plan` along `axis` of a row-major array whose every axis has
/// length `plan.len()`.
pub(crate) fn transform_axis(
    data: &mut [Complex64],
    dim: usize,
    axis: usize,
    plan: &Plan,
    inverse: bool,
) {
    let n = plan.len();
    let stride = n.pow((dim - 1 - axis) as u32);
    let block = stride * n;
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for base in (0..data.len()).step_by(block) {
        for offset in 0..stride {
            let start = base + offset;
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = data[start + i * stride];
            }
            plan.transform(&mut line, inverse);
            for (i, v) in line.iter().enumerate() {
                data[start + i * stride] = *v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(x: &[Complex64], inverse: bool) -> Vec<Complex64> {
        let n = x.len();
        let sign = if inverse { 1.0 } else { -1.0 };
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, v)| {
                        let th = sign * 2.0 * PI * (j * k) as f64 / n as f64;
                        *v * Complex64::new(th.cos(), th.sin())
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn radix2_and_direct_match_naive_dft() {
        for n in [8usize, 12, 16, 64, 10] {
            let x: Vec<Complex64> = (0..n)
                .map(|j| Complex64::new((j as f64 * 0.37).sin(), (j as f64 * 1.3).cos()))
                .collect();
            for inverse in [false, true] {
                let mut y = x.clone();
                Plan::new(n).transform(&mut y, inverse);
                let r = naive(&x, inverse);
                for (a, b) in y.iter().zip(&r) {
                    assert!((a - b).norm() < 1e-12, "n = {n}");
                }
            }
        }
    }
}
