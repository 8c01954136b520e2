//! Pairwise summation with a fixed reduction tree.

use num_complex::Complex64;

const LEAF: usize = 16;

pub(crate) fn pairwise(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        let mut acc = 0.0;
        for v in values {
            acc += *v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise(&values[..mid]) + pairwise(&values[mid..])
}

pub(crate) fn pairwise_complex(values: &[Complex64]) -> Complex64 {
    if values.len() <= LEAF {
        let mut acc = Complex64::new(0.0, 0.0);
        for v in values {
            acc += *v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_complex(&values[..mid]) + pairwise_complex(&values[mid..])
}

/// Pairwise sum of `f(i)` for `i in 0..n` without materializing a full buffer
/// for large `n`: leaves of `LEAF` items are summed sequentially.
pub(crate) fn pairwise_map<F: Fn(usize) -> Complex64>(lo: usize, hi: usize, f: &F) -> Complex64 {
    if hi - lo <= LEAF {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in lo..hi {
            acc += f(i);
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    pairwise_map(lo, mid, f) + pairwise_map(mid, hi, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn pairwise_matches_exact_integer_sums() {
        let v: Vec<f64> = (1..=1000).map(|k| k as f64).collect();
        assert_eq!(pairwise(&v), 500500.0);
        assert_eq!(pairwise_map(0, 1000, &|i| Complex64::new(v[i], 0.0)).re, 500500.0);
        let c: Vec<Complex64> = v.iter().map(|x| Complex64::new(*x, -*x)).collect();
        assert_eq!(pairwise_complex(&c), Complex64::new(500500.0, -500500.0));
        assert_eq!(pairwise(&[]), 0.0);
    }
}
