//! Second-order finite differences on (possibly non-uniform) sample grids.

use std::ops::{Add, Mul, Sub};

use crate::scalar::Scalar;
use crate::vector::Vector3;

/// Values that can be differenced along a sample grid.
pub trait Sampled<S>: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<S, Output = Self> {}

impl<S: Scalar> Sampled<S> for S {}
impl<S: Scalar> Sampled<S> for Vector3<S> {}

/// Derivative of `f` at sample `i`: three-point central stencil in the
/// interior, three-point one-sided stencil at the ends (both O(h²)).
///
/// Requires `s.len() == f.len() >= 3`.
pub fn derivative_at<S: Scalar, T: Sampled<S>>(s: &[S], f: &[T], i: usize) -> T {
    let n = s.len();
    debug_assert!(n >= 3 && f.len() == n);
    if i == 0 {
        let (a, b) = (s[1] - s[0], s[2] - s[0]);
        ((f[1] - f[0]) * (b * b) - (f[2] - f[0]) * (a * a)) * (S::one() / (a * b * (b - a)))
    } else if i == n - 1 {
        let (a, b) = (s[n - 1] - s[n - 2], s[n - 1] - s[n - 3]);
        ((f[n - 2] - f[n - 1]) * (b * b) - (f[n - 3] - f[n - 1]) * (a * a)) * (-S::one() / (a * b * (b - a)))
    } else {
        let (h1, h2) = (s[i] - s[i - 1], s[i + 1] - s[i]);
        ((f[i + 1] - f[i]) * (h1 * h1) + (f[i] - f[i - 1]) * (h2 * h2)) * (S::one() / (h1 * h2 * (h1 + h2)))
    }
}

/// Derivative at every sample. With two samples it falls back to the
/// forward difference; with fewer it returns zeros.
pub fn derivative<S: Scalar, T: Sampled<S>>(s: &[S], f: &[T]) -> Vec<T> {
    match s.len() {
        0 => Vec::new(),
        1 => vec![f[0] * S::zero()],
        2 => {
            let d = (f[1] - f[0]) * (S::one() / (s[1] - s[0]));
            vec![d, d]
        }
        n => (0..n).map(|i| derivative_at(s, f, i)).collect(),
    }
}

/// Derivative where every sample in the stencil is defined.
pub fn derivative_partial<S: Scalar, T: Sampled<S>>(s: &[S], f: &[Option<T>]) -> Vec<Option<T>> {
    let n = s.len();
    (0..n)
        .map(|i| {
            if n < 3 {
                return None;
            }
            let idx: [usize; 3] = if i == 0 {
                [0, 1, 2]
            } else if i == n - 1 {
                [n - 3, n - 2, n - 1]
            } else {
                [i - 1, i, i + 1]
            };
            let vals = [f[idx[0]]?, f[idx[1]]?, f[idx[2]]?];
            let ss = [s[idx[0]], s[idx[1]], s[idx[2]]];
            Some(derivative_at(&ss, &vals, i - idx[0]))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quadratics_for_nonuniform_grids() {
        let s = [0.0, 0.1, 0.25, 0.3, 0.5];
        let f: Vec<f64> = s.iter().map(|x| 3.0 * x * x - x + 2.0).collect();
        let d = derivative(&s, &f);
        for (x, dx) in s.iter().zip(&d) {
            assert!((dx - (6.0 * x - 1.0)).abs() < 1e-12, "{x}: {dx}");
        }
    }

    #[test]
    fn second_order_convergence() {
        let err = |h: f64| {
            let s: Vec<f64> = (0..20).map(|i| i as f64 * h).collect();
            let f: Vec<f64> = s.iter().map(|x| x.sin()).collect();
            derivative(&s, &f).iter().zip(&s).map(|(d, x)| (d - x.cos()).abs()).fold(0.0, f64::max)
        };
        let ratio = err(1e-2) / err(5e-3);
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn partial_skips_undefined_stencils() {
        let s = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let f = [Some(0.0), Some(1.0), Some(2.0), None, Some(4.0), Some(5.0), Some(6.0)];
        let d = derivative_partial(&s, &f);
        assert_eq!((d[0], d[1], d[5], d[6]), (Some(1.0), Some(1.0), Some(1.0), Some(1.0)));
        assert!(d[2].is_none() && d[3].is_none() && d[4].is_none());
    }
}
