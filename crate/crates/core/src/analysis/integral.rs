use crate::frame::CurveSamples;
use crate::scalar::Scalar;
use crate::vector::Vector3;

use super::AnalysisError;

/// Grids whose spacing varies by more than this (relative) are rejected.
const UNIFORM_TOL: f64 = 1e-8;

/// `β` with `β′ = field` and `β(s₀) = 0`, by cumulative quadrature of the
/// cubic through four neighbouring samples (fourth order; one-sided
/// weights on the first and last interval).
pub fn integral_curve<S: Scalar>(s: &[S], field: &[Vector3<S>]) -> Result<CurveSamples<S>, AnalysisError> {
    let n = s.len();
    if field.len() != n {
        return Err(AnalysisError::GridMismatch(format!("{} field samples on a grid of {n}", field.len())));
    }
    if n < 4 {
        return Err(AnalysisError::TooFewSamples { needed: 4, got: n });
    }
    let h = (s[n - 1] - s[0]) / S::from_count(n - 1);
    let worst = s.windows(2).fold(S::zero(), |m, w| m.max(((w[1] - w[0]) - h).abs()));
    if !(h > S::zero()) || worst > S::lit(UNIFORM_TOL) * h {
        return Err(AnalysisError::GridMismatch("field must be sampled on a uniform grid".into()));
    }
    let w = h / S::lit(24.0);
    let k = |x: f64| S::lit(x);
    let mut points = Vec::with_capacity(n);
    let mut acc = Vector3::zero();
    points.push(acc);
    for i in 0..n - 1 {
        let step = if i == 0 {
            field[0] * k(9.0) + field[1] * k(19.0) - field[2] * k(5.0) + field[3]
        } else if i + 2 >= n {
            field[i - 2] - field[i - 1] * k(5.0) + field[i] * k(19.0) + field[i + 1] * k(9.0)
        } else {
            -field[i - 1] + (field[i] + field[i + 1]) * k(13.0) - field[i + 2]
        };
        acc += step * w;
        points.push(acc);
    }
    Ok(CurveSamples::new(s.to_vec(), points, None)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_is_a_line() {
        let s: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let f = vec![Vector3::unit_z(); 11];
        let c = integral_curve(&s, &f).unwrap();
        for (si, p) in s.iter().zip(c.points()) {
            assert!((*p - Vector3::new(0.0, 0.0, *si)).norm() < 1e-14);
        }
    }

    #[test]
    fn cubic_fields_integrate_exactly() {
        let s: Vec<f64> = (0..9).map(|i| 0.5 + i as f64 * 0.25).collect();
        let f: Vec<_> = s.iter().map(|&t| Vector3::new(t * t * t, 1.0 - t, t * t)).collect();
        let c = integral_curve(&s, &f).unwrap();
        let prim = |t: f64| Vector3::new(t.powi(4) / 4.0, t - t * t / 2.0, t.powi(3) / 3.0);
        for (&t, p) in s.iter().zip(c.points()) {
            assert!((*p - (prim(t) - prim(0.5))).norm() < 1e-12);
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |n: usize| {
            let s: Vec<f64> = (0..=n).map(|i| i as f64 * 2.0 / n as f64).collect();
            let f: Vec<_> = s.iter().map(|&t| Vector3::new(t.cos(), t.sin(), 0.0)).collect();
            let c = integral_curve(&s, &f).unwrap();
            let p = c.points()[n];
            (p - Vector3::new(2f64.sin(), 1.0 - 2f64.cos(), 0.0)).norm()
        };
        let ratio = err(20) / err(40);
        assert!(ratio > 12.0, "ratio {ratio}");
    }

    #[test]
    fn rejects_bad_grids() {
        let f = vec![Vector3::unit_x(); 5];
        assert!(integral_curve(&[0.0, 0.1, 0.3, 0.4, 0.5], &f).is_err());
        assert!(integral_curve(&[0.0, 0.1, 0.2], &f[..3]).is_err());
        assert!(integral_curve(&[0.0, 0.1, 0.2, 0.3], &f).is_err());
    }
}
