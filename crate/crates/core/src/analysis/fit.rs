//! Least-squares plane and circle fits for point samples.

use crate::scalar::Scalar;
use crate::vector::Vector3;

/// Eigen-decomposition of a symmetric 3×3 matrix by cyclic Jacobi
/// rotations. Eigenvalues ascend; eigenvectors are the matching columns.
pub fn symmetric_eigen<S: Scalar>(m: [[S; 3]; 3]) -> ([S; 3], [Vector3<S>; 3]) {
    let mut a = m;
    let mut v = [[S::zero(); 3]; 3];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = S::one();
    }
    for _ in 0..64 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off <= S::epsilon() * (a[0][0].abs() + a[1][1].abs() + a[2][2].abs()) || off == S::zero() {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == S::zero() {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (S::lit(2.0) * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + S::one()).sqrt());
            let c = S::one() / (t * t + S::one()).sqrt();
            let s = t * c;
            for k in 0..3 {
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let (vp, vq) = (row[p], row[q]);
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.map(|i| a[i][i]);
    let vectors = order.map(|i| Vector3::new(v[0][i], v[1][i], v[2][i]));
    (values, vectors)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneFit<S> {
    pub centroid: Vector3<S>,
    /// Unit normal; sign is arbitrary.
    pub normal: Vector3<S>,
    /// Largest distance of a sample from the plane.
    pub residual: S,
}

/// Total least-squares plane through `points` (at least three).
pub fn fit_plane<S: Scalar>(points: &[Vector3<S>]) -> Option<PlaneFit<S>> {
    if points.len() < 3 {
        return None;
    }
    let n = S::from_count(points.len());
    let centroid = points.iter().copied().sum::<Vector3<S>>() / n;
    let mut cov = [[S::zero(); 3]; 3];
    for p in points {
        let d = (*p - centroid).to_array();
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] += d[i] * d[j];
            }
        }
    }
    let (_, vecs) = symmetric_eigen(cov);
    let normal = vecs[0].try_normalize()?;
    let residual = points.iter().fold(S::zero(), |m, p| m.max((*p - centroid).dot(normal).abs()));
    Some(PlaneFit { centroid, normal, residual })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleFit<S> {
    pub center: Vector3<S>,
    pub normal: Vector3<S>,
    pub radius: S,
    /// Largest distance from the fitted plane.
    pub plane_residual: S,
    /// Largest `| ‖p − center‖_plane − radius |`.
    pub radial_residual: S,
}

impl<S: Scalar> CircleFit<S> {
    pub fn residual(&self) -> S {
        self.plane_residual.max(self.radial_residual)
    }
}

/// Plane fit followed by an algebraic (Kåsa) circle fit in that plane.
pub fn fit_circle<S: Scalar>(points: &[Vector3<S>]) -> Option<CircleFit<S>> {
    let plane = fit_plane(points)?;
    let helper = if plane.normal.x.abs() < S::lit(0.9) { Vector3::unit_x() } else { Vector3::unit_y() };
    let e1 = plane.normal.cross(helper).try_normalize()?;
    let e2 = plane.normal.cross(e1);
    let local: Vec<(S, S)> = points
        .iter()
        .map(|p| {
            let d = *p - plane.centroid;
            (d.dot(e1), d.dot(e2))
        })
        .collect();
    // Minimize Σ (x² + y² + D x + E y + F)² via the normal equations.
    let mut ata = [[S::zero(); 3]; 3];
    let mut atb = [S::zero(); 3];
    for &(x, y) in &local {
        let row = [x, y, S::one()];
        let b = -(x * x + y * y);
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * b;
        }
    }
    let sol = solve3(ata, atb)?;
    let (cx, cy) = (-sol[0] / S::lit(2.0), -sol[1] / S::lit(2.0));
    let r2 = cx * cx + cy * cy - sol[2];
    if !(r2 > S::zero()) {
        return None;
    }
    let radius = r2.sqrt();
    let radial_residual = local.iter().fold(S::zero(), |m, &(x, y)| m.max(((x - cx).hypot(y - cy) - radius).abs()));
    Some(CircleFit {
        center: plane.centroid + e1 * cx + e2 * cy,
        normal: plane.normal,
        radius,
        plane_residual: plane.residual,
        radial_residual,
    })
}

fn solve3<S: Scalar>(a: [[S; 3]; 3], b: [S; 3]) -> Option<[S; 3]> {
    let r = a.map(Vector3::from_array);
    let det = r[0].dot(r[1].cross(r[2]));
    if det == S::zero() || !det.is_finite() {
        return None;
    }
    let c0 = r[1].cross(r[2]);
    let c1 = r[2].cross(r[0]);
    let c2 = r[0].cross(r[1]);
    Some(((c0 * b[0] + c1 * b[1] + c2 * b[2]) / det).to_array())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_diagonalizable_matrix() {
        let m: [[f64; 3]; 3] = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]];
        let (vals, vecs) = symmetric_eigen(m);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14 && (vals[2] - 5.0).abs() < 1e-14);
        let expect = Vector3::new(1.0, -1.0, 0.0).normalize();
        assert!(vecs[0].dot(expect).abs() > 1.0 - 1e-14);
    }

    #[test]
    fn tilted_circle_is_recovered() {
        let normal = Vector3::new(1.0, 2.0, 2.0).normalize();
        let e1 = normal.cross(Vector3::unit_z()).normalize();
        let e2 = normal.cross(e1);
        let center = Vector3::new(0.3, -1.0, 2.0);
        let pts: Vec<_> = (0..50)
            .map(|i| {
                let a = i as f64 * 0.05;
                center + e1 * (0.7 * a.cos()) + e2 * (0.7 * a.sin())
            })
            .collect();
        let fit = fit_circle(&pts).unwrap();
        assert!((fit.radius - 0.7).abs() < 1e-10);
        assert!((fit.center - center).norm() < 1e-10);
        assert!(fit.normal.dot(normal).abs() > 1.0 - 1e-12);
        assert!(fit.residual() < 1e-10);
    }

    #[test]
    fn non_circle_has_large_residual() {
        let pts: Vec<_> = (0..50).map(|i| {
            let t = i as f64 * 0.1;
            Vector3::new(t, t * t, 0.0)
        }).collect();
        let fit = fit_circle(&pts).unwrap();
        assert!(fit.plane_residual < 1e-12);
        assert!(fit.radial_residual > 1e-2);
    }
}
