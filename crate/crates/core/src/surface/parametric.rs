use serde::{Deserialize, Serialize};

use super::{SurfaceError, DEFAULT_EPS_REG};
use crate::expr::{eval, eval_jet2, parse_expr, Expr};
use crate::scalar::Scalar;
use crate::vector::Vector3;

/// Parameter rectangle; each bound may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain<S> {
    pub u_min: S,
    pub u_max: S,
    pub v_min: S,
    pub v_max: S,
}

impl<S: Scalar> Domain<S> {
    pub fn unbounded() -> Self {
        let inf = S::infinity();
        Self { u_min: -inf, u_max: inf, v_min: -inf, v_max: inf }
    }

    pub fn new(u: (S, S), v: (S, S)) -> Self {
        Self { u_min: u.0, u_max: u.1, v_min: v.0, v_max: v.1 }
    }

    pub fn contains(&self, u: S, v: S) -> bool {
        u >= self.u_min && u <= self.u_max && v >= self.v_min && v <= self.v_max
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FirstFundamentalForm<S> {
    pub e: S,
    pub f: S,
    pub g: S,
}

impl<S: Scalar> FirstFundamentalForm<S> {
    /// `EG − F²`.
    pub fn determinant(&self) -> S {
        self.e * self.g - self.f * self.f
    }

    /// Squared speed of the parameter velocity `(du, dv)`.
    pub fn quadratic(&self, du: S, dv: S) -> S {
        self.e * du * du + S::lit(2.0) * self.f * du * dv + self.g * dv * dv
    }
}

/// Position and partial derivatives of `X` at one parameter point.
#[derive(Clone, Copy, Debug)]
pub struct Patch<S> {
    pub u: S,
    pub v: S,
    pub position: Vector3<S>,
    pub xu: Vector3<S>,
    pub xv: Vector3<S>,
    pub xuu: Vector3<S>,
    pub xuv: Vector3<S>,
    pub xvv: Vector3<S>,
}

impl<S: Scalar> Patch<S> {
    pub fn first_form(&self) -> FirstFundamentalForm<S> {
        FirstFundamentalForm { e: self.xu.dot(self.xu), f: self.xu.dot(self.xv), g: self.xv.dot(self.xv) }
    }

    /// Unnormalized normal `X_u × X_v`.
    pub fn normal_raw(&self) -> Vector3<S> {
        self.xu.cross(self.xv)
    }

    pub fn normal(&self) -> Vector3<S> {
        self.normal_raw().normalize()
    }

    /// Maps a parameter velocity to the ambient tangent vector.
    pub fn push_forward(&self, du: S, dv: S) -> Vector3<S> {
        self.xu * du + self.xv * dv
    }

    /// Parameter velocity whose push-forward is the tangential part of `w`.
    pub fn pull_back(&self, w: Vector3<S>) -> (S, S) {
        let ff = self.first_form();
        let (a, b) = (w.dot(self.xu), w.dot(self.xv));
        let det = ff.determinant();
        ((ff.g * a - ff.f * b) / det, (ff.e * b - ff.f * a) / det)
    }
}

/// `X(u, v) = (x(u,v), y(u,v), z(u,v))` over a rectangular domain.
#[derive(Clone, Debug)]
pub struct ParametricSurface<S> {
    coords: [Expr<S>; 3],
    domain: Domain<S>,
    eps_reg: S,
}

impl<S: Scalar> ParametricSurface<S> {
    pub fn new(x: &str, y: &str, z: &str, domain: Domain<S>) -> Result<Self, SurfaceError> {
        let vars = ["u", "v"];
        Ok(Self::from_exprs(
            [parse_expr(x, &vars)?, parse_expr(y, &vars)?, parse_expr(z, &vars)?],
            domain,
        ))
    }

    /// Panics if an expression is not over exactly two variables.
    pub fn from_exprs(coords: [Expr<S>; 3], domain: Domain<S>) -> Self {
        for c in &coords {
            assert_eq!(c.variables().len(), 2, "parametric coordinates are functions of (u, v)");
        }
        Self { coords, domain, eps_reg: S::lit(DEFAULT_EPS_REG) }
    }

    pub fn with_eps_reg(mut self, eps: S) -> Self {
        self.eps_reg = eps;
        self
    }

    pub fn eps_reg(&self) -> S {
        self.eps_reg
    }

    pub fn domain(&self) -> &Domain<S> {
        &self.domain
    }

    pub fn coordinates(&self) -> &[Expr<S>; 3] {
        &self.coords
    }

    fn check_domain(&self, u: S, v: S) -> Result<(), SurfaceError> {
        if self.domain.contains(u, v) {
            Ok(())
        } else {
            Err(SurfaceError::OutOfDomain { u: u.to_f64_lossy(), v: v.to_f64_lossy() })
        }
    }

    pub fn point(&self, u: S, v: S) -> Result<Vector3<S>, SurfaceError> {
        self.check_domain(u, v)?;
        let c = |i: usize| eval(&self.coords[i], &[u, v]);
        Ok(Vector3::new(c(0)?, c(1)?, c(2)?))
    }

    /// Position and derivatives, without the regularity check.
    pub fn patch_unchecked(&self, u: S, v: S) -> Result<Patch<S>, SurfaceError> {
        self.check_domain(u, v)?;
        let mut jets = Vec::with_capacity(3);
        for c in &self.coords {
            jets.push(eval_jet2(c, &[u, v])?);
        }
        let pick = |f: &dyn Fn(&crate::expr::Jet2<S, 2>) -> S| Vector3::new(f(&jets[0]), f(&jets[1]), f(&jets[2]));
        Ok(Patch {
            u,
            v,
            position: pick(&|j| j.value),
            xu: pick(&|j| j.grad[0]),
            xv: pick(&|j| j.grad[1]),
            xuu: pick(&|j| j.hess[0][0]),
            xuv: pick(&|j| j.hess[0][1]),
            xvv: pick(&|j| j.hess[1][1]),
        })
    }

    /// Position and derivatives at a regular point.
    pub fn patch(&self, u: S, v: S) -> Result<Patch<S>, SurfaceError> {
        let p = self.patch_unchecked(u, v)?;
        let m = p.normal_raw().norm();
        if !(m > self.eps_reg) {
            return Err(SurfaceError::Irregular {
                at: format!("(u, v) = ({u}, {v})"),
                magnitude: m.to_f64_lossy(),
                threshold: self.eps_reg.to_f64_lossy(),
            });
        }
        Ok(p)
    }

    pub fn first_form(&self, u: S, v: S) -> Result<FirstFundamentalForm<S>, SurfaceError> {
        Ok(self.patch(u, v)?.first_form())
    }

    /// `U = (X_u × X_v) / ‖X_u × X_v‖`.
    pub fn normal(&self, u: S, v: S) -> Result<Vector3<S>, SurfaceError> {
        Ok(self.patch(u, v)?.normal())
    }

    /// Finds `(u, v)` with `X(u, v)` closest to `p` by Gauss–Newton, starting
    /// from `guess` or, without one, from the best node of a coarse grid.
    pub fn invert(&self, p: Vector3<S>, guess: Option<(S, S)>) -> Result<(S, S), SurfaceError> {
        let (mut u, mut v) = match guess {
            Some(g) => g,
            None => self.grid_seed(p)?,
        };
        for _ in 0..50 {
            let patch = self.patch(u, v)?;
            let r = patch.position - p;
            let (du, dv) = patch.pull_back(r);
            let (nu, nv) = self.clamp(u - du, v - dv);
            let step = (nu - u).abs() + (nv - v).abs();
            u = nu;
            v = nv;
            if step <= S::lit(1e-15) * (S::one() + u.abs() + v.abs()) {
                break;
            }
        }
        Ok((u, v))
    }

    fn clamp(&self, u: S, v: S) -> (S, S) {
        let d = &self.domain;
        (u.max(d.u_min).min(d.u_max), v.max(d.v_min).min(d.v_max))
    }

    fn grid_seed(&self, p: Vector3<S>) -> Result<(S, S), SurfaceError> {
        let lim = S::lit(10.0);
        let d = &self.domain;
        let bound = |a: S, b: S| (a.max(-lim), b.min(lim));
        let (u0, u1) = bound(d.u_min, d.u_max);
        let (v0, v1) = bound(d.v_min, d.v_max);
        let n = 64;
        let mut best: Option<(S, S, S)> = None;
        for i in 0..=n {
            for j in 0..=n {
                let t = |a: S, b: S, k: usize| a + (b - a) * S::from_count(k) / S::from_count(n);
                let (u, v) = (t(u0, u1, i), t(v0, v1, j));
                let Ok(patch) = self.patch(u, v) else { continue };
                let dist = (patch.position - p).norm_squared();
                if best.is_none_or(|b| dist < b.2) {
                    best = Some((u, v, dist));
                }
            }
        }
        best.map(|b| (b.0, b.1)).ok_or_else(|| SurfaceError::Invalid("no regular point found for inversion seed".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::presets;

    #[test]
    fn cylinder_first_form_is_identity() {
        let s: ParametricSurface<f64> = presets::cylinder();
        for (u, v) in [(0.0, 0.0), (1.3, -2.0), (4.0, 7.5)] {
            let ff = s.first_form(u, v).unwrap();
            assert!((ff.e - 1.0).abs() < 1e-15 && ff.f.abs() < 1e-15 && (ff.g - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn paraboloid_first_form_and_normal() {
        let s: ParametricSurface<f64> = presets::paraboloid();
        let ff = s.first_form(1.0, 0.0).unwrap();
        assert_eq!((ff.e, ff.f, ff.g), (5.0, 0.0, 1.0));
        let p = s.patch(1.0, 0.0).unwrap();
        let n = p.normal();
        let expect = Vector3::new(-2.0, 0.0, 1.0) / 5f64.sqrt();
        assert!((n - expect).max_abs() < 1e-15);
        assert!(n.dot(p.xu).abs() <= 1e-12 && n.dot(p.xv).abs() <= 1e-12);
    }

    #[test]
    fn sphere_first_form_at_origin() {
        let s: ParametricSurface<f64> = presets::sphere();
        let ff = s.first_form(0.0, 0.0).unwrap();
        assert_eq!((ff.e, ff.f, ff.g), (1.0, 0.0, 1.0));
    }

    #[test]
    fn cylinder_and_plane_normals() {
        let c: ParametricSurface<f64> = presets::cylinder();
        assert!((c.normal(0.0, 0.0).unwrap() - Vector3::unit_x()).max_abs() < 1e-15);
        let p: ParametricSurface<f64> = presets::plane();
        for (u, v) in [(0.0, 0.0), (3.0, -1.0)] {
            assert_eq!(p.normal(u, v).unwrap(), Vector3::unit_z());
        }
    }

    #[test]
    fn singular_point_is_an_error() {
        let s: ParametricSurface<f64> = presets::paraboloid();
        assert!(matches!(s.normal(0.0, 0.3), Err(SurfaceError::Irregular { .. })));
        assert!(matches!(s.first_form(-0.5, 0.0), Err(SurfaceError::OutOfDomain { .. })));
    }

    #[test]
    fn inversion_recovers_parameters() {
        let s: ParametricSurface<f64> = presets::paraboloid();
        let p = s.point(1.2, 0.7).unwrap();
        let (u, v) = s.invert(p, None).unwrap();
        assert!((s.point(u, v).unwrap() - p).norm() < 1e-12);
        let (u, v) = s.invert(p, Some((1.1, 0.6))).unwrap();
        assert!((u - 1.2).abs() < 1e-12 && (v - 0.7).abs() < 1e-12);
    }

    #[test]
    fn pull_back_inverts_push_forward() {
        let s: ParametricSurface<f64> = presets::torus();
        let p = s.patch(0.4, 1.1).unwrap();
        let w = p.push_forward(0.3, -0.8);
        let (a, b) = p.pull_back(w);
        assert!((a - 0.3).abs() < 1e-14 && (b + 0.8).abs() < 1e-14);
    }
}
