use serde::{Deserialize, Serialize};

use super::{fmt_point, SurfaceError, DEFAULT_EPS_REG, MAX_PROJECTION_ITERATIONS};
use crate::expr::{eval, eval_jet2, parse_expr, Expr};
use crate::scalar::Scalar;
use crate::vector::Vector3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox<S> {
    pub min: Vector3<S>,
    pub max: Vector3<S>,
}

impl<S: Scalar> BoundingBox<S> {
    pub fn contains(&self, p: Vector3<S>) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }
}

/// Value, gradient and Hessian of `f` at a point.
#[derive(Clone, Copy, Debug)]
pub struct ImplicitJet<S> {
    pub value: S,
    pub gradient: Vector3<S>,
    pub hessian: [[S; 3]; 3],
}

/// The zero set of `f(x, y, z)`.
#[derive(Clone, Debug)]
pub struct ImplicitSurface<S> {
    f: Expr<S>,
    bbox: Option<BoundingBox<S>>,
    eps_reg: S,
}

impl<S: Scalar> ImplicitSurface<S> {
    pub fn new(f: &str) -> Result<Self, SurfaceError> {
        Ok(Self::from_expr(parse_expr(f, &["x", "y", "z"])?))
    }

    /// Panics if `f` is not over exactly three variables.
    pub fn from_expr(f: Expr<S>) -> Self {
        assert_eq!(f.variables().len(), 3, "implicit function is over (x, y, z)");
        Self { f, bbox: None, eps_reg: S::lit(DEFAULT_EPS_REG) }
    }

    pub fn with_bounding_box(mut self, bbox: BoundingBox<S>) -> Self {
        self.bbox = Some(bbox);
        self
    }

    pub fn with_eps_reg(mut self, eps: S) -> Self {
        self.eps_reg = eps;
        self
    }

    pub fn eps_reg(&self) -> S {
        self.eps_reg
    }

    pub fn bounding_box(&self) -> Option<&BoundingBox<S>> {
        self.bbox.as_ref()
    }

    pub fn function(&self) -> &Expr<S> {
        &self.f
    }

    pub fn value(&self, p: Vector3<S>) -> Result<S, SurfaceError> {
        Ok(eval(&self.f, &p.to_array())?)
    }

    pub fn jet(&self, p: Vector3<S>) -> Result<ImplicitJet<S>, SurfaceError> {
        let j = eval_jet2(&self.f, &p.to_array())?;
        Ok(ImplicitJet { value: j.value, gradient: Vector3::from_array(j.grad), hessian: j.hess })
    }

    /// Gradient at a regular point.
    pub fn gradient(&self, p: Vector3<S>) -> Result<Vector3<S>, SurfaceError> {
        let g = self.jet(p)?.gradient;
        let m = g.norm();
        if !(m > self.eps_reg) {
            return Err(SurfaceError::Irregular {
                at: fmt_point(p),
                magnitude: m.to_f64_lossy(),
                threshold: self.eps_reg.to_f64_lossy(),
            });
        }
        Ok(g)
    }

    /// `U = ∇f / ‖∇f‖`.
    pub fn normal(&self, p: Vector3<S>) -> Result<Vector3<S>, SurfaceError> {
        Ok(self.gradient(p)?.normalize())
    }

    /// Newton projection along the gradient: `p ← p − f ∇f / ‖∇f‖²` until
    /// `|f| ≤ tol`. Returns the projected point and the iteration count.
    pub fn project(&self, p: Vector3<S>, tol: S) -> Result<(Vector3<S>, usize), SurfaceError> {
        let mut q = p;
        let mut value = self.value(q)?;
        for it in 0..=MAX_PROJECTION_ITERATIONS {
            if value.abs() <= tol {
                return Ok((q, it));
            }
            if it == MAX_PROJECTION_ITERATIONS {
                break;
            }
            let g = self.gradient(q)?;
            q -= g * (value / g.norm_squared());
            value = self.value(q)?;
        }
        Err(SurfaceError::ProjectionFailed {
            iterations: MAX_PROJECTION_ITERATIONS,
            residual: value.abs().to_f64_lossy(),
            tol: tol.to_f64_lossy(),
        })
    }

    pub fn check_box(&self, p: Vector3<S>) -> Result<(), SurfaceError> {
        match &self.bbox {
            Some(b) if !b.contains(p) => Err(SurfaceError::OutOfBox {
                x: p.x.to_f64_lossy(),
                y: p.y.to_f64_lossy(),
                z: p.z.to_f64_lossy(),
            }),
            _ => Ok(()),
        }
    }
}
