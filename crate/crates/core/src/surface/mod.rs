//! Parametric and implicit surfaces built from expressions.
//!
//! Orientation is fixed: the parametric normal is `X_u × X_v` and the
//! implicit normal is `+∇f`. Flipping either negates κ_g, κ_n and σ_v.

mod implicit;
mod parametric;
pub mod presets;

pub use implicit::{BoundingBox, ImplicitSurface, ImplicitJet};
pub use parametric::{Domain, FirstFundamentalForm, ParametricSurface, Patch};

use thiserror::Error;

use crate::expr::ExprError;
use crate::scalar::Scalar;
use crate::vector::Vector3;

/// Default regularity threshold for `‖X_u × X_v‖` and `‖∇f‖`.
pub const DEFAULT_EPS_REG: f64 = 1e-10;

/// Newton projection iteration cap.
pub const MAX_PROJECTION_ITERATIONS: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("surface is not regular at {at}: normal magnitude {magnitude:e} is below {threshold:e}")]
    Irregular { at: String, magnitude: f64, threshold: f64 },
    #[error("parameter ({u}, {v}) lies outside the surface domain")]
    OutOfDomain { u: f64, v: f64 },
    #[error("point ({x}, {y}, {z}) lies outside the bounding box")]
    OutOfBox { x: f64, y: f64, z: f64 },
    #[error("Newton projection did not reach |f| <= {tol:e} within {iterations} iterations (|f| = {residual:e})")]
    ProjectionFailed { iterations: usize, residual: f64, tol: f64 },
    #[error("point is off the surface: residual {residual:e} exceeds {tol:e}")]
    OffSurface { residual: f64, tol: f64 },
    #[error("unknown surface preset \"{0}\"")]
    UnknownPreset(String),
    #[error("invalid surface definition: {0}")]
    Invalid(String),
}

/// Either kind of surface. Immutable once built.
#[derive(Clone, Debug)]
pub enum Surface<S> {
    Parametric(ParametricSurface<S>),
    Implicit(ImplicitSurface<S>),
}

impl<S: Scalar> Surface<S> {
    pub fn as_parametric(&self) -> Option<&ParametricSurface<S>> {
        match self {
            Surface::Parametric(p) => Some(p),
            Surface::Implicit(_) => None,
        }
    }

    pub fn as_implicit(&self) -> Option<&ImplicitSurface<S>> {
        match self {
            Surface::Implicit(i) => Some(i),
            Surface::Parametric(_) => None,
        }
    }

    pub fn is_parametric(&self) -> bool {
        matches!(self, Surface::Parametric(_))
    }
}

impl<S: Scalar> From<ParametricSurface<S>> for Surface<S> {
    fn from(p: ParametricSurface<S>) -> Self {
        Surface::Parametric(p)
    }
}

impl<S: Scalar> From<ImplicitSurface<S>> for Surface<S> {
    fn from(i: ImplicitSurface<S>) -> Self {
        Surface::Implicit(i)
    }
}

pub(crate) fn fmt_point<S: Scalar>(p: Vector3<S>) -> String {
    format!("({}, {}, {})", p.x, p.y, p.z)
}
