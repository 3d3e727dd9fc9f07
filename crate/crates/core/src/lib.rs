//! Constant-angle curves on surfaces.
//!
//! Traces relatively normal-slant helices (the Darboux `V` field keeps a
//! fixed angle with an axis), general helices and isophotes on parametric
//! and implicit surfaces, and checks their characterizations numerically on
//! sampled curves.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`.

// `!(x <= tol)` is used deliberately so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod expr;
pub mod frame;
pub mod scalar;
pub mod surface;
pub mod tracer;
pub mod vector;

pub use scalar::Scalar;
pub use vector::Vector3;

pub type Vec3 = vector::Vector3<f64>;
pub type Expr = expr::Expr<f64>;
pub type Surface = surface::Surface<f64>;
pub type ParametricSurface = surface::ParametricSurface<f64>;
pub type ImplicitSurface = surface::ImplicitSurface<f64>;
pub type CurveSamples = frame::CurveSamples<f64>;
pub type DarbouxFrame = frame::DarbouxFrame<f64>;
pub type TraceConfig = tracer::TraceConfig<f64>;
pub type TraceResult = tracer::TraceResult<f64>;
pub type AnalyzedCurve = analysis::AnalyzedCurve<f64>;
pub type Gates = analysis::Gates<f64>;
