//! Darboux and Frenet apparatus of sampled curves.
//!
//! All derivatives along a curve are three-point finite differences in the
//! arc-length parameter (O(h²)); end samples use one-sided stencils.

mod darboux;
pub mod diff;
mod frenet;
mod samples;

pub use darboux::{
    darboux_fields, darboux_frames, darboux_scalars, sigma_v, sigma_v_default, sigma_v_samples, surface_normals,
    DarbouxFields, DarbouxFrame, DarbouxScalars,
};
pub use frenet::{
    curvature_torsion, frenet_apparatus, frenet_from_tangents, phi_consistency, slant_sigma, slant_sigma_samples,
    unwrap_angles, CurvatureTorsion, FrenetApparatus, PhiResidual,
};
pub use samples::CurveSamples;

use thiserror::Error;

use crate::scalar::Scalar;
use crate::surface::SurfaceError;
use crate::vector::Vector3;

/// Threshold below which κ, or `√(κ_g² + τ_g²)`, counts as zero.
pub const DEFAULT_EPS_DEG: f64 = 1e-8;

/// Default distance tolerance for "the curve lies on the surface".
pub const DEFAULT_ON_SURFACE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("sample arrays have different lengths")]
    LengthMismatch,
    #[error("arc length is not strictly increasing at sample {index}")]
    NonIncreasing { index: usize },
    #[error("non-finite sample value")]
    NonFinite,
    #[error("curve is not unit speed: chord/arc residual {residual:e} exceeds {tol:e}")]
    NotUnitSpeed { residual: f64, tol: f64 },
    #[error("sample {index} is off the surface: distance {residual:e} exceeds {tol:e}")]
    OffSurface { index: usize, residual: f64, tol: f64 },
    #[error("degenerate {what} at sample {index}")]
    Degenerate { index: usize, what: &'static str },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Samples excluded at each end when judging a series: σ_v of a curve known
/// only by positions sits three differencing levels deep, and the one-sided
/// end stencils contaminate one more sample per level.
pub const EDGE_SAMPLES: usize = 3;

/// Index range of interior samples (empty for short series).
pub fn interior_range(n: usize) -> std::ops::Range<usize> {
    interior_range_with(n, EDGE_SAMPLES)
}

/// Interior range for a series `edge` differencing levels deep.
pub fn interior_range_with(n: usize, edge: usize) -> std::ops::Range<usize> {
    if n > 2 * edge {
        edge..n - edge
    } else {
        0..0
    }
}

/// Residuals of the Darboux derivative equations at every sample:
/// `‖T′ − (κ_g V + κ_n U)‖`, `‖V′ − (−κ_g T + τ_g U)‖`, `‖U′ − (−κ_n T − τ_g V)‖`.
pub fn reconstruction_residuals<S: Scalar>(
    s: &[S],
    frames: &[DarbouxFrame<S>],
    scalars: &[DarbouxScalars<S>],
) -> Vec<[S; 3]> {
    let pick = |f: fn(&DarbouxFrame<S>) -> Vector3<S>| frames.iter().map(f).collect::<Vec<_>>();
    let dt = diff::derivative(s, &pick(|f| f.t));
    let dv = diff::derivative(s, &pick(|f| f.v));
    let du = diff::derivative(s, &pick(|f| f.u));
    frames
        .iter()
        .zip(scalars)
        .enumerate()
        .map(|(i, (f, c))| {
            [
                (dt[i] - (f.v * c.kappa_g + f.u * c.kappa_n)).norm(),
                (dv[i] - (f.t * (-c.kappa_g) + f.u * c.tau_g)).norm(),
                (du[i] - (f.t * (-c.kappa_n) - f.v * c.tau_g)).norm(),
            ]
        })
        .collect()
}
