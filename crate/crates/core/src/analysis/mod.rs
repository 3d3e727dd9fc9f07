//! Derived curves, axis recovery, and numerical checks of the
//! characterizations of constant-angle surface curves.
//!
//! Everything here works on sampled curves with attached Darboux frames
//! and uses finite differences, so "constant" and "zero" are decided by
//! explicit [`Gates`].

mod axis;
mod classify;
mod fit;
mod integral;
#[cfg(test)]
mod tests;
mod theorems;

use std::ops::Range;

use thiserror::Error;

use crate::frame::{
    darboux_frames, darboux_scalars, diff::derivative, interior_range_with, sigma_v_samples, CurveSamples, DarbouxFrame,
    DarbouxScalars, FrameError, DEFAULT_EPS_DEG, DEFAULT_ON_SURFACE_TOL,
};
use crate::scalar::Scalar;
use crate::surface::Surface;
use crate::tracer::TraceResult;
use crate::vector::Vector3;

pub use axis::{recover_axis, rn_indicatrix, AxisEstimate};
pub use classify::{classify, CrossCheck, CurveClassification};
pub use fit::{fit_circle, fit_plane, symmetric_eigen, CircleFit, PlaneFit};
pub use integral::integral_curve;
pub use theorems::{
    indicatrix_curvature_residual, verify_thm_6_1, verify_thm_6_2, verify_thm_6_3, verify_thm_7, Thm61Report,
    Thm62Report, Thm63Report, Thm7Report, Thm7Which,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("degenerate curve: {0}")]
    Degenerate(String),
}

/// Decision thresholds for the finite-difference checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gates<S> {
    /// A series is constant when `(max − min) / max(1, |mean|)` is at most this.
    pub constant: S,
    /// A series is zero when `max |·|` is at most `zero · (1 + curvature scale)`.
    pub zero: S,
    /// Samples dropped at each end before judging a series.
    pub edge: usize,
    /// Below this, `κ_g² + τ_g²`, `κ` and similar denominators count as zero.
    pub eps_deg: S,
}

impl<S: Scalar> Default for Gates<S> {
    fn default() -> Self {
        Self { constant: S::lit(1e-3), zero: S::lit(1e-6), edge: 4, eps_deg: S::lit(DEFAULT_EPS_DEG) }
    }
}

/// A yes/no verdict together with the residual it was decided on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Flag<S> {
    pub holds: bool,
    pub residual: S,
}

impl<S: Scalar> Flag<S> {
    pub fn at_most(residual: S, gate: S) -> Self {
        Self { holds: residual <= gate, residual }
    }

    /// A check that could not be evaluated.
    pub fn undefined() -> Self {
        Self { holds: false, residual: S::infinity() }
    }
}

/// Summary of a series over the judged samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spread<S> {
    pub mean: S,
    pub min: S,
    pub max: S,
    pub count: usize,
}

impl<S: Scalar> Spread<S> {
    pub fn of<I: IntoIterator<Item = S>>(values: I) -> Option<Self> {
        let mut count = 0usize;
        let (mut sum, mut min, mut max) = (S::zero(), S::infinity(), S::neg_infinity());
        for x in values {
            if !x.is_finite() {
                return None;
            }
            count += 1;
            sum += x;
            min = min.min(x);
            max = max.max(x);
        }
        if count == 0 {
            return None;
        }
        Some(Self { mean: sum / S::from_count(count), min, max, count })
    }

    /// `(max − min) / max(1, |mean|)`.
    pub fn relative(&self) -> S {
        (self.max - self.min) / S::one().max(self.mean.abs())
    }

    pub fn max_abs(&self) -> S {
        self.max.abs().max(self.min.abs())
    }
}

/// Relative spread of a partially defined series over `range`; infinite
/// when any sample there is undefined.
pub fn relative_spread<S: Scalar>(values: &[Option<S>], range: Range<usize>) -> S {
    let picked: Option<Vec<S>> = values[range].iter().copied().collect();
    picked.and_then(Spread::of).map_or(S::infinity(), |sp| sp.relative())
}

/// A sampled surface curve with its Darboux apparatus.
#[derive(Clone, Debug)]
pub struct AnalyzedCurve<S> {
    pub curve: CurveSamples<S>,
    pub frames: Vec<DarbouxFrame<S>>,
    pub scalars: Vec<DarbouxScalars<S>>,
    /// `None` where `κ_g² + τ_g²` vanishes.
    pub sigma_v: Vec<Option<S>>,
}

impl<S: Scalar> AnalyzedCurve<S> {
    pub fn new(curve: CurveSamples<S>, frames: Vec<DarbouxFrame<S>>) -> Result<Self, AnalysisError> {
        if frames.len() != curve.len() {
            return Err(FrameError::LengthMismatch.into());
        }
        let scalars = darboux_scalars(curve.s(), &frames)?;
        let sigma_v = sigma_v_samples(curve.s(), &scalars, S::lit(DEFAULT_EPS_DEG));
        Ok(Self { curve, frames, scalars, sigma_v })
    }

    /// Frames from the surface normal and the differentiated positions.
    pub fn on_surface(curve: CurveSamples<S>, surface: &Surface<S>) -> Result<Self, AnalysisError> {
        let frames = darboux_frames(&curve, surface, S::lit(DEFAULT_ON_SURFACE_TOL))?;
        Self::new(curve, frames)
    }

    pub fn from_trace(trace: &TraceResult<S>) -> Result<Self, AnalysisError> {
        Self::new(trace.curve.clone(), trace.frames.clone())
    }

    pub fn len(&self) -> usize {
        self.curve.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curve.is_empty()
    }

    pub fn s(&self) -> &[S] {
        self.curve.s()
    }

    pub fn interior(&self, gates: &Gates<S>) -> Range<usize> {
        interior_range_with(self.len(), gates.edge)
    }

    pub fn field<F: Fn(&DarbouxFrame<S>, &DarbouxScalars<S>) -> Vector3<S>>(&self, f: F) -> Vec<Vector3<S>> {
        self.frames.iter().zip(&self.scalars).map(|(fr, sc)| f(fr, sc)).collect()
    }

    pub fn tangents(&self) -> Vec<Vector3<S>> {
        self.frames.iter().map(|f| f.t).collect()
    }

    /// `max √(κ_g² + κ_n²)` over the interior: the scale of the zero gate.
    pub fn curvature_scale(&self, gates: &Gates<S>) -> S {
        self.scalars[self.interior(gates)]
            .iter()
            .fold(S::zero(), |m, c| m.max(c.kappa_g.hypot(c.kappa_n)))
    }

    pub fn zero_gate(&self, gates: &Gates<S>) -> S {
        gates.zero * (S::one() + self.curvature_scale(gates))
    }

    /// `(κ_g′, τ_g′)` per sample.
    pub fn scalar_derivatives(&self) -> (Vec<S>, Vec<S>) {
        let kg: Vec<S> = self.scalars.iter().map(|c| c.kappa_g).collect();
        let tg: Vec<S> = self.scalars.iter().map(|c| c.tau_g).collect();
        (derivative(self.s(), &kg), derivative(self.s(), &tg))
    }

    /// Relative spread of `σ_v` over the interior.
    pub fn sigma_v_spread(&self, gates: &Gates<S>) -> S {
        relative_spread(&self.sigma_v, self.interior(gates))
    }
}
