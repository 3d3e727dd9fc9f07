//! Constant-angle curves traced as solutions of first-order initial value
//! problems on parametric and implicit surfaces.
//!
//! Three families are supported: relatively normal-slant helices
//! (`⟨V, d⟩ = cos θ`), general helices (`⟨T, d⟩ = cos θ`) and isophotes
//! (`⟨U, d⟩ = cos θ`). The first two integrate an explicit unit-speed
//! velocity field with classical RK4; isophotes follow a level curve.

mod integrate;
mod isophote;
mod rhs;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::{CurveSamples, DarbouxFrame, FrameError};
use crate::scalar::Scalar;
use crate::surface::SurfaceError;
use crate::vector::Vector3;

pub use integrate::{trace, trace_parameter_line};
pub use isophote::{isophote_function, trace_isophote};
pub use rhs::{
    implicit_rns_solve, parametric_rns_solve, rhs_general_helix, rhs_implicit_rns, rhs_parametric_rns,
    ImplicitRnsSolve, ParametricRnsSolve, Velocity, ACCEPT_TOL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    #[serde(alias = "rns")]
    RelativelyNormalSlant,
    GeneralHelix,
    Isophote,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::RelativelyNormalSlant => "relatively-normal-slant",
            Family::GeneralHelix => "general-helix",
            Family::Isophote => "isophote",
        })
    }
}

/// Which of the (generically two) curves through the start point to follow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialPoint<S> {
    /// `(u₀, v₀)` on a parametric surface.
    Parameter(S, S),
    /// A point on (or within projection reach of) the surface.
    Point(Vector3<S>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<S> {
    /// Max `|f|` accepted after projecting an implicit step.
    pub surface_residual: S,
    /// Max constraint residual at the start of an isophote.
    pub constraint_residual: S,
    /// Discriminants below this count as negative.
    pub discriminant_floor: S,
    /// Relative threshold for `A` and `Ω` (axis against the tangent plane).
    pub degeneracy: S,
}

impl<S: Scalar> Default for Tolerances<S> {
    fn default() -> Self {
        Self {
            surface_residual: S::lit(1e-8),
            constraint_residual: S::lit(1e-8),
            discriminant_floor: S::zero(),
            degeneracy: S::lit(crate::frame::DEFAULT_EPS_DEG),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceConfig<S> {
    pub axis: Vector3<S>,
    pub theta: S,
    pub family: Family,
    pub branch: Branch,
    pub initial: InitialPoint<S>,
    pub step: S,
    pub s_max: S,
    pub tolerances: Tolerances<S>,
}

impl<S: Scalar> TraceConfig<S> {
    /// Normalizes `axis`; default tolerances.
    pub fn new(
        axis: Vector3<S>,
        theta: S,
        family: Family,
        branch: Branch,
        initial: InitialPoint<S>,
        step: S,
        s_max: S,
    ) -> Result<Self, TraceError> {
        let axis = axis
            .try_normalize()
            .ok_or_else(|| TraceError::InvalidConfig("axis must be a nonzero vector".into()))?;
        let cfg = Self { axis, theta, family, branch, initial, step, s_max, tolerances: Tolerances::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances<S>) -> Self {
        self.tolerances = tolerances;
        self
    }

    pub fn validate(&self) -> Result<(), TraceError> {
        let bad = |m: String| Err(TraceError::InvalidConfig(m));
        if !self.axis.is_finite() || (self.axis.norm() - S::one()).abs() > S::lit(1e-12) {
            return bad(format!("axis must be a unit vector (norm {})", self.axis.norm()));
        }
        if !(self.theta > S::zero() && self.theta < S::PI()) {
            return bad(format!("theta must lie in (0, π), got {}", self.theta));
        }
        if !(self.step > S::zero() && self.step <= self.s_max) || !self.s_max.is_finite() {
            return bad(format!("need 0 < step ≤ s_max, got step {} and s_max {}", self.step, self.s_max));
        }
        let t = &self.tolerances;
        if !(t.surface_residual > S::zero() && t.constraint_residual > S::zero() && t.degeneracy > S::zero())
            || !t.discriminant_floor.is_finite()
        {
            return bad("tolerances must be positive".into());
        }
        Ok(())
    }

    /// Number of RK4 steps: `⌊s_max / h⌋`.
    pub fn step_count(&self) -> usize {
        let n = (self.s_max / self.step + S::lit(1e-9)).floor();
        n.to_usize().unwrap_or(usize::MAX)
    }
}

/// The discriminant whose sign decides existence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Discriminant {
    Delta,
    DeltaStar,
    /// `q₂² − 4q₁q₃`.
    Quadratic,
    /// `1 − cos²θ / ‖d_tan‖²` of the general-helix solve.
    Tangent,
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Discriminant::Delta => "Δ",
            Discriminant::DeltaStar => "Δ*",
            Discriminant::Quadratic => "q₂²−4q₁q₃",
            Discriminant::Tangent => "1−cos²θ/‖d_tan‖²",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("invalid trace configuration: {0}")]
    InvalidConfig(String),
    #[error("discriminant {which} negative ({value:e}): no curve with this axis and angle passes through the point")]
    Inadmissible { which: Discriminant, value: f64 },
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("no admissible velocity: {0}")]
    NoSolution(String),
    #[error("initial point is not on the level set: |⟨U,d⟩ − cos θ| = {residual:e} exceeds {tol:e}")]
    NotOnLevelSet { residual: f64, tol: f64 },
    #[error("level set is singular at the initial point: |∇g| = {gradient:e}")]
    LevelSetSingular { gradient: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

impl TraceError {
    /// How a trace ends when this error occurs after the first sample.
    pub fn termination(&self) -> Termination {
        match self {
            TraceError::Inadmissible { .. } => Termination::DiscriminantNegative,
            TraceError::Surface(SurfaceError::Irregular { .. }) => Termination::RegularityLost,
            TraceError::Surface(SurfaceError::OutOfDomain { .. } | SurfaceError::OutOfBox { .. }) => {
                Termination::DomainExit
            }
            _ => Termination::StepFailure,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    BudgetExhausted,
    DiscriminantNegative,
    RegularityLost,
    DomainExit,
    StepFailure,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::BudgetExhausted => "budget-exhausted",
            Termination::DiscriminantNegative => "discriminant-negative",
            Termination::RegularityLost => "regularity-lost",
            Termination::DomainExit => "domain-exit",
            Termination::StepFailure => "step-failure",
        })
    }
}

/// Per-sample residuals, aligned with the curve samples.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TraceDiagnostics<S> {
    /// Signed constraint residual of the family (`⟨V,d⟩`, `⟨T,d⟩` or `⟨U,d⟩` minus `cos θ`).
    pub constraint: Vec<S>,
    /// `|f|` on implicit surfaces, zero on parametric ones.
    pub surface: Vec<S>,
    /// `chord / Δs − 1` to the previous sample; zero at the first.
    pub unit_speed: Vec<S>,
}

fn max_abs<S: Scalar>(xs: &[S]) -> S {
    xs.iter().fold(S::zero(), |m, x| m.max(x.abs()))
}

impl<S: Scalar> TraceDiagnostics<S> {
    pub fn constraint_max(&self) -> S {
        max_abs(&self.constraint)
    }

    pub fn surface_max(&self) -> S {
        max_abs(&self.surface)
    }

    pub fn unit_speed_max(&self) -> S {
        max_abs(&self.unit_speed)
    }
}

#[derive(Clone, Debug)]
pub struct TraceResult<S> {
    pub family: Family,
    pub curve: CurveSamples<S>,
    /// Darboux frames built from the exact velocity at each sample.
    pub frames: Vec<DarbouxFrame<S>>,
    pub termination: Termination,
    /// Error message when the trace stopped early.
    pub detail: Option<String>,
    pub diagnostics: TraceDiagnostics<S>,
}

impl<S: Scalar> TraceResult<S> {
    pub fn len(&self) -> usize {
        self.curve.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curve.is_empty()
    }

    pub fn completed(&self) -> bool {
        self.termination == Termination::BudgetExhausted
    }
}

/// Signed residual of the family's constraint for one frame.
pub fn constraint_residual<S: Scalar>(family: Family, frame: &DarbouxFrame<S>, d: Vector3<S>, cos_theta: S) -> S {
    let w = match family {
        Family::RelativelyNormalSlant => frame.v,
        Family::GeneralHelix => frame.t,
        Family::Isophote => frame.u,
    };
    w.dot(d) - cos_theta
}

/// Accumulates samples and diagnostics while tracing.
struct Recorder<S> {
    family: Family,
    axis: Vector3<S>,
    cos_theta: S,
    s: Vec<S>,
    points: Vec<Vector3<S>>,
    uv: Vec<(S, S)>,
    frames: Vec<DarbouxFrame<S>>,
    diagnostics: TraceDiagnostics<S>,
}

impl<S: Scalar> Recorder<S> {
    fn new(cfg: &TraceConfig<S>) -> Self {
        Self {
            family: cfg.family,
            axis: cfg.axis,
            cos_theta: cfg.theta.cos(),
            s: Vec::new(),
            points: Vec::new(),
            uv: Vec::new(),
            frames: Vec::new(),
            diagnostics: TraceDiagnostics::default(),
        }
    }

    fn push(
        &mut self,
        s: S,
        point: Vector3<S>,
        uv: Option<(S, S)>,
        tangent: Vector3<S>,
        normal: Vector3<S>,
        surface_residual: S,
    ) -> Result<(), TraceError> {
        let frame = DarbouxFrame::from_tangent_normal(tangent, normal)
            .ok_or_else(|| TraceError::NoSolution("tangent parallel to the normal".into()))?;
        let speed = match (self.s.last(), self.points.last()) {
            (Some(&s0), Some(&p0)) => (point - p0).norm() / (s - s0) - S::one(),
            _ => S::zero(),
        };
        self.diagnostics.constraint.push(constraint_residual(self.family, &frame, self.axis, self.cos_theta));
        self.diagnostics.surface.push(surface_residual);
        self.diagnostics.unit_speed.push(speed);
        self.s.push(s);
        self.points.push(point);
        if let Some(uv) = uv {
            self.uv.push(uv);
        }
        self.frames.push(frame);
        Ok(())
    }

    fn finish(self, termination: Termination, detail: Option<String>) -> Result<TraceResult<S>, TraceError> {
        let uv = if self.uv.len() == self.s.len() { Some(self.uv) } else { None };
        let curve = CurveSamples::new(self.s, self.points, uv)?;
        Ok(TraceResult {
            family: self.family,
            curve,
            frames: self.frames,
            termination,
            detail,
            diagnostics: self.diagnostics,
        })
    }
}
