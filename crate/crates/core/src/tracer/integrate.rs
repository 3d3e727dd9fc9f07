use crate::frame::CurveSamples;
use crate::scalar::Scalar;
use crate::surface::{ImplicitSurface, ParametricSurface, Surface};
use crate::vector::Vector3;

use super::isophote::trace_isophote;
use super::rhs::{branch_reference, implicit_candidates, parametric_candidates, pick_branch, pick_continuous, Mode, Velocity};
use super::{Family, InitialPoint, Recorder, Termination, TraceConfig, TraceError, TraceResult};

/// Everything known at one state of the integration. For parametric
/// surfaces the state is `(u, v, 0)`, otherwise the point itself.
struct Eval<S> {
    rate: Vector3<S>,
    velocity: Velocity<S>,
    point: Vector3<S>,
    normal: Vector3<S>,
    surface_residual: S,
}

/// Candidate velocities, position, unit normal and level-set residual.
type Candidates<S> = (Vec<Velocity<S>>, Vector3<S>, Vector3<S>, S);

struct Field<'a, S> {
    surface: &'a Surface<S>,
    cfg: &'a TraceConfig<S>,
    cos_theta: S,
}

impl<S: Scalar> Field<'_, S> {
    fn candidates(&self, y: Vector3<S>, mode: Mode) -> Result<Candidates<S>, TraceError> {
        let tol = &self.cfg.tolerances;
        match self.surface {
            Surface::Parametric(ps) => {
                let patch = ps.patch(y.x, y.y)?;
                let c = parametric_candidates(&patch, self.cfg.family, self.cfg.axis, self.cos_theta, tol, mode)?;
                Ok((c, patch.position, patch.normal(), S::zero()))
            }
            Surface::Implicit(is) => {
                is.check_box(y)?;
                let jet = is.jet(y)?;
                let grad = is.gradient(y)?;
                let c = implicit_candidates(grad, self.cfg.family, self.cfg.axis, self.cos_theta, tol, mode)?;
                Ok((c, y, grad.normalize(), jet.value.abs()))
            }
        }
    }

    fn finish(&self, velocity: Velocity<S>, point: Vector3<S>, normal: Vector3<S>, residual: S) -> Eval<S> {
        let rate = match velocity.duv {
            Some((du, dv)) => Vector3::new(du, dv, S::zero()),
            None => velocity.tangent,
        };
        Eval { rate, velocity, point, normal, surface_residual: residual }
    }

    fn at_start(&self, y: Vector3<S>) -> Result<Eval<S>, TraceError> {
        let (cands, point, normal, res) = self.candidates(y, Mode::Strict)?;
        let reference = branch_reference(self.cfg.family, self.cfg.axis, normal);
        Ok(self.finish(pick_branch(&cands, self.cfg.branch, reference), point, normal, res))
    }

    fn follow(&self, y: Vector3<S>, previous: Vector3<S>) -> Result<Eval<S>, TraceError> {
        let (cands, point, normal, res) = self.candidates(y, Mode::Lenient)?;
        Ok(self.finish(pick_continuous(&cands, previous), point, normal, res))
    }

    /// One classical RK4 step, then projection back onto an implicit surface.
    fn step(&self, y: Vector3<S>, k1: &Eval<S>, h: S) -> Result<(Vector3<S>, Eval<S>), TraceError> {
        let half = h / S::lit(2.0);
        let k2 = self.follow(y + k1.rate * half, k1.velocity.tangent)?;
        let k3 = self.follow(y + k2.rate * half, k2.velocity.tangent)?;
        let k4 = self.follow(y + k3.rate * h, k3.velocity.tangent)?;
        let mut y1 = y + (k1.rate + k2.rate * S::lit(2.0) + k3.rate * S::lit(2.0) + k4.rate) * (h / S::lit(6.0));
        if let Surface::Implicit(is) = self.surface {
            y1 = project(is, y1, self.cfg)?;
        }
        let e = self.follow(y1, k1.velocity.tangent)?;
        Ok((y1, e))
    }
}

fn projection_tol<S: Scalar>(cfg: &TraceConfig<S>) -> S {
    (cfg.tolerances.surface_residual * S::lit(1e-3)).max(S::lit(1e-14))
}

fn project<S: Scalar>(is: &ImplicitSurface<S>, p: Vector3<S>, cfg: &TraceConfig<S>) -> Result<Vector3<S>, TraceError> {
    match is.project(p, projection_tol(cfg)) {
        Ok((q, _)) => Ok(q),
        // Round-off may keep |f| just above a very tight target; accept
        // anything within the configured residual.
        Err(e) => {
            let mut q = p;
            for _ in 0..crate::surface::MAX_PROJECTION_ITERATIONS {
                let g = is.gradient(q)?;
                q -= g * (is.value(q)? / g.norm_squared());
            }
            if is.value(q)?.abs() <= cfg.tolerances.surface_residual {
                Ok(q)
            } else {
                Err(e.into())
            }
        }
    }
}

fn initial_state<S: Scalar>(surface: &Surface<S>, cfg: &TraceConfig<S>) -> Result<Vector3<S>, TraceError> {
    match (surface, cfg.initial) {
        (Surface::Parametric(_), InitialPoint::Parameter(u, v)) => Ok(Vector3::new(u, v, S::zero())),
        (Surface::Parametric(ps), InitialPoint::Point(p)) => {
            let (u, v) = ps.invert(p, None)?;
            let q = ps.point(u, v)?;
            let off = (q - p).norm();
            if off > S::lit(crate::frame::DEFAULT_ON_SURFACE_TOL) {
                return Err(crate::surface::SurfaceError::OffSurface {
                    residual: off.to_f64_lossy(),
                    tol: crate::frame::DEFAULT_ON_SURFACE_TOL,
                }
                .into());
            }
            Ok(Vector3::new(u, v, S::zero()))
        }
        (Surface::Implicit(is), InitialPoint::Point(p)) => {
            is.check_box(p)?;
            // A start point more than a hair off the surface is a user error.
            let distance = is.value(p)?.abs() / is.gradient(p)?.norm();
            if distance > S::lit(crate::frame::DEFAULT_ON_SURFACE_TOL) {
                return Err(crate::surface::SurfaceError::OffSurface {
                    residual: distance.to_f64_lossy(),
                    tol: crate::frame::DEFAULT_ON_SURFACE_TOL,
                }
                .into());
            }
            project(is, p, cfg)
        }
        (Surface::Implicit(_), InitialPoint::Parameter(..)) => {
            Err(TraceError::InvalidConfig("an implicit surface needs an (x, y, z) start point".into()))
        }
    }
}

/// Traces the configured family from the initial point with fixed step
/// `h` for `⌊s_max / h⌋` steps, stopping early (with a recorded reason)
/// when the velocity field ceases to exist.
///
/// Errors are reserved for problems at the initial point.
pub fn trace<S: Scalar>(surface: &Surface<S>, cfg: &TraceConfig<S>) -> Result<TraceResult<S>, TraceError> {
    cfg.validate()?;
    if cfg.family == Family::Isophote {
        return match surface {
            Surface::Parametric(ps) => trace_isophote(ps, cfg),
            Surface::Implicit(_) => Err(TraceError::Unsupported("isophotes are traced on parametric surfaces only".into())),
        };
    }
    let field = Field { surface, cfg, cos_theta: cfg.theta.cos() };
    let mut y = initial_state(surface, cfg)?;
    let mut current = field.at_start(y)?;
    let uv_of = |y: Vector3<S>| if surface.is_parametric() { Some((y.x, y.y)) } else { None };

    let mut rec = Recorder::new(cfg);
    rec.push(S::zero(), current.point, uv_of(y), current.velocity.tangent, current.normal, current.surface_residual)?;
    let n = cfg.step_count();
    for k in 1..=n {
        match field.step(y, &current, cfg.step) {
            Ok((y1, e)) => {
                let s = S::from_count(k) * cfg.step;
                rec.push(s, e.point, uv_of(y1), e.velocity.tangent, e.normal, e.surface_residual)?;
                y = y1;
                current = e;
            }
            Err(err) => return rec.finish(err.termination(), Some(err.to_string())),
        }
    }
    rec.finish(Termination::BudgetExhausted, None)
}

/// Unit-speed RK4 trace of the straight parameter line through `(u₀, v₀)`
/// in direction `(a, b)`. Used for curves that are not constant-angle.
pub fn trace_parameter_line<S: Scalar>(
    surface: &ParametricSurface<S>,
    start: (S, S),
    direction: (S, S),
    step: S,
    s_max: S,
) -> Result<CurveSamples<S>, TraceError> {
    let (a, b) = direction;
    let rate = |u: S, v: S| -> Result<(S, S), TraceError> {
        let speed = surface.first_form(u, v)?.quadratic(a, b).sqrt();
        Ok((a / speed, b / speed))
    };
    let n = (s_max / step + S::lit(1e-9)).floor().to_usize().unwrap_or(0);
    let (mut u, mut v) = start;
    let mut s = vec![S::zero()];
    let mut points = vec![surface.point(u, v)?];
    let mut uv = vec![(u, v)];
    let half = step / S::lit(2.0);
    for k in 1..=n {
        let next = (|| {
            let k1 = rate(u, v)?;
            let k2 = rate(u + k1.0 * half, v + k1.1 * half)?;
            let k3 = rate(u + k2.0 * half, v + k2.1 * half)?;
            let k4 = rate(u + k3.0 * step, v + k3.1 * step)?;
            let w = step / S::lit(6.0);
            let two = S::lit(2.0);
            let un = u + (k1.0 + two * k2.0 + two * k3.0 + k4.0) * w;
            let vn = v + (k1.1 + two * k2.1 + two * k3.1 + k4.1) * w;
            Ok::<_, TraceError>((un, vn, surface.point(un, vn)?))
        })();
        match next {
            Ok((un, vn, p)) => {
                u = un;
                v = vn;
                s.push(S::from_count(k) * step);
                points.push(p);
                uv.push((u, v));
            }
            Err(_) if s.len() > 1 => break,
            Err(e) => return Err(e),
        }
    }
    Ok(CurveSamples::new(s, points, Some(uv))?)
}
