//! Isophotes as level curves of `g(u, v) = ⟨U(u, v), d⟩ − cos θ`.

use crate::scalar::Scalar;
use crate::surface::{ParametricSurface, Patch};
use crate::vector::Vector3;

use super::{Branch, InitialPoint, Recorder, Termination, TraceConfig, TraceError, TraceResult};

const CORRECTOR_ITERATIONS: usize = 6;

/// `(g, g_u, g_v)` from the second derivatives of the patch.
fn level<S: Scalar>(patch: &Patch<S>, d: Vector3<S>, c: S) -> (S, S, S) {
    let n = patch.normal_raw();
    let len = n.norm();
    let u = n / len;
    let nu = patch.xuu.cross(patch.xv) + patch.xu.cross(patch.xuv);
    let nv = patch.xuv.cross(patch.xv) + patch.xu.cross(patch.xvv);
    let du = (nu - u * u.dot(nu)) / len;
    let dv = (nv - u * u.dot(nv)) / len;
    (u.dot(d) - c, du.dot(d), dv.dot(d))
}

/// `g(u, v)` and its parameter gradient.
pub fn isophote_function<S: Scalar>(
    surface: &ParametricSurface<S>,
    u: S,
    v: S,
    d: Vector3<S>,
    cos_theta: S,
) -> Result<(S, (S, S)), TraceError> {
    let (g, gu, gv) = level(&surface.patch(u, v)?, d, cos_theta);
    Ok((g, (gu, gv)))
}

/// Gradient of `g` with respect to the induced metric, as a parameter
/// velocity, and its squared length.
fn metric_gradient<S: Scalar>(patch: &Patch<S>, gu: S, gv: S) -> ((S, S), S) {
    let ff = patch.first_form();
    let det = ff.determinant();
    let a = (ff.g * gu - ff.f * gv) / det;
    let b = (ff.e * gv - ff.f * gu) / det;
    ((a, b), a * gu + b * gv)
}

struct Level<'a, S> {
    surface: &'a ParametricSurface<S>,
    d: Vector3<S>,
    c: S,
}

impl<S: Scalar> Level<'_, S> {
    /// Unit-speed level-curve direction, oriented along `previous`.
    fn direction(&self, u: S, v: S, previous: Vector3<S>) -> Result<((S, S), Vector3<S>), TraceError> {
        let patch = self.surface.patch(u, v)?;
        let (_, gu, gv) = level(&patch, self.d, self.c);
        let (mut a, mut b) = (-gv, gu);
        let speed = patch.first_form().quadratic(a, b).sqrt();
        if !(speed > S::zero()) {
            return Err(TraceError::LevelSetSingular { gradient: 0.0 });
        }
        a /= speed;
        b /= speed;
        let mut t = patch.push_forward(a, b);
        if t.dot(previous) < S::zero() {
            a = -a;
            b = -b;
            t = -t;
        }
        Ok(((a, b), t))
    }

    /// Newton along the metric gradient back onto `g = 0`.
    fn correct(&self, mut u: S, mut v: S) -> Result<(S, S, Patch<S>), TraceError> {
        let tiny = S::epsilon() * S::lit(16.0);
        for _ in 0..CORRECTOR_ITERATIONS {
            let patch = self.surface.patch(u, v)?;
            let (g, gu, gv) = level(&patch, self.d, self.c);
            if g.abs() <= tiny {
                return Ok((u, v, patch));
            }
            let ((a, b), m) = metric_gradient(&patch, gu, gv);
            if !(m > S::zero()) {
                return Err(TraceError::LevelSetSingular { gradient: 0.0 });
            }
            u -= g * a / m;
            v -= g * b / m;
        }
        let patch = self.surface.patch(u, v)?;
        Ok((u, v, patch))
    }
}

/// Follows the isophote through the initial point: an RK4 predictor on the
/// unit-speed level-curve field, then a Newton corrector onto `g = 0`.
///
/// The plus branch starts along `d × U`.
pub fn trace_isophote<S: Scalar>(surface: &ParametricSurface<S>, cfg: &TraceConfig<S>) -> Result<TraceResult<S>, TraceError> {
    cfg.validate()?;
    let c = cfg.theta.cos();
    let d = cfg.axis;
    let (u0, v0) = match cfg.initial {
        InitialPoint::Parameter(u, v) => (u, v),
        InitialPoint::Point(p) => surface.invert(p, None)?,
    };
    let patch = surface.patch(u0, v0)?;
    let (g, gu, gv) = level(&patch, d, c);
    if !(g.abs() <= cfg.tolerances.constraint_residual) {
        return Err(TraceError::NotOnLevelSet {
            residual: g.abs().to_f64_lossy(),
            tol: cfg.tolerances.constraint_residual.to_f64_lossy(),
        });
    }
    let (_, m) = metric_gradient(&patch, gu, gv);
    if !(m.sqrt() > cfg.tolerances.degeneracy) {
        return Err(TraceError::LevelSetSingular { gradient: m.sqrt().to_f64_lossy() });
    }

    let lv = Level { surface, d, c };
    let (mut u, mut v, patch) = lv.correct(u0, v0)?;
    let reference = d.cross(patch.normal());
    let reference = match cfg.branch {
        Branch::Plus => reference,
        Branch::Minus => -reference,
    };
    let (_, mut t) = lv.direction(u, v, reference)?;

    let mut rec = Recorder::new(cfg);
    rec.push(S::zero(), patch.position, Some((u, v)), t, patch.normal(), S::zero())?;
    let h = cfg.step;
    let half = h / S::lit(2.0);
    for k in 1..=cfg.step_count() {
        let next = (|| {
            let (k1, t1) = lv.direction(u, v, t)?;
            let (k2, t2) = lv.direction(u + k1.0 * half, v + k1.1 * half, t1)?;
            let (k3, t3) = lv.direction(u + k2.0 * half, v + k2.1 * half, t2)?;
            let (k4, _) = lv.direction(u + k3.0 * h, v + k3.1 * h, t3)?;
            let w = h / S::lit(6.0);
            let two = S::lit(2.0);
            let up = u + (k1.0 + two * k2.0 + two * k3.0 + k4.0) * w;
            let vp = v + (k1.1 + two * k2.1 + two * k3.1 + k4.1) * w;
            let (un, vn, patch) = lv.correct(up, vp)?;
            let (_, tn) = lv.direction(un, vn, t1)?;
            Ok::<_, TraceError>((un, vn, patch, tn))
        })();
        match next {
            Ok((un, vn, patch, tn)) => {
                u = un;
                v = vn;
                t = tn;
                rec.push(S::from_count(k) * h, patch.position, Some((u, v)), t, patch.normal(), S::zero())?;
            }
            Err(e) => return rec.finish(e.termination(), Some(e.to_string())),
        }
    }
    rec.finish(Termination::BudgetExhausted, None)
}
