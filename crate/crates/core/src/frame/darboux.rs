use super::diff::derivative;
use super::{CurveSamples, FrameError, DEFAULT_EPS_DEG};
use crate::scalar::Scalar;
use crate::surface::Surface;
use crate::vector::Vector3;

/// Darboux frame `{T, V, U}` with `V = U × T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DarbouxFrame<S> {
    pub t: Vector3<S>,
    pub v: Vector3<S>,
    pub u: Vector3<S>,
}

impl<S: Scalar> DarbouxFrame<S> {
    /// Builds the frame from an approximate tangent and the unit surface
    /// normal; the tangent is projected into the tangent plane first.
    pub fn from_tangent_normal(tangent: Vector3<S>, normal: Vector3<S>) -> Option<Self> {
        let t = (tangent - normal * tangent.dot(normal)).try_normalize()?;
        Some(Self { t, v: normal.cross(t), u: normal })
    }

    /// Largest deviation from an orthonormal frame with `V = U × T`.
    pub fn orthonormality_defect(&self) -> S {
        let one = S::one();
        [
            self.t.dot(self.v).abs(),
            self.t.dot(self.u).abs(),
            self.v.dot(self.u).abs(),
            (self.t.norm() - one).abs(),
            (self.v.norm() - one).abs(),
            (self.u.norm() - one).abs(),
            (self.u.cross(self.t) - self.v).max_abs(),
        ]
        .into_iter()
        .fold(S::zero(), S::max)
    }

    /// Same curve seen from the opposite surface orientation.
    pub fn flipped(&self) -> Self {
        Self { t: self.t, v: -self.v, u: -self.u }
    }
}

/// Geodesic curvature, normal curvature and geodesic torsion at one sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DarbouxScalars<S> {
    pub kappa_g: S,
    pub kappa_n: S,
    pub tau_g: S,
    /// Set at the end samples, where one-sided differences were used.
    pub one_sided: bool,
}

impl<S: Scalar> DarbouxScalars<S> {
    /// `κ_g² + τ_g²`, the squared speed of the relatively normal-indicatrix.
    pub fn indicatrix_speed_squared(&self) -> S {
        self.kappa_g * self.kappa_g + self.tau_g * self.tau_g
    }
}

/// Normal, rectifying and osculating Darboux vector fields at one sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DarbouxFields<S> {
    pub d_n: Vector3<S>,
    pub d_r: Vector3<S>,
    pub d_o: Vector3<S>,
}

/// Attaches Darboux frames to a curve lying on `surface`.
///
/// `T` is the renormalized central difference of position (one-sided at the
/// ends), `U` comes from the surface, `V = U × T`. Points farther than
/// `on_surface_tol` from the surface are rejected. Parametric surfaces use
/// the curve's `(u, v)` path when present and invert the points otherwise.
pub fn darboux_frames<S: Scalar>(
    curve: &CurveSamples<S>,
    surface: &Surface<S>,
    on_surface_tol: S,
) -> Result<Vec<DarbouxFrame<S>>, FrameError> {
    if curve.len() < 3 {
        return Err(FrameError::TooFewSamples { needed: 3, got: curve.len() });
    }
    let tangents = derivative(curve.s(), curve.points());
    let normals = surface_normals(curve, surface, on_surface_tol)?;
    tangents
        .iter()
        .zip(&normals)
        .enumerate()
        .map(|(i, (t, n))| {
            DarbouxFrame::from_tangent_normal(*t, *n).ok_or(FrameError::Degenerate { index: i, what: "tangent" })
        })
        .collect()
}

/// Unit surface normals at every sample, with the on-surface check.
pub fn surface_normals<S: Scalar>(
    curve: &CurveSamples<S>,
    surface: &Surface<S>,
    on_surface_tol: S,
) -> Result<Vec<Vector3<S>>, FrameError> {
    let off = |index: usize, residual: S| FrameError::OffSurface {
        index,
        residual: residual.to_f64_lossy(),
        tol: on_surface_tol.to_f64_lossy(),
    };
    match surface {
        Surface::Implicit(imp) => curve
            .points()
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let j = imp.jet(p)?;
                let g = j.gradient.norm();
                let dist = if g > S::zero() { j.value.abs() / g } else { j.value.abs() };
                if !(dist <= on_surface_tol) {
                    return Err(off(i, dist));
                }
                Ok(imp.normal(p)?)
            })
            .collect(),
        Surface::Parametric(par) => {
            let mut out = Vec::with_capacity(curve.len());
            let mut guess = None;
            for (i, &p) in curve.points().iter().enumerate() {
                let (u, v) = match curve.uv() {
                    Some(uv) => uv[i],
                    None => par.invert(p, guess)?,
                };
                guess = Some((u, v));
                let patch = par.patch(u, v)?;
                let dist = (patch.position - p).norm();
                if !(dist <= on_surface_tol) {
                    return Err(off(i, dist));
                }
                out.push(patch.normal());
            }
            Ok(out)
        }
    }
}

/// `κ_g = ⟨T′, V⟩`, `κ_n = ⟨T′, U⟩`, `τ_g = ⟨V′, U⟩` by finite differences.
pub fn darboux_scalars<S: Scalar>(s: &[S], frames: &[DarbouxFrame<S>]) -> Result<Vec<DarbouxScalars<S>>, FrameError> {
    let n = s.len();
    if frames.len() != n {
        return Err(FrameError::LengthMismatch);
    }
    if n < 5 {
        return Err(FrameError::TooFewSamples { needed: 5, got: n });
    }
    let t: Vec<_> = frames.iter().map(|f| f.t).collect();
    let v: Vec<_> = frames.iter().map(|f| f.v).collect();
    let dt = derivative(s, &t);
    let dv = derivative(s, &v);
    Ok((0..n)
        .map(|i| DarbouxScalars {
            kappa_g: dt[i].dot(frames[i].v),
            kappa_n: dt[i].dot(frames[i].u),
            tau_g: dv[i].dot(frames[i].u),
            one_sided: i == 0 || i == n - 1,
        })
        .collect())
}

/// σ_v at each sample, `None` where `κ_g² + τ_g² < ε_deg²`.
pub fn sigma_v_samples<S: Scalar>(s: &[S], scalars: &[DarbouxScalars<S>], eps_deg: S) -> Vec<Option<S>> {
    if s.len() < 3 || scalars.len() != s.len() {
        return vec![None; scalars.len()];
    }
    let kg: Vec<S> = scalars.iter().map(|c| c.kappa_g).collect();
    let tg: Vec<S> = scalars.iter().map(|c| c.tau_g).collect();
    let dkg = derivative(s, &kg);
    let dtg = derivative(s, &tg);
    scalars
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k2 = c.indicatrix_speed_squared();
            if k2 < eps_deg * eps_deg {
                return None;
            }
            let num = dtg[i] * c.kappa_g - dkg[i] * c.tau_g - c.kappa_n * k2;
            Some(num / (k2 * k2.sqrt()))
        })
        .collect()
}

/// σ_v = (τ_g′κ_g − κ_g′τ_g − κ_n(κ_g² + τ_g²)) / (κ_g² + τ_g²)^{3/2}.
pub fn sigma_v<S: Scalar>(s: &[S], scalars: &[DarbouxScalars<S>], eps_deg: S) -> Result<Vec<S>, FrameError> {
    if scalars.len() != s.len() {
        return Err(FrameError::LengthMismatch);
    }
    if s.len() < 3 {
        return Err(FrameError::TooFewSamples { needed: 3, got: s.len() });
    }
    sigma_v_samples(s, scalars, eps_deg)
        .into_iter()
        .enumerate()
        .map(|(index, x)| x.ok_or(FrameError::Degenerate { index, what: "(kappa_g, tau_g)" }))
        .collect()
}

/// σ_v with the default degeneracy threshold.
pub fn sigma_v_default<S: Scalar>(s: &[S], scalars: &[DarbouxScalars<S>]) -> Result<Vec<S>, FrameError> {
    sigma_v(s, scalars, S::lit(DEFAULT_EPS_DEG))
}

/// `D_n = −κ_n V + κ_g U`, `D_r = τ_g T + κ_g U`, `D_o = τ_g T − κ_n V`.
pub fn darboux_fields<S: Scalar>(frames: &[DarbouxFrame<S>], scalars: &[DarbouxScalars<S>]) -> Vec<DarbouxFields<S>> {
    frames
        .iter()
        .zip(scalars)
        .map(|(f, c)| DarbouxFields {
            d_n: f.v * (-c.kappa_n) + f.u * c.kappa_g,
            d_r: f.t * c.tau_g + f.u * c.kappa_g,
            d_o: f.t * c.tau_g - f.v * c.kappa_n,
        })
        .collect()
}
