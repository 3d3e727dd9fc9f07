use super::diff::{derivative, derivative_partial};
use super::{CurveSamples, DarbouxScalars, FrameError};
use crate::scalar::Scalar;
use crate::vector::Vector3;

/// Frenet apparatus at one sample. `N`, `B` and `τ` are `None` where κ is
/// below the degeneracy threshold (or a neighbouring sample's is, for τ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrenetApparatus<S> {
    pub t: Vector3<S>,
    pub n: Option<Vector3<S>>,
    pub b: Option<Vector3<S>>,
    pub kappa: S,
    pub tau: Option<S>,
}

/// Curvature and (signed) torsion of an arbitrarily parametrized curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureTorsion<S> {
    pub kappa: S,
    pub tau: Option<S>,
}

/// Frenet apparatus of an arc-length sampled curve; `T` is the renormalized
/// central difference of position.
pub fn frenet_apparatus<S: Scalar>(curve: &CurveSamples<S>, eps_deg: S) -> Result<Vec<FrenetApparatus<S>>, FrameError> {
    if curve.len() < 5 {
        return Err(FrameError::TooFewSamples { needed: 5, got: curve.len() });
    }
    let tangents = derivative(curve.s(), curve.points())
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.try_normalize().ok_or(FrameError::Degenerate { index: i, what: "tangent" }))
        .collect::<Result<Vec<_>, _>>()?;
    frenet_from_tangents(curve.s(), &tangents, eps_deg)
}

/// Frenet apparatus from unit tangents: `κ = ‖T′‖`, `N = T′/κ`,
/// `B = T × N`, `τ = −⟨B′, N⟩`.
pub fn frenet_from_tangents<S: Scalar>(
    s: &[S],
    tangents: &[Vector3<S>],
    eps_deg: S,
) -> Result<Vec<FrenetApparatus<S>>, FrameError> {
    if tangents.len() != s.len() {
        return Err(FrameError::LengthMismatch);
    }
    if s.len() < 5 {
        return Err(FrameError::TooFewSamples { needed: 5, got: s.len() });
    }
    let dt = derivative(s, tangents);
    let normals: Vec<Option<Vector3<S>>> = dt
        .iter()
        .map(|d| {
            let k = d.norm();
            (k > eps_deg).then(|| *d / k)
        })
        .collect();
    let binormals: Vec<Option<Vector3<S>>> =
        tangents.iter().zip(&normals).map(|(t, n)| n.map(|n| t.cross(n))).collect();
    let db = derivative_partial(s, &binormals);
    Ok((0..s.len())
        .map(|i| FrenetApparatus {
            t: tangents[i],
            n: normals[i],
            b: binormals[i],
            kappa: dt[i].norm(),
            tau: match (db[i], normals[i]) {
                (Some(db), Some(n)) => Some(-db.dot(n)),
                _ => None,
            },
        })
        .collect())
}

/// `κ = ‖β′ × β″‖ / ‖β′‖³`, `τ = ⟨β′ × β″, β‴⟩ / ‖β′ × β″‖²` for a curve
/// given by its velocity samples `β′`. Torsion is `None` where
/// `‖β′ × β″‖ ≤ eps_deg · ‖β′‖³`.
pub fn curvature_torsion<S: Scalar>(
    s: &[S],
    velocity: &[Vector3<S>],
    eps_deg: S,
) -> Result<Vec<CurvatureTorsion<S>>, FrameError> {
    if velocity.len() != s.len() {
        return Err(FrameError::LengthMismatch);
    }
    if s.len() < 5 {
        return Err(FrameError::TooFewSamples { needed: 5, got: s.len() });
    }
    let acc = derivative(s, velocity);
    let jerk = derivative(s, &acc);
    velocity
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let speed = v.norm();
            if !(speed > S::zero()) {
                return Err(FrameError::Degenerate { index: i, what: "velocity" });
            }
            let c = v.cross(acc[i]);
            let cn = c.norm();
            let speed3 = speed * speed * speed;
            Ok(CurvatureTorsion {
                kappa: cn / speed3,
                tau: (cn > eps_deg * speed3).then(|| c.dot(jerk[i]) / (cn * cn)),
            })
        })
        .collect()
}

/// Slant-helix invariant `σ = κ²/(κ² + τ²)^{3/2} · (τ/κ)′`.
pub fn slant_sigma<S: Scalar>(s: &[S], frenet: &[FrenetApparatus<S>], eps_deg: S) -> Result<Vec<S>, FrameError> {
    slant_sigma_samples(s, frenet, eps_deg)
        .into_iter()
        .enumerate()
        .map(|(index, x)| x.ok_or(FrameError::Degenerate { index, what: "kappa" }))
        .collect()
}

pub fn slant_sigma_samples<S: Scalar>(s: &[S], frenet: &[FrenetApparatus<S>], eps_deg: S) -> Vec<Option<S>> {
    let ratio: Vec<Option<S>> = frenet
        .iter()
        .map(|f| match f.tau {
            Some(t) if f.kappa > eps_deg => Some(t / f.kappa),
            _ => None,
        })
        .collect();
    let dratio = derivative_partial(s, &ratio);
    frenet
        .iter()
        .zip(dratio)
        .map(|(f, d)| {
            let tau = f.tau?;
            let k2 = f.kappa * f.kappa;
            let q = k2 + tau * tau;
            Some(k2 / (q * q.sqrt()) * d?)
        })
        .collect()
}

/// Angle φ between `N` and `U` and the residuals of
/// `κ_g = κ sin φ`, `κ_n = κ cos φ`, `τ_g = τ + φ′`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiResidual<S> {
    pub phi: S,
    pub geodesic: S,
    pub normal: S,
    pub torsion: Option<S>,
}

/// φ = atan2(κ_g, κ_n), unwrapped into a continuous branch along the curve.
pub fn phi_consistency<S: Scalar>(
    s: &[S],
    scalars: &[DarbouxScalars<S>],
    frenet: &[FrenetApparatus<S>],
    eps_deg: S,
) -> Result<Vec<PhiResidual<S>>, FrameError> {
    let n = s.len();
    if scalars.len() != n || frenet.len() != n {
        return Err(FrameError::LengthMismatch);
    }
    if let Some(index) = frenet.iter().position(|f| !(f.kappa > eps_deg)) {
        return Err(FrameError::Degenerate { index, what: "kappa" });
    }
    let raw: Vec<S> = scalars.iter().map(|c| c.kappa_g.atan2(c.kappa_n)).collect();
    let phi = unwrap_angles(&raw);
    let dphi = derivative(s, &phi);
    Ok((0..n)
        .map(|i| {
            let (c, f) = (&scalars[i], &frenet[i]);
            PhiResidual {
                phi: phi[i],
                geodesic: (c.kappa_g - f.kappa * phi[i].sin()).abs(),
                normal: (c.kappa_n - f.kappa * phi[i].cos()).abs(),
                torsion: f.tau.map(|tau| (c.tau_g - tau - dphi[i]).abs()),
            }
        })
        .collect())
}

/// Removes 2π jumps between consecutive angles.
pub fn unwrap_angles<S: Scalar>(raw: &[S]) -> Vec<S> {
    let two_pi = S::lit(2.0) * S::PI();
    let mut out = Vec::with_capacity(raw.len());
    let mut offset = S::zero();
    for (i, &a) in raw.iter().enumerate() {
        if i > 0 {
            let prev = raw[i - 1];
            let mut d = a - prev;
            while d > S::PI() {
                offset -= two_pi;
                d -= two_pi;
            }
            while d < -S::PI() {
                offset += two_pi;
                d += two_pi;
            }
        }
        out.push(a + offset);
    }
    out
}
