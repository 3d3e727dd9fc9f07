use crate::frame::CurveSamples;
use crate::scalar::Scalar;
use crate::vector::Vector3;

use super::{AnalysisError, AnalyzedCurve, Gates, Spread};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisEstimate<S> {
    pub d_hat: Vector3<S>,
    /// In `(0, π/2]` after sign normalization.
    pub theta_hat: S,
    /// Largest angle between a per-sample axis and `d_hat`.
    pub spread: S,
    /// Relative spread of `σ_v` over the samples used.
    pub sigma_v_spread: S,
    /// Whether `σ_v` passed the constancy gate; the estimate is only
    /// meaningful when it did.
    pub sigma_v_constant: bool,
    pub samples: usize,
}

/// Per-sample axis of a relatively normal-slant helix:
/// `d = sin θ (τ_g T + κ_g U)/√(κ_g² + τ_g²) + cos θ V` with `cot θ = σ_v`.
fn axis_at<S: Scalar>(c: &AnalyzedCurve<S>, i: usize, sigma: S) -> (Vector3<S>, S) {
    let f = &c.frames[i];
    let sc = &c.scalars[i];
    let theta = S::one().atan2(sigma);
    let k = sc.indicatrix_speed_squared().sqrt();
    let d = (f.t * sc.tau_g + f.u * sc.kappa_g) * (theta.sin() / k) + f.v * theta.cos();
    (d, theta)
}

/// Estimates the fixed axis and angle of a relatively normal-slant helix.
///
/// The other sign of the integration constant yields `(−d, π − θ)`, the
/// same axis; the result is normalized to `θ ≤ π/2` (at exactly `π/2` the
/// lexicographically larger of `±d` is reported).
pub fn recover_axis<S: Scalar>(c: &AnalyzedCurve<S>, gates: &Gates<S>) -> Result<AxisEstimate<S>, AnalysisError> {
    let range = c.interior(gates);
    let mut axes = Vec::with_capacity(range.len());
    let mut sigmas = Vec::with_capacity(range.len());
    for i in range.clone() {
        let Some(sigma) = c.sigma_v[i] else {
            return Err(AnalysisError::Degenerate(format!("κ_g² + τ_g² vanishes at sample {i}")));
        };
        let (d, _) = axis_at(c, i, sigma);
        axes.push(d);
        sigmas.push(sigma);
    }
    let stats = Spread::of(sigmas.iter().copied())
        .ok_or_else(|| AnalysisError::TooFewSamples { needed: 2 * gates.edge + 1, got: c.len() })?;
    let mean = axes.iter().copied().sum::<Vector3<S>>() / S::from_count(axes.len());
    let mut d_hat = mean
        .try_normalize()
        .ok_or_else(|| AnalysisError::Degenerate("per-sample axes cancel".into()))?;
    let spread = axes.iter().fold(S::zero(), |m, d| m.max(d.angle_to(d_hat)));
    let mut theta_hat = S::one().atan2(stats.mean);
    let half_pi = S::FRAC_PI_2();
    if theta_hat > half_pi {
        d_hat = -d_hat;
        theta_hat = S::PI() - theta_hat;
    } else if theta_hat == half_pi && lexicographically_less(d_hat, -d_hat) {
        d_hat = -d_hat;
    }
    let sigma_v_spread = stats.relative();
    Ok(AxisEstimate {
        d_hat,
        theta_hat,
        spread,
        sigma_v_spread,
        sigma_v_constant: sigma_v_spread <= gates.constant,
        samples: axes.len(),
    })
}

fn lexicographically_less<S: Scalar>(a: Vector3<S>, b: Vector3<S>) -> bool {
    for i in 0..3 {
        if a[i] != b[i] {
            return a[i] < b[i];
        }
    }
    false
}

/// The rn-indicatrix `s ↦ V(s)` on the unit sphere (not unit speed).
pub fn rn_indicatrix<S: Scalar>(c: &AnalyzedCurve<S>) -> Result<CurveSamples<S>, AnalysisError> {
    Ok(CurveSamples::new(c.s().to_vec(), c.frames.iter().map(|f| f.v).collect(), None)?)
}
