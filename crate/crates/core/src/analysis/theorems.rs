//! Numerical forms of the characterizations: each check builds the derived
//! curve the statement talks about, measures it, and reports residuals
//! alongside a yes/no verdict.

use crate::frame::{curvature_torsion, diff::derivative, frenet_from_tangents, CurvatureTorsion, CurveSamples};
use crate::scalar::Scalar;
use crate::vector::Vector3;

use super::axis::recover_axis;
use super::fit::{fit_circle, fit_plane};
use super::integral::integral_curve;
use super::{relative_spread, AnalysisError, AnalyzedCurve, Flag, Gates, Spread};

fn max_over<S: Scalar>(values: impl Iterator<Item = S>) -> S {
    values.fold(S::zero(), |m, x| if x.is_nan() { S::infinity() } else { m.max(x.abs()) })
}

/// Constancy of Frenet curvature and torsion of a curve given by its
/// velocity. Torsion is only required where curvature is nonzero; a curve
/// with vanishing curvature throughout is a (degenerate) straight helix.
fn helix_flags<S: Scalar>(kt: &[CurvatureTorsion<S>], range: std::ops::Range<usize>, gates: &Gates<S>) -> (S, S, Flag<S>) {
    let kappa: Vec<Option<S>> = kt.iter().map(|x| Some(x.kappa)).collect();
    let tau: Vec<Option<S>> = kt.iter().map(|x| x.tau).collect();
    let k_spread = relative_spread(&kappa, range.clone());
    let straight = kt[range.clone()].iter().all(|x| x.kappa <= gates.eps_deg.sqrt());
    let t_spread = if straight { S::zero() } else { relative_spread(&tau, range) };
    let residual = k_spread.max(t_spread);
    (k_spread, t_spread, Flag::at_most(residual, gates.constant))
}

pub struct Thm61Report<S> {
    /// The V-direction curve `γ̄` with `γ̄′ = V`.
    pub direction_curve: CurveSamples<S>,
    pub kappa_bar: Vec<S>,
    pub tau_bar: Vec<Option<S>>,
    /// `max |κ̄ − √(κ_g² + τ_g²)|` over the interior.
    pub kappa_residual: S,
    /// `max |τ̄ − (−κ_n + (κ_g τ_g′ − κ_g′ τ_g)/(κ_g² + τ_g²))|`.
    pub tau_residual: S,
    /// `max |τ̄/κ̄ − σ_v|`.
    pub ratio_residual: S,
    /// `γ̄` is a general helix (`τ̄/κ̄` constant).
    pub direction_general_helix: Flag<S>,
    /// `γ` is a relatively normal-slant helix (`σ_v` constant).
    pub rns_helix: Flag<S>,
    pub agree: bool,
}

/// The V-direction curve is a general helix exactly when the curve is a
/// relatively normal-slant helix; also checks the curvature relations.
pub fn verify_thm_6_1<S: Scalar>(c: &AnalyzedCurve<S>, gates: &Gates<S>) -> Result<Thm61Report<S>, AnalysisError> {
    let v: Vec<Vector3<S>> = c.frames.iter().map(|f| f.v).collect();
    let direction_curve = integral_curve(c.s(), &v)?;
    let kt = curvature_torsion(c.s(), &v, gates.eps_deg)?;
    let (dkg, dtg) = c.scalar_derivatives();
    let range = c.interior(gates);
    let mut kappa_residual = S::zero();
    let mut tau_residual = S::zero();
    let mut ratio_residual = S::zero();
    let mut ratio = Vec::with_capacity(c.len());
    for (i, x) in kt.iter().enumerate() {
        ratio.push(x.tau.and_then(|t| if x.kappa > gates.eps_deg { Some(t / x.kappa) } else { None }));
        if !range.contains(&i) {
            continue;
        }
        let sc = &c.scalars[i];
        let k2 = sc.indicatrix_speed_squared();
        kappa_residual = max_over([kappa_residual, x.kappa - k2.sqrt()].into_iter());
        if k2 > gates.eps_deg {
            let predicted = -sc.kappa_n + (sc.kappa_g * dtg[i] - dkg[i] * sc.tau_g) / k2;
            let t = x.tau.map_or(S::infinity(), |t| t - predicted);
            tau_residual = max_over([tau_residual, t].into_iter());
        }
        let r = match (ratio[i], c.sigma_v[i]) {
            (Some(r), Some(sv)) => r - sv,
            _ => S::infinity(),
        };
        ratio_residual = max_over([ratio_residual, r].into_iter());
    }
    let direction_general_helix = Flag::at_most(relative_spread(&ratio, range.clone()), gates.constant);
    let rns_helix = Flag::at_most(c.sigma_v_spread(gates), gates.constant);
    Ok(Thm61Report {
        direction_curve,
        kappa_bar: kt.iter().map(|x| x.kappa).collect(),
        tau_bar: kt.iter().map(|x| x.tau).collect(),
        kappa_residual,
        tau_residual,
        ratio_residual,
        agree: direction_general_helix.holds == rns_helix.holds,
        direction_general_helix,
        rns_helix,
    })
}

pub struct Thm62Report<S> {
    /// Integral curve `β` of `D_r = τ_g T + κ_g U`.
    pub integral_curve: CurveSamples<S>,
    pub kappa_beta: Vec<S>,
    pub tau_beta: Vec<Option<S>>,
    /// `max |κ_β − |σ_v||`.
    pub kappa_residual: S,
    /// `max |τ_β − 1|` where `κ_β` is nonzero.
    pub tau_residual: S,
    pub kappa_spread: S,
    pub tau_spread: S,
    pub circular_helix: Flag<S>,
    pub rns_helix: Flag<S>,
    pub agree: bool,
}

/// The integral curve of the rectifying Darboux field has curvature
/// `|σ_v|` and unit torsion, hence is a circular helix exactly when `σ_v`
/// is constant.
pub fn verify_thm_6_2<S: Scalar>(c: &AnalyzedCurve<S>, gates: &Gates<S>) -> Result<Thm62Report<S>, AnalysisError> {
    let range = c.interior(gates);
    let d_r = c.field(|f, sc| f.t * sc.tau_g + f.u * sc.kappa_g);
    if let Some(i) = range.clone().find(|&i| d_r[i].norm() <= gates.eps_deg) {
        return Err(AnalysisError::Degenerate(format!("D_r vanishes at sample {i}")));
    }
    let beta = integral_curve(c.s(), &d_r)?;
    let kt = curvature_torsion(c.s(), &d_r, gates.eps_deg)?;
    let mut kappa_residual = S::zero();
    let mut tau_residual = S::zero();
    for i in range.clone() {
        let sv = c.sigma_v[i].map_or(S::infinity(), |x| x.abs());
        kappa_residual = max_over([kappa_residual, kt[i].kappa - sv].into_iter());
        if kt[i].kappa > gates.eps_deg.sqrt() {
            let t = kt[i].tau.map_or(S::infinity(), |t| t - S::one());
            tau_residual = max_over([tau_residual, t].into_iter());
        }
    }
    let (kappa_spread, tau_spread, circular_helix) = helix_flags(&kt, range, gates);
    let rns_helix = Flag::at_most(c.sigma_v_spread(gates), gates.constant);
    Ok(Thm62Report {
        integral_curve: beta,
        kappa_beta: kt.iter().map(|x| x.kappa).collect(),
        tau_beta: kt.iter().map(|x| x.tau).collect(),
        kappa_residual,
        tau_residual,
        kappa_spread,
        tau_spread,
        agree: circular_helix.holds == rns_helix.holds,
        circular_helix,
        rns_helix,
    })
}

pub struct Thm63Report<S> {
    /// `⟨V, d̂⟩` constant for the recovered axis.
    pub rns_helix: Flag<S>,
    /// The rn-indicatrix lies on a circle.
    pub indicatrix_circle: Flag<S>,
    pub sigma_v_constant: Flag<S>,
    /// `⟨d̂, D_r/‖D_r‖⟩` constant.
    pub rectifying_angle: Flag<S>,
    /// The V-direction curve is a general helix.
    pub direction_general_helix: Flag<S>,
    /// The integral curve of `D_r` is a circular helix.
    pub rectifying_circular_helix: Flag<S>,
    /// `max |κ_v − √(1 + σ_v²)|` for the rn-indicatrix.
    pub indicatrix_curvature_residual: S,
    pub agreement: bool,
}

impl<S: Scalar> Thm63Report<S> {
    pub fn conditions(&self) -> [(&'static str, Flag<S>); 6] {
        [
            ("rns-helix", self.rns_helix),
            ("indicatrix-circle", self.indicatrix_circle),
            ("sigma-v-constant", self.sigma_v_constant),
            ("rectifying-angle", self.rectifying_angle),
            ("direction-curve-general-helix", self.direction_general_helix),
            ("rectifying-circular-helix", self.rectifying_circular_helix),
        ]
    }

    pub fn all_hold(&self) -> bool {
        self.conditions().iter().all(|(_, f)| f.holds)
    }

    pub fn none_hold(&self) -> bool {
        self.conditions().iter().all(|(_, f)| !f.holds)
    }
}

/// Curvature of the rn-indicatrix against `√(1 + σ_v²)`.
pub fn indicatrix_curvature_residual<S: Scalar>(c: &AnalyzedCurve<S>, gates: &Gates<S>) -> Result<S, AnalysisError> {
    let v: Vec<Vector3<S>> = c.frames.iter().map(|f| f.v).collect();
    let dv = derivative(c.s(), &v);
    let kt = curvature_torsion(c.s(), &dv, gates.eps_deg)?;
    Ok(max_over(c.interior(gates).map(|i| match c.sigma_v[i] {
        Some(sv) => kt[i].kappa - (S::one() + sv * sv).sqrt(),
        None => S::infinity(),
    })))
}

/// The six equivalent conditions for a relatively normal-slant helix,
/// each decided independently.
pub fn verify_thm_6_3<S: Scalar>(c: &AnalyzedCurve<S>, gates: &Gates<S>) -> Result<Thm63Report<S>, AnalysisError> {
    let range = c.interior(gates);
    let axis = recover_axis(c, gates).ok();
    let (rns_helix, rectifying_angle) = match axis {
        Some(a) => {
            let along = Spread::of(range.clone().map(|i| c.frames[i].v.dot(a.d_hat)));
            let rect = Spread::of(range.clone().map(|i| {
                let d_r = c.frames[i].t * c.scalars[i].tau_g + c.frames[i].u * c.scalars[i].kappa_g;
                d_r.normalize().dot(a.d_hat)
            }));
            let flag = |s: Option<Spread<S>>| s.map_or(Flag::undefined(), |s| Flag::at_most(s.max - s.min, gates.constant));
            (flag(along), flag(rect))
        }
        None => (Flag::undefined(), Flag::undefined()),
    };
    let vs: Vec<Vector3<S>> = range.clone().map(|i| c.frames[i].v).collect();
    let indicatrix_circle = fit_circle(&vs).map_or(Flag::undefined(), |f| Flag::at_most(f.residual(), gates.constant));
    let sigma_v_constant = Flag::at_most(c.sigma_v_spread(gates), gates.constant);
    let direction_general_helix = verify_thm_6_1(c, gates)?.direction_general_helix;
    let rectifying_circular_helix = verify_thm_6_2(c, gates).map_or(Flag::undefined(), |r| r.circular_helix);
    let indicatrix_curvature_residual = indicatrix_curvature_residual(c, gates)?;
    let flags = [
        rns_helix,
        indicatrix_circle,
        sigma_v_constant,
        rectifying_angle,
        direction_general_helix,
        rectifying_circular_helix,
    ];
    let agreement = flags.iter().all(|f| f.holds == flags[0].holds);
    Ok(Thm63Report {
        rns_helix,
        indicatrix_circle,
        sigma_v_constant,
        rectifying_angle,
        direction_general_helix,
        rectifying_circular_helix,
        indicatrix_curvature_residual,
        agreement,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Thm7Which {
    /// General helix ⇔ integral curve of `D_n` is a circular helix.
    NormalDarboux,
    /// Isophote ⇔ integral curve of `D_o` is a circular helix.
    OsculatingDarboux,
}

pub struct Thm7Report<S> {
    pub which: Thm7Which,
    pub integral_curve: CurveSamples<S>,
    pub kappa_spread: S,
    pub tau_spread: S,
    pub circular_helix: Flag<S>,
    /// Membership in the curve class, decided directly on the curve.
    pub member: Flag<S>,
    /// Axis used for the membership test, when one was fitted.
    pub axis: Option<Vector3<S>>,
    pub agree: bool,
}

/// Integrates `D_n` or `D_o`, judges whether the result is a circular
/// helix, and separately whether the curve is a general helix (`τ/κ`
/// constant) or an isophote (`⟨U, d⟩` constant for the best-fit axis).
pub fn verify_thm_7<S: Scalar>(c: &AnalyzedCurve<S>, which: Thm7Which, gates: &Gates<S>) -> Result<Thm7Report<S>, AnalysisError> {
    let range = c.interior(gates);
    let field = match which {
        Thm7Which::NormalDarboux => c.field(|f, sc| f.v * (-sc.kappa_n) + f.u * sc.kappa_g),
        Thm7Which::OsculatingDarboux => c.field(|f, sc| f.t * sc.tau_g - f.v * sc.kappa_n),
    };
    let integral = integral_curve(c.s(), &field)?;
    let vanishing = range.clone().any(|i| field[i].norm() <= gates.eps_deg);
    let (kappa_spread, tau_spread, circular_helix) = if vanishing {
        (S::infinity(), S::infinity(), Flag::undefined())
    } else {
        let kt = curvature_torsion(c.s(), &field, gates.eps_deg)?;
        helix_flags(&kt, range.clone(), gates)
    };
    let (member, axis) = match which {
        Thm7Which::NormalDarboux => {
            let frenet = frenet_from_tangents(c.s(), &c.tangents(), gates.eps_deg)?;
            let ratio: Vec<Option<S>> = frenet
                .iter()
                .map(|f| f.tau.and_then(|t| if f.kappa > gates.eps_deg { Some(t / f.kappa) } else { None }))
                .collect();
            let member = Flag::at_most(relative_spread(&ratio, range.clone()), gates.constant);
            let ts: Vec<Vector3<S>> = range.clone().map(|i| c.frames[i].t).collect();
            (member, fit_plane(&ts).map(|p| p.normal))
        }
        Thm7Which::OsculatingDarboux => {
            let us: Vec<Vector3<S>> = range.clone().map(|i| c.frames[i].u).collect();
            match fit_plane(&us) {
                Some(p) => {
                    let d = if p.centroid.dot(p.normal) < S::zero() { -p.normal } else { p.normal };
                    let sp = Spread::of(us.iter().map(|u| u.dot(d))).map_or(S::infinity(), |s| s.max - s.min);
                    (Flag::at_most(sp, gates.constant), Some(d))
                }
                None => (Flag::undefined(), None),
            }
        }
    };
    Ok(Thm7Report {
        which,
        integral_curve: integral,
        kappa_spread,
        tau_spread,
        agree: circular_helix.holds == member.holds,
        circular_helix,
        member,
        axis,
    })
}
