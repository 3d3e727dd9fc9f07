use crate::frame::{frenet_from_tangents, slant_sigma_samples};
use crate::scalar::Scalar;
use crate::vector::Vector3;

use super::fit::fit_plane;
use super::{relative_spread, AnalysisError, AnalyzedCurve, Flag, Gates, Spread};

/// A consistency check that only applies when its hypothesis holds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossCheck<S> {
    pub name: &'static str,
    /// The hypothesis (geodesic, asymptotic, line of curvature) holds.
    pub applicable: bool,
    /// Mean of the ratio the check is about, when defined.
    pub ratio: Option<S>,
    pub spread: S,
    /// Both sides of the equivalence gave the same verdict; vacuously true
    /// when not applicable.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveClassification<S> {
    pub geodesic: Flag<S>,
    pub asymptotic: Flag<S>,
    pub line_of_curvature: Flag<S>,
    pub rns_helix: Flag<S>,
    pub general_helix: Flag<S>,
    pub slant_helix: Flag<S>,
    pub isophote: Flag<S>,
    /// Axis of the isophote plane fit, oriented so `⟨U, d⟩ ≥ 0` on average.
    pub isophote_axis: Option<Vector3<S>>,
    pub cross_checks: Vec<CrossCheck<S>>,
}

impl<S: Scalar> CurveClassification<S> {
    pub fn labels(&self) -> Vec<&'static str> {
        [
            ("geodesic", self.geodesic),
            ("asymptotic", self.asymptotic),
            ("line-of-curvature", self.line_of_curvature),
            ("rns-helix", self.rns_helix),
            ("general-helix", self.general_helix),
            ("slant-helix", self.slant_helix),
            ("isophote", self.isophote),
        ]
        .into_iter()
        .filter_map(|(n, f)| f.holds.then_some(n))
        .collect()
    }

    pub fn consistent(&self) -> bool {
        self.cross_checks.iter().all(|c| c.consistent)
    }
}

fn ratio_stats<S: Scalar>(c: &AnalyzedCurve<S>, gates: &Gates<S>, f: impl Fn(usize) -> Option<S>) -> (Option<S>, S) {
    let values: Vec<Option<S>> = (0..c.len()).map(f).collect();
    let range = c.interior(gates);
    let mean = values[range.clone()]
        .iter()
        .copied()
        .collect::<Option<Vec<S>>>()
        .and_then(Spread::of)
        .map(|s| s.mean);
    (mean, relative_spread(&values, range))
}

fn ratio<S: Scalar>(num: S, den: S, eps: S) -> Option<S> {
    (den.abs() > eps).then(|| num / den)
}

/// Decides each curve class independently and cross-checks the special
/// cases where being a relatively normal-slant helix reduces to a simpler
/// ratio condition.
pub fn classify<S: Scalar>(c: &AnalyzedCurve<S>, gates: &Gates<S>) -> Result<CurveClassification<S>, AnalysisError> {
    let range = c.interior(gates);
    let zero = c.zero_gate(gates);
    let max_abs = |f: &dyn Fn(usize) -> S| range.clone().fold(S::zero(), |m, i| m.max(f(i).abs()));
    let geodesic = Flag::at_most(max_abs(&|i| c.scalars[i].kappa_g), zero);
    let asymptotic = Flag::at_most(max_abs(&|i| c.scalars[i].kappa_n), zero);
    let line_of_curvature = Flag::at_most(max_abs(&|i| c.scalars[i].tau_g), zero);
    let rns_helix = Flag::at_most(c.sigma_v_spread(gates), gates.constant);

    let frenet = frenet_from_tangents(c.s(), &c.tangents(), gates.eps_deg)?;
    let tk: Vec<Option<S>> = frenet.iter().map(|f| f.tau.and_then(|t| ratio(t, f.kappa, gates.eps_deg))).collect();
    let general_helix = Flag::at_most(relative_spread(&tk, range.clone()), gates.constant);
    let slant = slant_sigma_samples(c.s(), &frenet, gates.eps_deg);
    let slant_range = range.start + 1..range.end.saturating_sub(1).max(range.start + 1);
    let slant_helix = Flag::at_most(relative_spread(&slant, slant_range), gates.constant);

    let us: Vec<Vector3<S>> = range.clone().map(|i| c.frames[i].u).collect();
    let (isophote, isophote_axis) = match fit_plane(&us) {
        Some(p) => {
            let d = if p.centroid.dot(p.normal) < S::zero() { -p.normal } else { p.normal };
            let sp = Spread::of(us.iter().map(|u| u.dot(d))).map_or(S::infinity(), |s| s.max - s.min);
            (Flag::at_most(sp, gates.constant), Some(d))
        }
        None => (Flag::undefined(), None),
    };

    let (r32, s32) = ratio_stats(c, gates, |i| ratio(c.scalars[i].kappa_n, c.scalars[i].tau_g, gates.eps_deg));
    let (r33, s33) = ratio_stats(c, gates, |i| ratio(c.scalars[i].kappa_n, c.scalars[i].kappa_g, gates.eps_deg));
    let cross_checks = vec![
        CrossCheck {
            name: "geodesic: rns-helix iff kn/tg constant",
            applicable: geodesic.holds,
            ratio: r32,
            spread: s32,
            consistent: !geodesic.holds || rns_helix.holds == (s32 <= gates.constant),
        },
        CrossCheck {
            name: "asymptotic: rns-helix iff slant helix",
            applicable: asymptotic.holds,
            ratio: None,
            spread: slant_helix.residual,
            consistent: !asymptotic.holds || rns_helix.holds == slant_helix.holds,
        },
        CrossCheck {
            name: "line of curvature: rns-helix iff kn/kg constant",
            applicable: line_of_curvature.holds,
            ratio: r33,
            spread: s33,
            consistent: !line_of_curvature.holds || rns_helix.holds == (s33 <= gates.constant),
        },
    ];
    Ok(CurveClassification {
        geodesic,
        asymptotic,
        line_of_curvature,
        rns_helix,
        general_helix,
        slant_helix,
        isophote,
        isophote_axis,
        cross_checks,
    })
}
