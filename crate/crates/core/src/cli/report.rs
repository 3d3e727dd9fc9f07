//! Diagnostics documents (JSON). Key order is sorted, non-finite numbers
//! are written as `null`, so identical runs give identical documents.

use serde_json::{json, Map, Value};

use crate::analysis::{
    classify, recover_axis, verify_thm_6_1, verify_thm_6_2, verify_thm_6_3, verify_thm_7, AnalysisError, AnalyzedCurve,
    Flag, Thm7Which,
};
use crate::frame::frenet_from_tangents;
use crate::surface::Surface;
use crate::tracer::{constraint_residual, Family};
use crate::vector::Vector3;

use super::config::VerifyBlock;

pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn vec3(v: Vector3<f64>) -> Value {
    Value::Array(v.to_array().into_iter().map(num).collect())
}

fn flag(f: Flag<f64>) -> Value {
    json!({ "holds": f.holds, "residual": num(f.residual) })
}

fn section(r: Result<Value, AnalysisError>) -> Value {
    r.unwrap_or_else(|e| json!({ "error": e.to_string() }))
}

/// What is known about a curve besides its samples.
#[derive(Clone, Debug, Default)]
pub struct CurveContext {
    pub name: Option<String>,
    pub branch: Option<String>,
    pub file: Option<String>,
    /// Family, axis and `cos θ` for the constraint residual.
    pub constraint: Option<(Family, Vector3<f64>, f64)>,
    pub termination: Option<String>,
    pub detail: Option<String>,
}

/// `|f|` on implicit surfaces, `‖X(u, v) − p‖` on parametric ones (zero
/// without a parameter path).
fn surface_residual_max(c: &AnalyzedCurve<f64>, surface: &Surface<f64>) -> f64 {
    let pts = c.curve.points();
    match surface {
        Surface::Implicit(imp) => pts.iter().fold(0.0, |m, &p| m.max(imp.value(p).map_or(f64::INFINITY, f64::abs))),
        Surface::Parametric(par) => match c.curve.uv() {
            Some(uv) => pts
                .iter()
                .zip(uv)
                .fold(0.0, |m, (&p, &(u, v))| m.max(par.point(u, v).map_or(f64::INFINITY, |q| (q - p).norm()))),
            None => 0.0,
        },
    }
}

fn unit_speed_residual_max(c: &AnalyzedCurve<f64>) -> f64 {
    let (s, p) = (c.s(), c.curve.points());
    (1..c.len()).fold(0.0, |m, i| m.max(((p[i] - p[i - 1]).norm() / (s[i] - s[i - 1]) - 1.0).abs()))
}

pub fn curve_report(c: &AnalyzedCurve<f64>, ctx: &CurveContext, surface: &Surface<f64>, verify: &VerifyBlock) -> Value {
    let gates = verify.gates();
    let range = c.interior(&gates);
    let mut m = Map::new();
    let opt = |x: &Option<String>| x.clone().map_or(Value::Null, Value::String);
    m.insert("name".into(), opt(&ctx.name));
    m.insert("branch".into(), opt(&ctx.branch));
    m.insert("file".into(), opt(&ctx.file));
    m.insert("termination".into(), opt(&ctx.termination));
    m.insert("detail".into(), opt(&ctx.detail));
    m.insert("samples".into(), json!(c.len()));
    m.insert("s_end".into(), num(c.s().last().copied().unwrap_or(0.0)));
    m.insert(
        "family".into(),
        ctx.constraint.map_or(Value::Null, |(f, _, _)| Value::String(f.to_string())),
    );
    let drift = ctx.constraint.map(|(family, d, cos)| {
        c.frames.iter().fold(0.0, |acc: f64, f| acc.max(constraint_residual(family, f, d, cos).abs()))
    });
    m.insert("constraint_drift_max".into(), drift.map_or(Value::Null, num));
    m.insert("surface_residual_max".into(), num(surface_residual_max(c, surface)));
    m.insert("unit_speed_residual_max".into(), num(unit_speed_residual_max(c)));
    let sv: Option<Vec<f64>> = c.sigma_v[range.clone()].iter().copied().collect();
    let mean = sv.filter(|v| !v.is_empty()).map(|v| v.iter().sum::<f64>() / v.len() as f64);
    m.insert("sigma_v_mean".into(), mean.map_or(Value::Null, num));
    m.insert("sigma_v_spread".into(), num(c.sigma_v_spread(&gates)));

    if verify.axis {
        m.insert(
            "axis".into(),
            section(recover_axis(c, &gates).map(|a| {
                json!({
                    "d_hat": vec3(a.d_hat),
                    "theta_hat": num(a.theta_hat),
                    "spread": num(a.spread),
                    "sigma_v_constant": a.sigma_v_constant,
                })
            })),
        );
    }
    if verify.thm6_1 {
        m.insert(
            "thm6_1".into(),
            section(verify_thm_6_1(c, &gates).map(|r| {
                json!({
                    "kappa_residual": num(r.kappa_residual),
                    "tau_residual": num(r.tau_residual),
                    "ratio_residual": num(r.ratio_residual),
                    "direction_general_helix": flag(r.direction_general_helix),
                    "rns_helix": flag(r.rns_helix),
                    "agree": r.agree,
                })
            })),
        );
    }
    if verify.thm6_2 {
        m.insert(
            "thm6_2".into(),
            section(verify_thm_6_2(c, &gates).map(|r| {
                json!({
                    "kappa_residual": num(r.kappa_residual),
                    "tau_residual": num(r.tau_residual),
                    "kappa_spread": num(r.kappa_spread),
                    "tau_spread": num(r.tau_spread),
                    "circular_helix": flag(r.circular_helix),
                    "rns_helix": flag(r.rns_helix),
                    "agree": r.agree,
                })
            })),
        );
    }
    if verify.thm6_3 {
        m.insert(
            "thm6_3".into(),
            section(verify_thm_6_3(c, &gates).map(|r| {
                let conditions: Map<String, Value> =
                    r.conditions().into_iter().map(|(k, f)| (k.to_string(), flag(f))).collect();
                json!({
                    "agreement": r.agreement,
                    "all_hold": r.all_hold(),
                    "conditions": conditions,
                    "indicatrix_curvature_residual": num(r.indicatrix_curvature_residual),
                })
            })),
        );
    }
    for (key, on, which) in [
        ("thm7_1", verify.thm7_1, Thm7Which::NormalDarboux),
        ("thm7_2", verify.thm7_2, Thm7Which::OsculatingDarboux),
    ] {
        if on {
            m.insert(
                key.into(),
                section(verify_thm_7(c, which, &gates).map(|r| {
                    json!({
                        "circular_helix": flag(r.circular_helix),
                        "member": flag(r.member),
                        "kappa_spread": num(r.kappa_spread),
                        "tau_spread": num(r.tau_spread),
                        "axis": r.axis.map_or(Value::Null, vec3),
                        "agree": r.agree,
                    })
                })),
            );
        }
    }
    if verify.classify {
        m.insert(
            "classify".into(),
            section(classify(c, &gates).and_then(|k| {
                let frenet = frenet_from_tangents(c.s(), &c.tangents(), gates.eps_deg)?;
                let degenerate = frenet[range.clone()].iter().filter(|f| f.n.is_none()).count();
                let checks: Vec<Value> = k
                    .cross_checks
                    .iter()
                    .map(|x| {
                        json!({
                            "name": x.name,
                            "applicable": x.applicable,
                            "ratio": x.ratio.map_or(Value::Null, num),
                            "spread": num(x.spread),
                            "consistent": x.consistent,
                        })
                    })
                    .collect();
                Ok(json!({
                    "labels": k.labels(),
                    "is_geodesic": k.geodesic.holds,
                    "is_asymptotic": k.asymptotic.holds,
                    "is_line_of_curvature": k.line_of_curvature.holds,
                    "is_rns_helix": k.rns_helix.holds,
                    "is_general_helix": k.general_helix.holds,
                    "is_slant_helix": k.slant_helix.holds,
                    "is_isophote": k.isophote.holds,
                    "residuals": {
                        "geodesic": num(k.geodesic.residual),
                        "asymptotic": num(k.asymptotic.residual),
                        "line_of_curvature": num(k.line_of_curvature.residual),
                        "rns_helix": num(k.rns_helix.residual),
                        "general_helix": num(k.general_helix.residual),
                        "slant_helix": num(k.slant_helix.residual),
                        "isophote": num(k.isophote.residual),
                    },
                    "isophote_axis": k.isophote_axis.map_or(Value::Null, vec3),
                    "frenet_degenerate_samples": degenerate,
                    "cross_checks": checks,
                    "consistent": k.consistent(),
                }))
            })),
        );
    }
    Value::Object(m)
}
