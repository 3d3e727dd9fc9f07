use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_3};

use super::*;
use crate::surface::{presets, Surface};
use crate::tracer::{trace, trace_parameter_line, Branch, Family, InitialPoint, TraceConfig};

fn gates() -> Gates<f64> {
    Gates::default()
}

fn on(surface: Surface<f64>, length: f64, n: usize, f: impl Fn(f64) -> Vector3<f64>) -> AnalyzedCurve<f64> {
    let curve = CurveSamples::from_fn(0.0, length, n, f).unwrap();
    AnalyzedCurve::on_surface(curve, &surface).unwrap()
}

/// Unit-speed geodesic helix at 45° on the unit cylinder.
fn cylinder_helix() -> AnalyzedCurve<f64> {
    on(presets::cylinder().into(), 3.0, 3000, |s| {
        let u = s * FRAC_1_SQRT_2;
        Vector3::new(u.cos(), u.sin(), u)
    })
}

/// Latitude with `tan φ = 3/4` on the unit sphere.
fn sphere_latitude() -> AnalyzedCurve<f64> {
    on(presets::sphere().into(), 3.0, 3000, |s| {
        let u = s / 0.8;
        Vector3::new(0.8 * u.cos(), 0.8 * u.sin(), 0.6)
    })
}

fn plane_circle() -> AnalyzedCurve<f64> {
    on(presets::plane().into(), 3.0, 3000, |s| Vector3::new(s.cos(), s.sin(), 0.0))
}

/// The parameter diagonal `v = u` of the paraboloid: none of the classes.
fn paraboloid_diagonal() -> AnalyzedCurve<f64> {
    let curve = trace_parameter_line(&presets::paraboloid(), (0.5, 0.0), (1.0, 1.0), 1e-3, 2.0).unwrap();
    AnalyzedCurve::on_surface(curve, &presets::paraboloid().into()).unwrap()
}

fn paraboloid_rns() -> AnalyzedCurve<f64> {
    let cfg = TraceConfig::new(
        Vector3::unit_z(),
        FRAC_PI_3,
        Family::RelativelyNormalSlant,
        Branch::Plus,
        InitialPoint::Parameter(1.0, 0.0),
        1e-3,
        2.0,
    )
    .unwrap();
    let t = trace(&presets::paraboloid().into(), &cfg).unwrap();
    assert!(t.completed());
    AnalyzedCurve::from_trace(&t).unwrap()
}

#[test]
fn cylinder_helix_direction_curve_curvatures() {
    let c = cylinder_helix();
    let r = verify_thm_6_1(&c, &gates()).unwrap();
    let range = c.interior(&gates());
    for i in range {
        assert!((r.kappa_bar[i] - 0.5).abs() < 1e-6, "{}", r.kappa_bar[i]);
        assert!((r.tau_bar[i].unwrap().abs() - 0.5).abs() < 1e-5);
    }
    assert!(r.kappa_residual < 1e-6 && r.tau_residual < 1e-5 && r.ratio_residual < 1e-5);
    assert!(r.direction_general_helix.holds && r.rns_helix.holds && r.agree);
}

#[test]
fn cylinder_helix_rectifying_curve_is_unit_helix() {
    let c = cylinder_helix();
    let r = verify_thm_6_2(&c, &gates()).unwrap();
    for i in c.interior(&gates()) {
        assert!((r.kappa_beta[i] - 1.0).abs() < 1e-3);
        assert!((r.tau_beta[i].unwrap() - 1.0).abs() < 1e-3, "{:?}", r.tau_beta[i]);
    }
    assert!(r.kappa_residual < 1e-3 && r.tau_residual < 1e-3);
    assert!(r.circular_helix.holds && r.agree);
}

#[test]
fn cylinder_helix_satisfies_all_six_conditions() {
    let c = cylinder_helix();
    let r = verify_thm_6_3(&c, &gates()).unwrap();
    assert!(r.all_hold(), "{:?}", r.conditions());
    assert!(r.agreement);
    assert!(r.indicatrix_curvature_residual < 1e-4, "{}", r.indicatrix_curvature_residual);
    let a = recover_axis(&c, &gates()).unwrap();
    assert!(a.d_hat.cross(Vector3::unit_z()).norm() < 1e-6);
    assert!((a.theta_hat - std::f64::consts::FRAC_PI_4).abs() < 1e-6);
}

#[test]
fn cylinder_helix_classification() {
    let c = cylinder_helix();
    let k = classify(&c, &gates()).unwrap();
    assert!(k.geodesic.holds && !k.asymptotic.holds && !k.line_of_curvature.holds);
    assert!(k.rns_helix.holds && k.general_helix.holds && k.slant_helix.holds);
    let geo = &k.cross_checks[0];
    assert!(geo.applicable && geo.consistent);
    assert!((geo.ratio.unwrap().abs() - 1.0).abs() < 1e-3);
    assert!(k.consistent());
}

#[test]
fn latitude_classification() {
    let c = sphere_latitude();
    let k = classify(&c, &gates()).unwrap();
    assert!(k.line_of_curvature.holds && !k.geodesic.holds && !k.asymptotic.holds);
    assert!(k.rns_helix.holds && k.isophote.holds && k.general_helix.holds);
    let loc = &k.cross_checks[2];
    assert!(loc.applicable && loc.consistent);
    assert!((loc.ratio.unwrap() + 4.0 / 3.0).abs() < 1e-3, "{:?}", loc.ratio);
    assert!(k.isophote_axis.unwrap().cross(Vector3::unit_z()).norm() < 1e-6);
}

#[test]
fn planar_circle_has_zero_sigma_v() {
    let c = plane_circle();
    for i in c.interior(&gates()) {
        assert!(c.sigma_v[i].unwrap().abs() < 1e-8);
    }
    let k = classify(&c, &gates()).unwrap();
    assert!(k.asymptotic.holds && k.rns_helix.holds && k.slant_helix.holds && k.consistent());
    let r = verify_thm_6_2(&c, &gates()).unwrap();
    assert!(r.circular_helix.holds && r.agree && r.kappa_residual < 1e-6);
    assert!(verify_thm_6_3(&c, &gates()).unwrap().agreement);
}

#[test]
fn traced_curve_recovers_its_axis() {
    let c = paraboloid_rns();
    let a = recover_axis(&c, &gates()).unwrap();
    assert!(a.sigma_v_constant);
    assert!(a.d_hat.cross(Vector3::unit_z()).norm() < 1e-5, "{:?}", a.d_hat);
    assert!((a.theta_hat - FRAC_PI_3).abs() < 1e-5, "{}", a.theta_hat);
    let r = verify_thm_6_3(&c, &gates()).unwrap();
    assert!(r.all_hold() && r.agreement, "{:?}", r.conditions());
}

#[test]
fn generic_curve_fails_every_condition() {
    let c = paraboloid_diagonal();
    let r = verify_thm_6_3(&c, &gates()).unwrap();
    assert!(r.none_hold(), "{:?}", r.conditions());
    assert!(r.agreement);
    let k = classify(&c, &gates()).unwrap();
    assert!(k.labels().is_empty(), "{:?}", k.labels());
    for which in [Thm7Which::NormalDarboux, Thm7Which::OsculatingDarboux] {
        let t = verify_thm_7(&c, which, &gates()).unwrap();
        assert!(!t.circular_helix.holds && !t.member.holds && t.agree);
    }
}

#[test]
fn general_helix_and_isophote_characterizations() {
    let helix = cylinder_helix();
    let r = verify_thm_7(&helix, Thm7Which::NormalDarboux, &gates()).unwrap();
    assert!(r.member.holds && r.circular_helix.holds && r.agree);
    let lat = sphere_latitude();
    let r = verify_thm_7(&lat, Thm7Which::OsculatingDarboux, &gates()).unwrap();
    assert!(r.member.holds && r.circular_helix.holds && r.agree);
    assert!(r.axis.unwrap().cross(Vector3::unit_z()).norm() < 1e-6);
}

#[test]
fn indicatrix_lies_on_sphere() {
    let c = paraboloid_rns();
    let ind = rn_indicatrix(&c).unwrap();
    assert!(ind.points().iter().all(|p| (p.norm() - 1.0).abs() < 1e-12));
}
