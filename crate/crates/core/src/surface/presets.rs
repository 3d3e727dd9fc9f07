//! Named surfaces used by the CLI and by the test oracles.

use super::{Domain, ImplicitSurface, ParametricSurface, Surface, SurfaceError};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PresetKind {
    Parametric,
    Implicit,
}

/// Catalog entry. For parametric presets `expressions` holds `x, y, z` over
/// `(u, v)`; for implicit ones it holds the single `f(x, y, z)`.
#[derive(Clone, Debug)]
pub struct PresetInfo {
    pub name: &'static str,
    pub kind: PresetKind,
    pub expressions: &'static [&'static str],
    /// `[u_min, u_max, v_min, v_max]` for parametric presets.
    pub domain: Option<[f64; 4]>,
    pub description: &'static str,
}

const INF: f64 = f64::INFINITY;
const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;

pub const CATALOG: &[PresetInfo] = &[
    PresetInfo {
        name: "plane",
        kind: PresetKind::Parametric,
        expressions: &["u", "v", "0"],
        domain: Some([-INF, INF, -INF, INF]),
        description: "the xy-plane, normal +z",
    },
    PresetInfo {
        name: "sphere",
        kind: PresetKind::Parametric,
        expressions: &["cos(u)*cos(v)", "sin(u)*cos(v)", "sin(v)"],
        domain: Some([-INF, INF, -FRAC_PI_2, FRAC_PI_2]),
        description: "unit sphere by longitude u and latitude v, outward normal",
    },
    PresetInfo {
        name: "cylinder",
        kind: PresetKind::Parametric,
        expressions: &["cos(u)", "sin(u)", "v"],
        domain: Some([-INF, INF, -INF, INF]),
        description: "unit circular cylinder about the z-axis, outward normal",
    },
    PresetInfo {
        name: "paraboloid",
        kind: PresetKind::Parametric,
        expressions: &["u*cos(v)", "u*sin(v)", "u^2"],
        domain: Some([0.0, INF, -INF, INF]),
        description: "paraboloid of revolution z = x^2 + y^2, singular at u = 0",
    },
    PresetInfo {
        name: "torus",
        kind: PresetKind::Parametric,
        expressions: &["(2 + cos(v))*cos(u)", "(2 + cos(v))*sin(u)", "sin(v)"],
        domain: Some([-INF, INF, -INF, INF]),
        description: "torus with radii 2 and 1",
    },
    PresetInfo {
        name: "quartic",
        kind: PresetKind::Implicit,
        expressions: &["(x^2 + y^2)*z^2 + (x^2 + y^2)/4 - 1/4"],
        domain: None,
        description: "quartic surface of revolution (x^2+y^2)(z^2+1/4) = 1/4",
    },
    PresetInfo {
        name: "implicit-sphere",
        kind: PresetKind::Implicit,
        expressions: &["x^2 + y^2 + z^2 - 1"],
        domain: None,
        description: "unit sphere, gradient orientation (outward)",
    },
    PresetInfo {
        name: "implicit-paraboloid",
        kind: PresetKind::Implicit,
        expressions: &["z - x^2 - y^2"],
        domain: None,
        description: "paraboloid z = x^2 + y^2, oriented like the parametric preset",
    },
    PresetInfo {
        name: "implicit-cylinder",
        kind: PresetKind::Implicit,
        expressions: &["x^2 + y^2 - 1 + 0*z"],
        domain: None,
        description: "unit circular cylinder, outward normal",
    },
    PresetInfo {
        name: "implicit-plane",
        kind: PresetKind::Implicit,
        expressions: &["z + 0*x*y"],
        domain: None,
        description: "the plane z = 0, normal +z",
    },
];

pub fn info(name: &str) -> Option<&'static PresetInfo> {
    CATALOG.iter().find(|p| p.name == name)
}

/// Builds a preset by name.
pub fn preset<S: Scalar>(name: &str) -> Result<Surface<S>, SurfaceError> {
    let info = info(name).ok_or_else(|| SurfaceError::UnknownPreset(name.to_string()))?;
    Ok(match info.kind {
        PresetKind::Parametric => {
            let e = info.expressions;
            let d = info.domain.expect("parametric preset has a domain");
            let domain = Domain::new((S::lit(d[0]), S::lit(d[1])), (S::lit(d[2]), S::lit(d[3])));
            Surface::Parametric(ParametricSurface::new(e[0], e[1], e[2], domain)?)
        }
        PresetKind::Implicit => Surface::Implicit(ImplicitSurface::new(info.expressions[0])?),
    })
}

fn parametric<S: Scalar>(name: &str) -> ParametricSurface<S> {
    match preset(name) {
        Ok(Surface::Parametric(p)) => p,
        _ => unreachable!("built-in parametric preset {name}"),
    }
}

fn implicit<S: Scalar>(name: &str) -> ImplicitSurface<S> {
    match preset(name) {
        Ok(Surface::Implicit(i)) => i,
        _ => unreachable!("built-in implicit preset {name}"),
    }
}

pub fn plane<S: Scalar>() -> ParametricSurface<S> {
    parametric("plane")
}

pub fn sphere<S: Scalar>() -> ParametricSurface<S> {
    parametric("sphere")
}

pub fn cylinder<S: Scalar>() -> ParametricSurface<S> {
    parametric("cylinder")
}

pub fn paraboloid<S: Scalar>() -> ParametricSurface<S> {
    parametric("paraboloid")
}

pub fn torus<S: Scalar>() -> ParametricSurface<S> {
    parametric("torus")
}

pub fn quartic<S: Scalar>() -> ImplicitSurface<S> {
    implicit("quartic")
}

pub fn implicit_sphere<S: Scalar>() -> ImplicitSurface<S> {
    implicit("implicit-sphere")
}

pub fn implicit_paraboloid<S: Scalar>() -> ImplicitSurface<S> {
    implicit("implicit-paraboloid")
}

pub fn implicit_cylinder<S: Scalar>() -> ImplicitSurface<S> {
    implicit("implicit-cylinder")
}

pub fn implicit_plane<S: Scalar>() -> ImplicitSurface<S> {
    implicit("implicit-plane")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::Vector3;

    #[test]
    fn every_preset_builds() {
        for p in CATALOG {
            preset::<f64>(p.name).unwrap();
            preset::<f32>(p.name).unwrap();
        }
        assert!(matches!(preset::<f64>("klein"), Err(SurfaceError::UnknownPreset(_))));
    }

    #[test]
    fn quartic_contains_the_start_point() {
        let q: ImplicitSurface<f64> = quartic();
        let p = Vector3::new(-1.0 / 13f64.sqrt(), 0.0, -3f64.sqrt());
        assert!(q.value(p).unwrap().abs() < 1e-15);
    }

    #[test]
    fn implicit_and_parametric_paraboloid_agree_on_orientation() {
        let par: ParametricSurface<f64> = paraboloid();
        let imp: ImplicitSurface<f64> = implicit_paraboloid();
        for (u, v) in [(1.0, 0.0), (0.4, 2.0), (2.5, -1.0)] {
            let p = par.point(u, v).unwrap();
            assert!(imp.value(p).unwrap().abs() < 1e-14);
            assert!((par.normal(u, v).unwrap() - imp.normal(p).unwrap()).max_abs() < 1e-14);
        }
    }
}
