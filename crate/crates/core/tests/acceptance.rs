//! Acceptance criteria 1–12. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on any FAIL.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};
use std::process::{Command, ExitCode};
use std::time::Instant;

use darboux_helix::analysis::{
    classify, recover_axis, verify_thm_6_1, verify_thm_6_2, verify_thm_6_3, verify_thm_7, AnalyzedCurve, Gates,
    Spread, Thm7Which,
};
use darboux_helix::expr::{eval, eval_jet2, parse_expr, Expr};
use darboux_helix::frame::CurveSamples;
use darboux_helix::surface::{presets, Surface};
use darboux_helix::tracer::{
    rhs_implicit_rns, trace, trace_isophote, trace_parameter_line, Branch, Discriminant, Family, InitialPoint,
    TraceConfig, TraceError, TraceResult,
};
use darboux_helix::Vector3;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn z() -> Vector3<f64> {
    Vector3::unit_z()
}

fn rns(theta: f64, branch: Branch, initial: InitialPoint<f64>, s_max: f64) -> TraceConfig<f64> {
    TraceConfig::new(z(), theta, Family::RelativelyNormalSlant, branch, initial, 1e-3, s_max).unwrap()
}

fn run_trace(surface: &Surface<f64>, cfg: &TraceConfig<f64>) -> Result<TraceResult<f64>, String> {
    let r = trace(surface, cfg).map_err(|e| e.to_string())?;
    if !r.completed() {
        return Err(format!("stopped at s = {}: {:?}", r.curve.s().last().unwrap(), r.detail));
    }
    Ok(r)
}

/// The oracle rns traces of criteria 1, 3 and 4 with their angles.
struct Oracles {
    curves: Vec<(&'static str, f64, TraceResult<f64>)>,
}

fn oracles() -> Result<Oracles, String> {
    let mut curves = Vec::new();
    let cyl: Surface<f64> = presets::cylinder().into();
    curves.push(("cylinder", FRAC_PI_4, run_trace(&cyl, &rns(FRAC_PI_4, Branch::Plus, InitialPoint::Parameter(0.0, 0.0), 10.0))?));
    let par: Surface<f64> = presets::paraboloid().into();
    let p = InitialPoint::Point(Vector3::new(1.0, 0.0, 1.0));
    curves.push(("paraboloid", FRAC_PI_3, run_trace(&par, &rns(FRAC_PI_3, Branch::Plus, p, 3.0))?));
    let q: Surface<f64> = presets::quartic().into();
    let start = InitialPoint::Point(Vector3::new(-1.0 / 13f64.sqrt(), 0.0, -(3f64.sqrt())));
    for (name, theta) in [("quartic π/3", FRAC_PI_3), ("quartic π/4", FRAC_PI_4)] {
        for branch in [Branch::Plus, Branch::Minus] {
            curves.push((name, theta, run_trace(&q, &rns(theta, branch, start, 1.5))?));
        }
    }
    Ok(Oracles { curves })
}

fn c1() -> Check {
    let cyl: Surface<f64> = presets::cylinder().into();
    let t0 = Instant::now();
    let r = run_trace(&cyl, &rns(FRAC_PI_4, Branch::Plus, InitialPoint::Parameter(0.0, 0.0), 10.0))?;
    let elapsed = t0.elapsed().as_secs_f64();
    let k = FRAC_PI_4.cos();
    let err = r
        .curve
        .s()
        .iter()
        .zip(r.curve.points())
        .map(|(&s, p)| (*p - Vector3::new((s * k).cos(), (s * k).sin(), s * k)).norm())
        .fold(0.0, f64::max);
    ensure(
        err <= 1e-6 && elapsed < 1.0 && r.len() == 10_001,
        format!("cylinder oracle: {} samples, max error {err:.2e}, {elapsed:.3} s", r.len()),
    )
}

fn c2() -> Check {
    let sphere = presets::implicit_sphere::<f64>();
    let p = Vector3::unit_x();
    let mut worst: f64 = 0.0;
    for theta in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
        let plus = rhs_implicit_rns(&sphere, p, &rns(theta, Branch::Plus, InitialPoint::Point(p), 1.0)).map_err(|e| e.to_string())?;
        let minus = rhs_implicit_rns(&sphere, p, &rns(theta, Branch::Minus, InitialPoint::Point(p), 1.0)).map_err(|e| e.to_string())?;
        let (a, b) = (Vector3::new(0.0, theta.cos(), theta.sin()), Vector3::new(0.0, theta.cos(), -theta.sin()));
        let e = ((plus - a).norm().max((minus - b).norm())).min((plus - b).norm().max((minus - a).norm()));
        worst = worst.max(e);
    }
    ensure(worst <= 1e-12, format!("sphere rhs at (1,0,0) vs (0, cos θ, ±sin θ): max error {worst:.2e}"))
}

fn c3(o: &Oracles) -> Check {
    let (_, _, r) = &o.curves[1];
    let drift = r.curve.points().iter().zip(&r.frames).map(|(_, f)| (f.v.dot(z()) - 0.5).abs()).fold(0.0, f64::max);
    let surf = r.curve.points().iter().map(|p| (p.z - p.x * p.x - p.y * p.y).abs()).fold(0.0, f64::max);
    ensure(
        drift <= 1e-8 && surf <= 1e-8 && *r.curve.s().last().unwrap() >= 3.0 - 1e-12,
        format!("paraboloid from (1,0,1) to s = {}: |⟨V,d⟩−1/2| ≤ {drift:.2e}, |z−x²−y²| ≤ {surf:.2e}", r.curve.s().last().unwrap()),
    )
}

fn c4(o: &Oracles) -> Check {
    let q = presets::quartic::<f64>();
    let mut f_max: f64 = 0.0;
    let mut drift: f64 = 0.0;
    for (_, _, r) in &o.curves[2..] {
        for p in r.curve.points() {
            f_max = f_max.max(q.value(*p).map_err(|e| e.to_string())?.abs());
        }
        drift = drift.max(r.diagnostics.constraint_max());
    }
    ensure(
        o.curves.len() == 6 && f_max <= 1e-8 && drift <= 1e-8,
        format!("quartic, θ ∈ {{π/3, π/4}} × both branches: 4 curves, |f| ≤ {f_max:.2e}, drift ≤ {drift:.2e}"),
    )
}

fn analyzed(r: &TraceResult<f64>) -> Result<AnalyzedCurve<f64>, String> {
    AnalyzedCurve::from_trace(r).map_err(|e| e.to_string())
}

fn c5(o: &Oracles) -> Check {
    let gates = Gates::default();
    let mut worst: f64 = 0.0;
    for (_, _, r) in &o.curves {
        let c = analyzed(r)?;
        let sv: Option<Vec<f64>> = c.sigma_v[c.interior(&gates)].iter().copied().collect();
        let sp = sv.and_then(Spread::of).ok_or("σ_v undefined on the interior")?;
        worst = worst.max((sp.max - sp.min) / sp.mean.abs().max(1.0));
    }
    ensure(worst <= 1e-4, format!("σ_v relative spread on all 6 oracle curves ≤ {worst:.2e}"))
}

fn c6(o: &Oracles) -> Check {
    let gates = Gates::default();
    let (mut dev, mut dtheta): (f64, f64) = (0.0, 0.0);
    for (_, theta, r) in &o.curves {
        let a = recover_axis(&analyzed(r)?, &gates).map_err(|e| e.to_string())?;
        dev = dev.max(a.d_hat.angle_to(z()).min(a.d_hat.angle_to(-z())));
        dtheta = dtheta.max((a.theta_hat - theta).abs());
    }
    ensure(dev <= 1e-4 && dtheta <= 1e-4, format!("axis recovery: angle to ±d ≤ {dev:.2e} rad, |θ̂−θ| ≤ {dtheta:.2e}"))
}

fn c7(o: &Oracles) -> Check {
    let gates = Gates::default();
    let c = analyzed(&o.curves[0].2)?;
    let t1 = verify_thm_6_1(&c, &gates).map_err(|e| e.to_string())?;
    let t2 = verify_thm_6_2(&c, &gates).map_err(|e| e.to_string())?;
    let (mut kb, mut tb, mut kbeta, mut tbeta): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for i in c.interior(&gates) {
        kb = kb.max((t1.kappa_bar[i] - 0.5).abs());
        tb = tb.max(t1.tau_bar[i].map_or(f64::INFINITY, |t| (t - 0.5).abs()));
        kbeta = kbeta.max((t2.kappa_beta[i] - 1.0).abs());
        tbeta = tbeta.max(t2.tau_beta[i].map_or(f64::INFINITY, |t| (t - 1.0).abs()));
    }
    ensure(
        kb.max(tb).max(kbeta).max(tbeta) <= 1e-3,
        format!("cylinder: |κ̄−1/2| ≤ {kb:.1e}, |τ̄−1/2| ≤ {tb:.1e}, |κ_β−1| ≤ {kbeta:.1e}, |τ_β−1| ≤ {tbeta:.1e}"),
    )
}

fn c8(o: &Oracles) -> Check {
    let gates = Gates::default();
    let mut all_pass = true;
    for (_, _, r) in &o.curves {
        let t = verify_thm_6_3(&analyzed(r)?, &gates).map_err(|e| e.to_string())?;
        all_pass &= t.all_hold() && t.agreement;
    }
    let par = presets::paraboloid::<f64>();
    let line = trace_parameter_line(&par, (0.5, 0.0), (1.0, 1.0), 1e-3, 2.0).map_err(|e| e.to_string())?;
    let generic = AnalyzedCurve::on_surface(line, &par.into()).map_err(|e| e.to_string())?;
    let g = verify_thm_6_3(&generic, &gates).map_err(|e| e.to_string())?;
    let all_fail = g.none_hold() && g.agreement;
    ensure(
        all_pass && all_fail,
        format!("six conditions: all pass on 6 oracle curves = {all_pass}, all fail on v = u paraboloid curve = {all_fail}"),
    )
}

fn on(surface: Surface<f64>, f: impl Fn(f64) -> Vector3<f64>) -> Result<AnalyzedCurve<f64>, String> {
    let curve = CurveSamples::from_fn(0.0, 3.0, 3000, f).map_err(|e| e.to_string())?;
    AnalyzedCurve::on_surface(curve, &surface).map_err(|e| e.to_string())
}

fn c9() -> Check {
    let gates = Gates::default();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let helix = on(presets::cylinder().into(), |s| Vector3::new((s * r).cos(), (s * r).sin(), s * r))?;
    let k = classify(&helix, &gates).map_err(|e| e.to_string())?;
    let geo = k.cross_checks[0];
    let ratio_geo = geo.ratio.unwrap_or(f64::NAN);
    let ok_geo = geo.applicable && geo.consistent && k.rns_helix.holds && (ratio_geo + 1.0).abs() <= 1e-3;

    let lat = on(presets::sphere().into(), |s| {
        let u = s / 0.8;
        Vector3::new(0.8 * u.cos(), 0.8 * u.sin(), 0.6)
    })?;
    let k = classify(&lat, &gates).map_err(|e| e.to_string())?;
    let loc = k.cross_checks[2];
    let ratio_loc = loc.ratio.unwrap_or(f64::NAN);
    let ok_loc = loc.applicable && loc.consistent && k.rns_helix.holds && (ratio_loc + 4.0 / 3.0).abs() <= 1e-3;

    let circle = on(presets::plane().into(), |s| Vector3::new(s.cos(), s.sin(), 0.0))?;
    let sv = circle.interior(&gates).map(|i| circle.sigma_v[i].map_or(f64::INFINITY, f64::abs)).fold(0.0, f64::max);
    ensure(
        ok_geo && ok_loc && sv <= 1e-6,
        format!("geodesic helix κ_n/τ_g = {ratio_geo:.6}, latitude κ_n/κ_g = {ratio_loc:.6}, planar circle |σ_v| ≤ {sv:.1e}"),
    )
}

fn c10() -> Check {
    let cyl: Surface<f64> = presets::cylinder().into();
    let c = TraceConfig::new(
        Vector3::new(0.1, 0.99, 0.0),
        FRAC_PI_3,
        Family::RelativelyNormalSlant,
        Branch::Plus,
        InitialPoint::Parameter(FRAC_PI_2, 0.0),
        1e-3,
        1.0,
    )
    .unwrap();
    let delta = matches!(trace(&cyl, &c), Err(TraceError::Inadmissible { which: Discriminant::Delta, .. }));
    let sphere: Surface<f64> = presets::implicit_sphere().into();
    let c = TraceConfig::new(
        Vector3::new(0.99, 0.1, 0.1),
        FRAC_PI_3,
        Family::RelativelyNormalSlant,
        Branch::Plus,
        InitialPoint::Point(Vector3::unit_x()),
        1e-3,
        1.0,
    )
    .unwrap();
    let quad = matches!(trace(&sphere, &c), Err(TraceError::Inadmissible { which: Discriminant::Quadratic, .. }));

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("neg.toml");
    std::fs::write(
        &cfg,
        "[surface]\nkind = \"preset\"\npreset = \"cylinder\"\n[trace.1]\nfamily = \"rns\"\naxis = [0.1, 0.99, 0]\ntheta = \"pi/3\"\nstart = [\"pi/2\", 0]\ns_max = 1\n",
    )
    .map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_darboux-helix"))
        .args(["trace", cfg.to_str().unwrap(), "--out-dir", dir.path().join("o").to_str().unwrap()])
        .output()
        .map_err(|e| e.to_string())?;
    let stderr = String::from_utf8_lossy(&out.stderr);
    let cli = out.status.code() == Some(3) && stderr.contains("discriminant Δ negative at initial point");
    ensure(
        delta && quad && cli,
        format!("Δ < 0 on cylinder: {delta}; q₂²−4q₁q₃ < 0 on sphere: {quad}; CLI exit 3 with message: {cli}"),
    )
}

fn c11() -> Check {
    let sphere = presets::sphere::<f64>();
    let cfg = TraceConfig::new(
        z(),
        0.6f64.acos(),
        Family::Isophote,
        Branch::Plus,
        InitialPoint::Parameter(0.0, 0.6f64.asin()),
        1e-3,
        5.0,
    )
    .unwrap();
    let r = trace_isophote(&sphere, &cfg).map_err(|e| e.to_string())?;
    let err = r.curve.points().iter().map(|p| (p.z - 0.6).abs().max((p.x.hypot(p.y) - 0.8).abs())).fold(0.0, f64::max);
    let t = verify_thm_7(&analyzed(&r)?, Thm7Which::OsculatingDarboux, &Gates::default()).map_err(|e| e.to_string())?;
    let residual = t.kappa_spread.max(t.tau_spread);
    ensure(
        r.completed() && err <= 1e-6 && residual <= 1e-3 && t.circular_helix.holds,
        format!("isophote cos θ = 0.6: distance to latitude ≤ {err:.2e}, D_o circular-helix residual {residual:.2e}"),
    )
}

const CORPUS: [&str; 20] = [
    "x*y*z",
    "sin(x)*cos(y) + z",
    "exp(x*y) - z^2",
    "ln(x + y + z)",
    "sqrt(x^2 + y^2 + z^2)",
    "x^3 - 3*x*y^2 + z",
    "tan(x/2)*y",
    "(x + y)/(1 + z^2)",
    "x^2.5*y^-1",
    "exp(-x^2 - y^2)*cos(z)",
    "(x^2 + y^2)*z^2 + (x^2 + y^2)/4 - 1/4",
    "sin(x*y*z)",
    "ln(x)*sqrt(y) + z",
    "cos(x)^2 + sin(y)^2 - z",
    "x/y/z",
    "(x - y)^4 + (y - z)^3",
    "exp(sin(x))*ln(1 + y*z)",
    "sqrt(1 + x*y)/(2 + cos(z))",
    "-x^2 + 2*x*y - pi*z",
    "exp(x*ln(2))*y*z",
];

fn c12() -> Check {
    let mut rng = rand::rngs::StdRng::seed_from_u64(20_240_101);
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1.0);
    let (mut g_worst, mut h_worst): (f64, f64) = (0.0, 0.0);
    for src in CORPUS {
        let e: Expr<f64> = parse_expr(src, &["x", "y", "z"]).map_err(|e| format!("{src}: {e}"))?;
        let f = |p: [f64; 3]| eval(&e, &p).unwrap();
        for _ in 0..100 {
            let p: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.5..1.5));
            let j = eval_jet2(&e, &p).map_err(|e| format!("{src}: {e}"))?;
            let at = |d: [f64; 3], t: f64| f([p[0] + t * d[0], p[1] + t * d[1], p[2] + t * d[2]]);
            // second directional derivative, five-point stencil
            let d2 = |d: [f64; 3]| {
                let h = 1e-3;
                (-at(d, 2.0 * h) + 16.0 * at(d, h) - 30.0 * at(d, 0.0) + 16.0 * at(d, -h) - at(d, -2.0 * h)) / (12.0 * h * h)
            };
            for a in 0..3 {
                let mut ea = [0.0; 3];
                ea[a] = 1.0;
                let h = 1e-5;
                g_worst = g_worst.max(rel(j.grad[a], (at(ea, h) - at(ea, -h)) / (2.0 * h)));
                for b in 0..3 {
                    let fd = if a == b {
                        d2(ea)
                    } else {
                        let mut plus = ea;
                        plus[b] = 1.0;
                        let mut minus = ea;
                        minus[b] = -1.0;
                        (d2(plus) - d2(minus)) / 4.0
                    };
                    h_worst = h_worst.max(rel(j.hess[a][b], fd));
                }
            }
        }
    }
    ensure(
        g_worst <= 1e-6 && h_worst <= 1e-6,
        format!("20 expressions × 100 points: gradient rel. error ≤ {g_worst:.2e}, Hessian ≤ {h_worst:.2e}"),
    )
}

fn main() -> ExitCode {
    let oracles = oracles();
    let with = |f: fn(&Oracles) -> Check| match &oracles {
        Ok(o) => f(o),
        Err(e) => Err(format!("oracle traces failed: {e}")),
    };
    let results: Vec<Check> = vec![
        c1(),
        c2(),
        with(c3),
        with(c4),
        with(c5),
        with(c6),
        with(c7),
        with(c8),
        c9(),
        c10(),
        c11(),
        c12(),
    ];
    let mut failed = 0;
    for (i, r) in results.iter().enumerate() {
        match r {
            Ok(d) => println!("criterion {:>2}: PASS  {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
