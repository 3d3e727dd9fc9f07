//! Right-hand sides: unit tangent directions satisfying one linear
//! constant-angle constraint plus unit speed.
//!
//! The closed forms produce up to four sign combinations; only some of
//! them satisfy the constraint. Each candidate is screened loosely,
//! polished by Newton on the original two- or three-equation system and
//! then checked against [`ACCEPT_TOL`].

use crate::scalar::Scalar;
use crate::surface::{ImplicitSurface, ParametricSurface, Patch, Surface};
use crate::vector::Vector3;

use super::{Branch, Discriminant, Family, TraceConfig, TraceError, Tolerances};

/// Residual a polished candidate must meet (in double precision).
pub const ACCEPT_TOL: f64 = 1e-10;

/// Residual a raw closed-form candidate must meet to be polished at all.
const SCREEN_TOL: f64 = 1e-6;

/// How forgiving a solve is. Curves can graze the locus where a
/// discriminant vanishes; RK4 stage points near such a tangency overshoot
/// slightly into the negative side, so away from the start point small
/// negative discriminants are clamped to zero and the resulting double
/// root accepted with a looser residual.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Mode {
    Strict,
    Lenient,
}

impl Mode {
    /// Negative discriminants within this fraction of their scale count as zero.
    fn clamp<S: Scalar>(self) -> S {
        match self {
            Mode::Strict => S::lit(1e-12),
            Mode::Lenient => S::lit(1e-4),
        }
    }

    fn accept<S: Scalar>(self) -> S {
        let base = match self {
            Mode::Strict => ACCEPT_TOL,
            Mode::Lenient => 1e-4,
        };
        S::lit(base).max(S::epsilon() * S::lit(100.0))
    }

    fn screen<S: Scalar>(self) -> S {
        S::lit(SCREEN_TOL).max(S::epsilon() * S::lit(1e4)).max(self.accept())
    }
}

const POLISH_ITERATIONS: usize = 4;

/// One admissible direction: the ambient unit tangent and, on parametric
/// surfaces, its parameter velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Velocity<S> {
    pub tangent: Vector3<S>,
    pub duv: Option<(S, S)>,
}

/// Intermediate quantities of the parametric solve.
#[derive(Clone, Debug)]
pub struct ParametricRnsSolve<S> {
    pub a: S,
    pub w: S,
    pub delta: S,
    pub delta_star: S,
    pub candidates: Vec<(S, S)>,
}

/// Intermediate quantities of the implicit solve, in the coordinate order
/// selected by `permutation` (0: z distinguished, 1: x, 2: y).
#[derive(Clone, Debug)]
pub struct ImplicitRnsSolve<S> {
    pub omega: S,
    pub q: [S; 3],
    pub discriminant: S,
    pub permutation: usize,
    pub candidates: Vec<Vector3<S>>,
}

fn clamp_discriminant<S: Scalar>(
    value: S,
    scale: S,
    which: Discriminant,
    floor: S,
    mode: Mode,
) -> Result<S, TraceError> {
    let v = if value < S::zero() && value >= -mode.clamp::<S>() * scale {
        S::zero()
    } else {
        value
    };
    if !(v >= floor) || v < S::zero() {
        return Err(TraceError::Inadmissible { which, value: value.to_f64_lossy() });
    }
    Ok(v)
}

/// Solves for the parameter velocities at `patch` with `⟨V, d⟩ = cos θ`.
pub fn parametric_rns_solve<S: Scalar>(
    patch: &Patch<S>,
    d: Vector3<S>,
    cos_theta: S,
    tol: &Tolerances<S>,
) -> Result<ParametricRnsSolve<S>, TraceError> {
    parametric_rns_solve_with(patch, d, cos_theta, tol, Mode::Strict)
}

pub(crate) fn parametric_rns_solve_with<S: Scalar>(
    patch: &Patch<S>,
    d: Vector3<S>,
    cos_theta: S,
    tol: &Tolerances<S>,
    mode: Mode,
) -> Result<ParametricRnsSolve<S>, TraceError> {
    let two = S::lit(2.0);
    let four = S::lit(4.0);
    let ff = patch.first_form();
    let (e, f, g) = (ff.e, ff.f, ff.g);
    let w = ff.determinant();
    let p = patch.xu.dot(d);
    let q = patch.xv.dot(d);
    let c = cos_theta;

    // A = W ‖d_tan‖².
    let a = e * q * q - two * f * p * q + g * p * p;
    if !(a > tol.degeneracy * w) {
        return Err(TraceError::Degenerate(format!(
            "axis is normal to the surface (A = {:e})",
            a.to_f64_lossy()
        )));
    }

    let c2w2 = four * c * c * w * w;
    let fq_gp = f * q - g * p;
    let eq_fp = e * q - f * p;
    let delta_raw = c2w2 * (q * q * w - a * g) + four * a * w * fq_gp * fq_gp;
    let delta_star_raw = c2w2 * (p * p * w - a * e) + four * a * w * eq_fp * eq_fp;
    let delta_scale = c2w2 * (q * q * w + a * g) + four * a * w * fq_gp * fq_gp;
    let delta_star_scale = c2w2 * (p * p * w + a * e) + four * a * w * eq_fp * eq_fp;
    let delta = clamp_discriminant(delta_raw, delta_scale, Discriminant::Delta, tol.discriminant_floor, mode)?;
    let delta_star =
        clamp_discriminant(delta_star_raw, delta_star_scale, Discriminant::DeltaStar, tol.discriminant_floor, mode)?;

    let w32 = w * w.sqrt();
    let denom = two * a * w;
    let (sd, sds) = (delta.sqrt(), delta_star.sqrt());
    let mut candidates: Vec<(S, S)> = Vec::with_capacity(4);
    for s1 in [S::one(), -S::one()] {
        for s2 in [S::one(), -S::one()] {
            let du = (two * c * w32 * q + s1 * sd) / denom;
            let dv = (-two * c * w32 * p - s2 * sds) / denom;
            let r = parametric_residual(patch, d, c, du, dv);
            if r > mode.screen() {
                continue;
            }
            let (pu, pv) = polish_parametric(patch, d, c, du, dv);
            let rp = parametric_residual(patch, d, c, pu, pv);
            let (du, dv, r) = if rp <= r { (pu, pv, rp) } else { (du, dv, r) };
            if r <= mode.accept() {
                push_unique_pair(&mut candidates, (du, dv), patch);
            }
        }
    }
    if candidates.is_empty() {
        return Err(TraceError::NoSolution("no sign pairing satisfies the constraint".into()));
    }
    Ok(ParametricRnsSolve { a, w, delta, delta_star, candidates })
}

/// Max of `|⟨V, d⟩ − c|` and `|I(du, dv) − 1|`.
fn parametric_residual<S: Scalar>(patch: &Patch<S>, d: Vector3<S>, c: S, du: S, dv: S) -> S {
    let t = patch.push_forward(du, dv);
    let v = patch.normal().cross(t);
    let r1 = (v.dot(d) - c).abs();
    let r2 = (patch.first_form().quadratic(du, dv) - S::one()).abs();
    r1.max(r2)
}

/// Newton on `(Eq−Fp) du + (Fq−Gp) dv = c√W`, `E du² + 2F du dv + G dv² = 1`.
fn polish_parametric<S: Scalar>(patch: &Patch<S>, d: Vector3<S>, c: S, mut du: S, mut dv: S) -> (S, S) {
    let two = S::lit(2.0);
    let ff = patch.first_form();
    let (e, f, g) = (ff.e, ff.f, ff.g);
    let p = patch.xu.dot(d);
    let q = patch.xv.dot(d);
    let sw = ff.determinant().sqrt();
    let (alpha, beta) = (e * q - f * p, f * q - g * p);
    for _ in 0..POLISH_ITERATIONS {
        let r1 = alpha * du + beta * dv - c * sw;
        let r2 = ff.quadratic(du, dv) - S::one();
        let (j21, j22) = (two * (e * du + f * dv), two * (f * du + g * dv));
        let det = alpha * j22 - beta * j21;
        if det == S::zero() || !det.is_finite() {
            break;
        }
        let ddu = (r1 * j22 - beta * r2) / det;
        let ddv = (alpha * r2 - j21 * r1) / det;
        du -= ddu;
        dv -= ddv;
    }
    (du, dv)
}

fn same_direction<S: Scalar>(a: Vector3<S>, b: Vector3<S>) -> bool {
    (a - b).norm() <= S::lit(1e-8)
}

fn push_unique_pair<S: Scalar>(list: &mut Vec<(S, S)>, c: (S, S), patch: &Patch<S>) {
    let t = patch.push_forward(c.0, c.1);
    if !list.iter().any(|&(a, b)| same_direction(patch.push_forward(a, b), t)) {
        list.push(c);
    }
}

fn push_unique<S: Scalar>(list: &mut Vec<Vector3<S>>, t: Vector3<S>) {
    if !list.iter().any(|&x| same_direction(x, t)) {
        list.push(t);
    }
}

const PERMUTATIONS: [[usize; 3]; 3] = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];

/// Solves for the ambient velocities at a point with gradient `grad` and
/// `⟨V, d⟩ = cos θ`. The distinguished coordinate is chosen to maximize
/// `|Ω|` over the three cyclic relabelings.
pub fn implicit_rns_solve<S: Scalar>(
    grad: Vector3<S>,
    d: Vector3<S>,
    cos_theta: S,
    tol: &Tolerances<S>,
) -> Result<ImplicitRnsSolve<S>, TraceError> {
    implicit_rns_solve_with(grad, d, cos_theta, tol, Mode::Strict)
}

pub(crate) fn implicit_rns_solve_with<S: Scalar>(
    grad: Vector3<S>,
    d: Vector3<S>,
    cos_theta: S,
    tol: &Tolerances<S>,
    mode: Mode,
) -> Result<ImplicitRnsSolve<S>, TraceError> {
    let omega_of = |perm: &[usize; 3]| {
        let (fx, fy, fz) = (grad[perm[0]], grad[perm[1]], grad[perm[2]]);
        let (a, b, c) = (d[perm[0]], d[perm[1]], d[perm[2]]);
        c * fx * fx - a * fx * fz - b * fy * fz + c * fy * fy
    };
    let (permutation, omega) = PERMUTATIONS
        .iter()
        .enumerate()
        .map(|(k, perm)| (k, omega_of(perm)))
        .fold((0, S::zero()), |best, cur| if cur.1.abs() > best.1.abs() { cur } else { best });
    let gn2 = grad.norm_squared();
    if !(omega.abs() > tol.degeneracy * gn2) {
        return Err(TraceError::Degenerate(format!(
            "Ω vanishes in every coordinate order (max |Ω| = {:e})",
            omega.abs().to_f64_lossy()
        )));
    }
    let perm = PERMUTATIONS[permutation];
    let (fx, fy, fz) = (grad[perm[0]], grad[perm[1]], grad[perm[2]]);
    let (a, b, c) = (d[perm[0]], d[perm[1]], d[perm[2]]);
    let gn = gn2.sqrt();
    let k = gn * cos_theta;
    let q = implicit_q(fx, fy, fz, a, b, c, omega, k);

    // Discriminant scale for the round-off clamp.
    let scale = q[1] * q[1] + S::lit(4.0) * (q[0] * q[2]).abs();
    let disc_raw = q[1] * q[1] - S::lit(4.0) * q[0] * q[2];
    let disc = clamp_discriminant(disc_raw, scale, Discriminant::Quadratic, tol.discriminant_floor, mode)?;

    let n = d.cross(grad);
    let mut candidates = Vec::with_capacity(2);
    for sign in [S::one(), -S::one()] {
        let dz = (-q[1] + sign * disc.sqrt()) / (S::lit(2.0) * q[0]);
        let dx = ((fy * (a * fy - b * fx) - fz * (c * fx - a * fz)) * dz - fy * k) / omega;
        let dy = ((fz * (b * fz - c * fy) - fx * (a * fy - b * fx)) * dz + fx * k) / omega;
        let mut local = [S::zero(); 3];
        local[0] = dx;
        local[1] = dy;
        local[2] = dz;
        let mut v = Vector3::zero();
        let mut arr = v.to_array();
        for j in 0..3 {
            arr[perm[j]] = local[j];
        }
        v = Vector3::from_array(arr);
        let r = implicit_residual(grad, n, k, v);
        if r > mode.screen() {
            continue;
        }
        let polished = polish_implicit(grad, n, k, v);
        let rp = implicit_residual(grad, n, k, polished);
        let (v, r) = if rp <= r { (polished, rp) } else { (v, r) };
        if r <= mode.accept() {
            push_unique(&mut candidates, v);
        }
    }
    if candidates.is_empty() {
        return Err(TraceError::NoSolution("closed-form velocity fails the constraint".into()));
    }
    Ok(ImplicitRnsSolve { omega, q, discriminant: disc, permutation, candidates })
}

/// Coefficients of the quadratic in the distinguished velocity component,
/// term for term as in the closed form.
#[allow(clippy::too_many_arguments)]
fn implicit_q<S: Scalar>(fx: S, fy: S, fz: S, a: S, b: S, c: S, omega: S, k: S) -> [S; 3] {
    let l = S::lit;
    let o2 = omega * omega;
    let (fx2, fy2, fz2) = (fx * fx, fy * fy, fz * fz);
    let q1 = (b * b * fx2 * fx2 + a * a * fy2 * fy2 + (a * a + b * b) * fz2 * fz2
        - l(2.0) * a * b * fx * fy2 * fy
        - l(2.0) * a * c * fx * fz2 * fz
        - l(2.0) * b * c * fy * fz2 * fz
        - l(2.0) * a * b * fy * fx2 * fx
        + (a * a + b * b) * fx2 * fy2
        + (c * c + l(2.0) * b * b) * fx2 * fz2
        + (l(2.0) * a * a + c * c) * fy2 * fz2
        - l(4.0) * a * b * fx * fy * fz2)
        / o2
        + S::one();
    let q2 = l(2.0) * k * (b * fx * fz2 - a * fy * fx2 + b * fx * fy2 - a * fy * fz2 + b * fx2 * fx - a * fy2 * fy) / o2;
    let q3 = k * k * (fx2 + fy2) / o2 - S::one();
    [q1, q2, q3]
}

#[cfg(test)]
pub(crate) fn implicit_q_for_tests(g: Vector3<f64>, d: Vector3<f64>, k: f64) -> [f64; 3] {
    let omega = d.z * g.x * g.x - d.x * g.x * g.z - d.y * g.y * g.z + d.z * g.y * g.y;
    implicit_q(g.x, g.y, g.z, d.x, d.y, d.z, omega, k)
}

/// Max of `|⟨∇f, v⟩|/‖∇f‖`, `|⟨d×∇f, v⟩ − k|/‖∇f‖` and `|‖v‖² − 1|`.
fn implicit_residual<S: Scalar>(grad: Vector3<S>, n: Vector3<S>, k: S, v: Vector3<S>) -> S {
    let gn = grad.norm();
    let r1 = grad.dot(v).abs() / gn;
    let r2 = (n.dot(v) - k).abs() / gn;
    let r3 = (v.norm_squared() - S::one()).abs();
    r1.max(r2).max(r3)
}

fn polish_implicit<S: Scalar>(grad: Vector3<S>, n: Vector3<S>, k: S, mut v: Vector3<S>) -> Vector3<S> {
    for _ in 0..POLISH_ITERATIONS {
        let r = Vector3::new(grad.dot(v), n.dot(v) - k, v.norm_squared() - S::one());
        let rows = [grad, n, v * S::lit(2.0)];
        match solve3(rows, r) {
            Some(dv) => v -= dv,
            None => break,
        }
    }
    v
}

/// Cramer's rule for a 3×3 system given by rows.
fn solve3<S: Scalar>(rows: [Vector3<S>; 3], rhs: Vector3<S>) -> Option<Vector3<S>> {
    let det = rows[0].dot(rows[1].cross(rows[2]));
    if det == S::zero() || !det.is_finite() {
        return None;
    }
    // Inverse columns are the cofactor cross products.
    let c0 = rows[1].cross(rows[2]);
    let c1 = rows[2].cross(rows[0]);
    let c2 = rows[0].cross(rows[1]);
    Some((c0 * rhs.x + c1 * rhs.y + c2 * rhs.z) / det)
}

/// Unit tangents `T ⊥ normal` with `⟨T, n⟩ = k`, for unit `normal`.
/// Returns one or two directions.
pub(crate) fn tangent_solve<S: Scalar>(
    normal: Vector3<S>,
    n: Vector3<S>,
    k: S,
    which: Discriminant,
    tol: &Tolerances<S>,
    mode: Mode,
) -> Result<Vec<Vector3<S>>, TraceError> {
    let nt = n - normal * normal.dot(n);
    let m = nt.norm_squared();
    if !(m > tol.degeneracy * n.norm_squared()) {
        return Err(TraceError::Degenerate("axis is normal to the surface".into()));
    }
    let disc_raw = S::one() - k * k / m;
    let disc = clamp_discriminant(disc_raw, S::one(), which, tol.discriminant_floor, mode)?;
    let along = nt * (k / m);
    let across = normal.cross(nt) * (disc.sqrt() / m.sqrt());
    let mut out = Vec::with_capacity(2);
    push_unique(&mut out, along + across);
    push_unique(&mut out, along - across);
    Ok(out)
}

/// All admissible directions for `family` at a parametric patch.
pub(crate) fn parametric_candidates<S: Scalar>(
    patch: &Patch<S>,
    family: Family,
    d: Vector3<S>,
    cos_theta: S,
    tol: &Tolerances<S>,
    mode: Mode,
) -> Result<Vec<Velocity<S>>, TraceError> {
    match family {
        Family::RelativelyNormalSlant => Ok(parametric_rns_solve_with(patch, d, cos_theta, tol, mode)?
            .candidates
            .into_iter()
            .map(|(du, dv)| Velocity { tangent: patch.push_forward(du, dv), duv: Some((du, dv)) })
            .collect()),
        Family::GeneralHelix => {
            let ts = tangent_solve(patch.normal(), d, cos_theta, Discriminant::Tangent, tol, mode)?;
            Ok(ts
                .into_iter()
                .map(|t| {
                    let (du, dv) = patch.pull_back(t);
                    Velocity { tangent: t, duv: Some((du, dv)) }
                })
                .collect())
        }
        Family::Isophote => Err(TraceError::Unsupported("isophotes are traced as level curves".into())),
    }
}

/// All admissible directions for `family` at a point of an implicit surface.
pub(crate) fn implicit_candidates<S: Scalar>(
    grad: Vector3<S>,
    family: Family,
    d: Vector3<S>,
    cos_theta: S,
    tol: &Tolerances<S>,
    mode: Mode,
) -> Result<Vec<Velocity<S>>, TraceError> {
    let ts = match family {
        Family::RelativelyNormalSlant => implicit_rns_solve_with(grad, d, cos_theta, tol, mode)?.candidates,
        Family::GeneralHelix => tangent_solve(grad.normalize(), d, cos_theta, Discriminant::Tangent, tol, mode)?,
        Family::Isophote => {
            return Err(TraceError::Unsupported("isophotes are traced on parametric surfaces only".into()))
        }
    };
    Ok(ts.into_iter().map(|t| Velocity { tangent: t, duv: None }).collect())
}

/// Fixed vector the branch sign is measured against at the initial point:
/// `d` for relatively normal-slant curves, `d × U` otherwise.
pub(crate) fn branch_reference<S: Scalar>(family: Family, d: Vector3<S>, normal: Vector3<S>) -> Vector3<S> {
    match family {
        Family::RelativelyNormalSlant => d,
        Family::GeneralHelix | Family::Isophote => d.cross(normal),
    }
}

/// Plus takes the candidate with the largest component along `reference`.
pub(crate) fn pick_branch<S: Scalar>(cands: &[Velocity<S>], branch: Branch, reference: Vector3<S>) -> Velocity<S> {
    let key = |v: &Velocity<S>| {
        let x = v.tangent.dot(reference);
        match branch {
            Branch::Plus => x,
            Branch::Minus => -x,
        }
    };
    let mut best = cands[0];
    for c in &cands[1..] {
        if key(c) > key(&best) {
            best = *c;
        }
    }
    best
}

/// The candidate closest in direction to `previous`.
pub(crate) fn pick_continuous<S: Scalar>(cands: &[Velocity<S>], previous: Vector3<S>) -> Velocity<S> {
    pick_branch(cands, Branch::Plus, previous)
}

/// Parameter velocity of the configured branch at `(u, v)`.
pub fn rhs_parametric_rns<S: Scalar>(
    surface: &ParametricSurface<S>,
    u: S,
    v: S,
    cfg: &TraceConfig<S>,
) -> Result<(S, S), TraceError> {
    let patch = surface.patch(u, v)?;
    let cands = parametric_candidates(&patch, Family::RelativelyNormalSlant, cfg.axis, cfg.theta.cos(), &cfg.tolerances, Mode::Strict)?;
    let pick = pick_branch(&cands, cfg.branch, cfg.axis);
    Ok(pick.duv.expect("parametric candidates carry parameter velocities"))
}

/// Ambient velocity of the configured branch at `p`.
pub fn rhs_implicit_rns<S: Scalar>(
    surface: &ImplicitSurface<S>,
    p: Vector3<S>,
    cfg: &TraceConfig<S>,
) -> Result<Vector3<S>, TraceError> {
    let grad = surface.gradient(p)?;
    let cands = implicit_candidates(grad, Family::RelativelyNormalSlant, cfg.axis, cfg.theta.cos(), &cfg.tolerances, Mode::Strict)?;
    Ok(pick_branch(&cands, cfg.branch, cfg.axis).tangent)
}

/// Unit tangent of the configured branch with `⟨T, d⟩ = cos θ`. On a
/// parametric surface `state` is `(u, v, 0)`; on an implicit one it is the
/// point.
pub fn rhs_general_helix<S: Scalar>(
    surface: &Surface<S>,
    state: Vector3<S>,
    cfg: &TraceConfig<S>,
) -> Result<Velocity<S>, TraceError> {
    let c = cfg.theta.cos();
    let (cands, normal) = match surface {
        Surface::Parametric(ps) => {
            let patch = ps.patch(state.x, state.y)?;
            (parametric_candidates(&patch, Family::GeneralHelix, cfg.axis, c, &cfg.tolerances, Mode::Strict)?, patch.normal())
        }
        Surface::Implicit(is) => {
            let grad = is.gradient(state)?;
            (implicit_candidates(grad, Family::GeneralHelix, cfg.axis, c, &cfg.tolerances, Mode::Strict)?, grad.normalize())
        }
    };
    let reference = branch_reference(Family::GeneralHelix, cfg.axis, normal);
    Ok(pick_branch(&cands, cfg.branch, reference))
}
