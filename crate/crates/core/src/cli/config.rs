//! Run configuration (TOML).
//!
//! ```toml
//! [surface]
//! kind = "preset"          # or "parametric" (x, y, z, domain) / "implicit" (f, bbox)
//! preset = "paraboloid"
//!
//! [trace.1]
//! family = "rns"           # "general-helix", "isophote"
//! axis = [0, 0, 1]
//! theta = "pi/3"           # or cos_theta = 0.5
//! start = [1, 0]           # parameter point; or point = [x, y, z]
//! branch = "both"
//! step = 1e-3
//! s_max = 3
//!
//! [verify]
//! thm7_1 = false
//!
//! [output]
//! dir = "out"
//! ```

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::expr::{eval, parse_expr};
use crate::surface::{presets, BoundingBox, Domain, ImplicitSurface, ParametricSurface, Surface};
use crate::tracer::{Branch, Family, InitialPoint, TraceConfig};
use crate::vector::Vector3;

use super::CliError;

/// A number written literally or as a constant expression (`"pi/3"`,
/// `"-inf"`).
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    pub fn value(&self) -> Result<f64, CliError> {
        match self {
            Number::Int(i) => Ok(*i as f64),
            Number::Float(x) => Ok(*x),
            Number::Text(t) => match t.trim() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                src => {
                    let e = parse_expr::<f64>(src, &[]).map_err(|e| CliError::config(format!("number \"{src}\": {e}")))?;
                    eval(&e, &[]).map_err(|e| CliError::config(format!("number \"{src}\": {e}")))
                }
            },
        }
    }
}

fn values<const N: usize>(xs: &[Number], what: &str) -> Result<[f64; N], CliError> {
    if xs.len() != N {
        return Err(CliError::config(format!("{what} needs {N} numbers, got {}", xs.len())));
    }
    let mut out = [0.0; N];
    for (o, x) in out.iter_mut().zip(xs) {
        *o = x.value()?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceKind {
    Preset,
    Parametric,
    Implicit,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceBlock {
    pub kind: SurfaceKind,
    pub preset: Option<String>,
    pub x: Option<String>,
    pub y: Option<String>,
    pub z: Option<String>,
    /// `[u_min, u_max, v_min, v_max]`.
    pub domain: Option<Vec<Number>>,
    pub f: Option<String>,
    /// `[x_min, x_max, y_min, y_max, z_min, z_max]`.
    pub bbox: Option<Vec<Number>>,
}

impl SurfaceBlock {
    pub fn build(&self) -> Result<Surface<f64>, CliError> {
        let need = |field: &Option<String>, name: &str| {
            field.clone().ok_or_else(|| CliError::config(format!("[surface] kind = {:?} needs `{name}`", self.kind)))
        };
        let surface = match self.kind {
            SurfaceKind::Preset => presets::preset(&need(&self.preset, "preset")?)?,
            SurfaceKind::Parametric => {
                let domain = match &self.domain {
                    Some(d) => {
                        let [a, b, c, e] = values::<4>(d, "domain")?;
                        Domain::new((a, b), (c, e))
                    }
                    None => Domain::unbounded(),
                };
                let (x, y, z) = (need(&self.x, "x")?, need(&self.y, "y")?, need(&self.z, "z")?);
                ParametricSurface::new(&x, &y, &z, domain)?.into()
            }
            SurfaceKind::Implicit => {
                let mut s = ImplicitSurface::new(&need(&self.f, "f")?)?;
                if let Some(b) = &self.bbox {
                    let [x0, x1, y0, y1, z0, z1] = values::<6>(b, "bbox")?;
                    s = s.with_bounding_box(BoundingBox { min: Vector3::new(x0, y0, z0), max: Vector3::new(x1, y1, z1) });
                }
                s.into()
            }
        };
        Ok(surface)
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BranchChoice {
    Plus,
    Minus,
    Both,
}

impl BranchChoice {
    pub fn branches(self) -> &'static [Branch] {
        match self {
            BranchChoice::Plus => &[Branch::Plus],
            BranchChoice::Minus => &[Branch::Minus],
            BranchChoice::Both => &[Branch::Plus, Branch::Minus],
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceBlock {
    pub family: Family,
    pub axis: Vec<Number>,
    pub theta: Option<Number>,
    pub cos_theta: Option<Number>,
    pub start: Option<Vec<Number>>,
    pub point: Option<Vec<Number>>,
    #[serde(default = "default_branch")]
    pub branch: BranchChoice,
    #[serde(default = "default_step")]
    pub step: Number,
    pub s_max: Number,
}

fn default_branch() -> BranchChoice {
    BranchChoice::Plus
}

fn default_step() -> Number {
    Number::Float(1e-3)
}

impl TraceBlock {
    pub fn theta(&self) -> Result<f64, CliError> {
        match (&self.theta, &self.cos_theta) {
            (Some(t), None) => t.value(),
            (None, Some(c)) => {
                let c = c.value()?;
                if !(-1.0..=1.0).contains(&c) {
                    return Err(CliError::config(format!("cos_theta = {c} is outside [-1, 1]")));
                }
                Ok(c.acos())
            }
            _ => Err(CliError::config("give exactly one of `theta` and `cos_theta`")),
        }
    }

    pub fn initial(&self) -> Result<InitialPoint<f64>, CliError> {
        match (&self.start, &self.point) {
            (Some(s), None) => {
                let [u, v] = values::<2>(s, "start")?;
                Ok(InitialPoint::Parameter(u, v))
            }
            (None, Some(p)) => Ok(InitialPoint::Point(Vector3::from_array(values::<3>(p, "point")?))),
            _ => Err(CliError::config("give exactly one of `start` (u, v) and `point` (x, y, z)")),
        }
    }

    pub fn axis(&self) -> Result<Vector3<f64>, CliError> {
        Ok(Vector3::from_array(values::<3>(&self.axis, "axis")?))
    }

    /// Trace configuration for one branch, with command-line overrides.
    pub fn config(&self, branch: Branch, step: Option<f64>, s_max: Option<f64>) -> Result<TraceConfig<f64>, CliError> {
        let step = match step {
            Some(h) => h,
            None => self.step.value()?,
        };
        let s_max = match s_max {
            Some(s) => s,
            None => self.s_max.value()?,
        };
        TraceConfig::new(self.axis()?, self.theta()?, self.family, branch, self.initial()?, step, s_max)
            .map_err(|e| CliError::config(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyBlock {
    pub axis: bool,
    pub thm6_1: bool,
    pub thm6_2: bool,
    pub thm6_3: bool,
    pub thm7_1: bool,
    pub thm7_2: bool,
    pub classify: bool,
    pub constant_gate: f64,
    pub zero_gate: f64,
    pub edge: usize,
}

impl Default for VerifyBlock {
    fn default() -> Self {
        let g = crate::analysis::Gates::<f64>::default();
        Self {
            axis: true,
            thm6_1: true,
            thm6_2: true,
            thm6_3: true,
            thm7_1: true,
            thm7_2: true,
            classify: true,
            constant_gate: g.constant,
            zero_gate: g.zero,
            edge: g.edge,
        }
    }
}

impl VerifyBlock {
    pub fn gates(&self) -> crate::analysis::Gates<f64> {
        crate::analysis::Gates { constant: self.constant_gate, zero: self.zero_gate, edge: self.edge, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: String,
    pub prefix: String,
    pub diagnostics: String,
    pub format: Format,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { dir: "out".into(), prefix: "trace".into(), diagnostics: "diagnostics.json".into(), format: Format::Csv }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceBlock,
    #[serde(default)]
    pub trace: BTreeMap<String, TraceBlock>,
    #[serde(default)]
    pub verify: VerifyBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::config(format!("{}: {}", path.display(), e.message)))
    }

    /// Trace blocks in numeric order of their names where possible.
    pub fn traces(&self) -> Vec<(&str, &TraceBlock)> {
        let mut v: Vec<(&str, &TraceBlock)> = self.trace.iter().map(|(k, b)| (k.as_str(), b)).collect();
        v.sort_by(|a, b| match (a.0.parse::<u64>(), b.0.parse::<u64>()) {
            (Ok(x), Ok(y)) => x.cmp(&y),
            (Ok(_), Err(_)) => std::cmp::Ordering::Less,
            (Err(_), Ok(_)) => std::cmp::Ordering::Greater,
            _ => a.0.cmp(b.0),
        });
        v
    }
}
