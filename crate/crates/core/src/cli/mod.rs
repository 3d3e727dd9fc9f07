//! Command-line front end: `trace`, `analyze` and `catalog`.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 inadmissible
//! initial point, 4 runtime failure, 5 curve or start point off the surface.

pub mod config;
pub mod curve_io;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::analysis::{AnalysisError, AnalyzedCurve};
use crate::frame::{surface_normals, FrameError, DEFAULT_ON_SURFACE_TOL};
use crate::surface::{presets, SurfaceError};
use crate::tracer::{trace, TraceError};

use config::{BranchChoice, Format, RunConfig};
use report::{curve_report, CurveContext};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INADMISSIBLE: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;
pub const EXIT_OFF_SURFACE: i32 = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, message)
    }

    pub fn io(e: csv::Error) -> Self {
        Self::new(EXIT_RUNTIME, e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<SurfaceError> for CliError {
    fn from(e: SurfaceError) -> Self {
        Self::config(format!("surface: {e}"))
    }
}

fn frame_error(e: FrameError) -> CliError {
    match e {
        FrameError::OffSurface { .. } => CliError::new(EXIT_OFF_SURFACE, e.to_string()),
        FrameError::TooFewSamples { .. }
        | FrameError::LengthMismatch
        | FrameError::NonIncreasing { .. }
        | FrameError::NonFinite => CliError::config(e.to_string()),
        _ => CliError::new(EXIT_RUNTIME, e.to_string()),
    }
}

fn analysis_error(e: AnalysisError) -> CliError {
    match e {
        AnalysisError::Frame(f) => frame_error(f),
        AnalysisError::TooFewSamples { .. } | AnalysisError::GridMismatch(_) => CliError::config(e.to_string()),
        AnalysisError::Degenerate(_) => CliError::new(EXIT_RUNTIME, e.to_string()),
    }
}

/// Failure to start a trace.
fn start_error(e: TraceError) -> CliError {
    match e {
        TraceError::Inadmissible { which, value } => {
            CliError::new(EXIT_INADMISSIBLE, format!("discriminant {which} negative at initial point ({value:e})"))
        }
        TraceError::Degenerate(_)
        | TraceError::NoSolution(_)
        | TraceError::NotOnLevelSet { .. }
        | TraceError::LevelSetSingular { .. } => CliError::new(EXIT_INADMISSIBLE, e.to_string()),
        TraceError::InvalidConfig(_) | TraceError::Unsupported(_) => CliError::config(e.to_string()),
        TraceError::Surface(SurfaceError::OffSurface { .. }) | TraceError::Frame(FrameError::OffSurface { .. }) => {
            CliError::new(EXIT_OFF_SURFACE, e.to_string())
        }
        TraceError::Surface(SurfaceError::OutOfDomain { .. } | SurfaceError::OutOfBox { .. }) => {
            CliError::new(EXIT_INADMISSIBLE, e.to_string())
        }
        _ => CliError::new(EXIT_RUNTIME, e.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(name = "darboux-helix", version, about = "Constant-angle curves on surfaces: trace and verify")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace every `[trace.N]` block of a config; write curve files and diagnostics.
    Trace {
        config: PathBuf,
        /// Output directory (overrides `[output] dir`).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Step size for every trace.
        #[arg(long)]
        step: Option<f64>,
        /// Arc-length budget for every trace.
        #[arg(long)]
        s_max: Option<f64>,
        /// Branch(es) for every trace.
        #[arg(long, value_enum)]
        branch: Option<BranchChoice>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Attach frames to a curve file and run the checks.
    Analyze {
        curve: PathBuf,
        /// Config holding the `[surface]` (and optionally trace) blocks.
        #[arg(long)]
        surface: PathBuf,
        /// Trace block whose family, axis and angle give the constraint residual.
        #[arg(long)]
        trace: Option<String>,
        /// Write the diagnostics here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List the surface presets.
    Catalog,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Trace { config, out_dir, step, s_max, branch, format } => {
            let opts = TraceOptions { out_dir, step, s_max, branch, format };
            cmd_trace(&config, &opts).map(|_| ())
        }
        Command::Analyze { curve, surface, trace, output } => {
            let doc = cmd_analyze(&curve, &surface, trace.as_deref())?;
            let text = to_text(&doc);
            match output {
                Some(path) => write_file(&path, text.as_bytes()),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Catalog => {
            print!("{}", catalog());
            Ok(())
        }
    }
}

fn to_text(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("JSON values serialize");
    s.push('\n');
    s
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::new(EXIT_RUNTIME, format!("cannot write {}: {e}", path.display())))
}

#[derive(Debug, Clone, Default)]
pub struct TraceOptions {
    pub out_dir: Option<PathBuf>,
    pub step: Option<f64>,
    pub s_max: Option<f64>,
    pub branch: Option<BranchChoice>,
    pub format: Option<Format>,
}

/// Files written by a trace run.
#[derive(Debug, Clone)]
pub struct TraceOutput {
    pub curves: Vec<PathBuf>,
    pub diagnostics: PathBuf,
}

pub fn cmd_trace(config_path: &Path, opts: &TraceOptions) -> Result<TraceOutput, CliError> {
    let cfg = RunConfig::load(config_path)?;
    let surface = cfg.surface.build()?;
    if cfg.trace.is_empty() {
        return Err(CliError::config("config has no [trace.N] blocks"));
    }
    let _format = opts.format.unwrap_or(cfg.output.format);
    let dir = opts.out_dir.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    fs::create_dir_all(&dir).map_err(|e| CliError::new(EXIT_RUNTIME, format!("cannot create {}: {e}", dir.display())))?;

    // Validate every block before tracing anything.
    let mut jobs = Vec::new();
    for (name, block) in cfg.traces() {
        for &branch in opts.branch.unwrap_or(block.branch).branches() {
            let tc = block.config(branch, opts.step, opts.s_max).map_err(|e| CliError::config(format!("[trace.{name}]: {}", e.message)))?;
            jobs.push((name, branch, tc));
        }
    }

    let mut curves = Vec::new();
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    let mut first_error: Option<CliError> = None;
    for (name, branch, tc) in jobs {
        let label = format!("trace {name} ({branch})");
        let outcome = trace(&surface, &tc).map_err(start_error).and_then(|res| {
            if res.len() < 2 {
                return Err(CliError::new(
                    EXIT_RUNTIME,
                    format!("only {} sample(s): {}", res.len(), res.detail.clone().unwrap_or_else(|| res.termination.to_string())),
                ));
            }
            let analyzed = AnalyzedCurve::from_trace(&res).map_err(analysis_error)?;
            Ok((res, analyzed))
        });
        match outcome {
            Ok((res, analyzed)) => {
                let file = format!("{}-{name}-{branch}.csv", cfg.output.prefix);
                let path = dir.join(&file);
                let mut buf = Vec::new();
                curve_io::write_curve(&mut buf, &analyzed)?;
                write_file(&path, &buf)?;
                let ctx = CurveContext {
                    name: Some(name.to_string()),
                    branch: Some(branch.to_string()),
                    file: Some(file),
                    constraint: Some((tc.family, tc.axis, tc.theta.cos())),
                    termination: Some(res.termination.to_string()),
                    detail: res.detail.clone(),
                };
                println!(
                    "{label}: {} samples to s = {}, {}, constraint drift {:.3e} -> {}",
                    res.len(),
                    res.curve.s().last().copied().unwrap_or(0.0),
                    res.termination,
                    res.diagnostics.constraint_max(),
                    path.display()
                );
                reports.push(curve_report(&analyzed, &ctx, &surface, &cfg.verify));
                curves.push(path);
            }
            Err(e) => {
                failures.push(json!({ "name": name, "branch": branch.to_string(), "error": e.message, "exit_code": e.code }));
                match &mut first_error {
                    Some(first) => first.message.push_str(&format!("\nerror: {label}: {}", e.message)),
                    None => first_error = Some(CliError::new(e.code, format!("{label}: {}", e.message))),
                }
            }
        }
    }
    let doc = json!({ "command": "trace", "curves": reports, "failures": failures });
    let diagnostics = dir.join(&cfg.output.diagnostics);
    write_file(&diagnostics, to_text(&doc).as_bytes())?;
    match first_error {
        Some(e) => Err(e),
        None => Ok(TraceOutput { curves, diagnostics }),
    }
}

pub fn cmd_analyze(curve_path: &Path, config_path: &Path, trace_name: Option<&str>) -> Result<Value, CliError> {
    let cfg = RunConfig::load(config_path)?;
    let surface = cfg.surface.build()?;
    let constraint = match trace_name {
        Some(name) => {
            let block = cfg.trace.get(name).ok_or_else(|| CliError::config(format!("no [trace.{name}] block")))?;
            let axis = block.axis()?.try_normalize().ok_or_else(|| CliError::config("zero axis"))?;
            Some((block.family, axis, block.theta()?.cos()))
        }
        None => None,
    };
    let file = fs::File::open(curve_path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", curve_path.display())))?;
    let data = curve_io::read_curve(std::io::BufReader::new(file))?;
    let analyzed = match data.frames {
        Some(frames) => {
            surface_normals(&data.curve, &surface, DEFAULT_ON_SURFACE_TOL).map_err(frame_error)?;
            AnalyzedCurve::new(data.curve, frames)
        }
        None => AnalyzedCurve::on_surface(data.curve, &surface),
    }
    .map_err(analysis_error)?;
    let ctx = CurveContext {
        name: trace_name.map(str::to_string),
        file: curve_path.file_name().map(|f| f.to_string_lossy().into_owned()),
        constraint,
        ..Default::default()
    };
    Ok(json!({ "command": "analyze", "curves": [curve_report(&analyzed, &ctx, &surface, &cfg.verify)] }))
}

pub fn catalog() -> String {
    let mut out = String::new();
    for p in presets::CATALOG {
        let (kind, body) = match p.kind {
            presets::PresetKind::Parametric => {
                let e = p.expressions;
                ("parametric", format!("X(u,v) = ({}, {}, {})", e[0], e[1], e[2]))
            }
            presets::PresetKind::Implicit => ("implicit", format!("f(x,y,z) = {}", p.expressions[0])),
        };
        out.push_str(&format!("{:<20} {:<10} {}\n", p.name, kind, body));
        if let Some([a, b, c, d]) = p.domain {
            out.push_str(&format!("{:<31} u in [{a}, {b}], v in [{c}, {d}]\n", ""));
        }
        out.push_str(&format!("{:<31} {}\n", "", p.description));
    }
    out
}
