//! Command-line surface. `main` parses arguments with clap and hands a
//! [`RunConfig`] to one of the `cmd_*` functions.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{classify, ClassTolerance, ClassificationReport, ClassifyError, REPORT_VERSION};
use crate::geometry::{connection, tension, torsion, FinslerStructure, GeomError, Mat, SlitPoint};
use crate::identities::{run_identities, IdentityReport, IdentityTolerance};
use crate::lifts::basis_field;
use crate::models::{field_from_spec, finsler_from_spec, ModelEntry, ModelError};
use crate::sampling::{admissible, SampleError, SamplePlan};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_INDETERMINATE: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Degenerate(String),
    #[error("{0}")]
    Indeterminate(String),
    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => EXIT_INPUT,
            CliError::Degenerate(_) => EXIT_DEGENERATE,
            CliError::Indeterminate(_) => EXIT_INDETERMINATE,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::Parse(_) | GeomError::Dimension(_) => CliError::Input(e.to_string()),
            _ => CliError::Degenerate(e.to_string()),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Geometry(g) => g.into(),
            ClassifyError::Sampling(SampleError::InvalidPlan(m)) => CliError::Input(m),
            ClassifyError::Sampling(s @ SampleError::Exhausted { .. }) => CliError::Indeterminate(s.to_string()),
            ClassifyError::InvalidTolerance(_) | ClassifyError::Dimension { .. } => CliError::Input(e.to_string()),
            ClassifyError::Lattice(_) => CliError::Indeterminate(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "finslerkit", version, about = "Spray geometry and vector-field classification for Finsler structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a base vector field against the structure.
    Classify(ClassifyArgs),
    /// Run the identity battery on a structure.
    Identities(CommonArgs),
    /// Print the spray and connection coefficients at one point.
    Spray(SprayArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// `builtin:<name>?k=v,...` or `expr:<F>`.
    #[arg(long)]
    pub finsler: String,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub base_points: usize,
    #[arg(long, default_value_t = 5)]
    pub fibre_points: usize,
    /// Base box, `a:b` for every coordinate or `a1:b1,a2:b2,...`.
    #[arg(long)]
    pub r#box: Option<String>,
    /// `<rel>` or `rel=..,fibre=..,constancy=..`.
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// `builtin:<name>?k=v,...` or `expr:[X1, ..., Xn]`.
    #[arg(long)]
    pub field: String,
}

#[derive(Debug, Args)]
pub struct SprayArgs {
    #[arg(long)]
    pub finsler: String,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// `x1,...,xn;y1,...,yn`.
    #[arg(long)]
    pub at: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// Tolerance overrides given on the command line.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TolOverrides {
    pub rel: Option<f64>,
    pub fibre: Option<f64>,
    pub constancy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub finsler: String,
    pub field: Option<String>,
    pub dim: usize,
    pub seed: u64,
    pub base_points: usize,
    pub fibre_points: usize,
    pub x_box: Option<Vec<(f64, f64)>>,
    pub tolerances: TolOverrides,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub verbosity: u8,
}

impl RunConfig {
    pub fn new(command: &str, finsler: &str, field: Option<&str>, dim: usize) -> RunConfig {
        RunConfig {
            command: command.into(),
            finsler: finsler.into(),
            field: field.map(str::to_string),
            dim,
            seed: 0,
            base_points: 20,
            fibre_points: 5,
            x_box: None,
            tolerances: TolOverrides::default(),
            out: None,
            format: Format::Json,
            verbosity: 0,
        }
    }

    fn from_common(command: &str, a: &CommonArgs, field: Option<&str>) -> Result<RunConfig, CliError> {
        Ok(RunConfig {
            seed: a.seed,
            base_points: a.base_points,
            fibre_points: a.fibre_points,
            x_box: a.r#box.as_deref().map(|b| parse_box(b, a.dim)).transpose()?,
            tolerances: a.tol.as_deref().map(parse_tol).transpose()?.unwrap_or_default(),
            out: a.out.clone(),
            format: a.format,
            verbosity: a.verbose,
            ..RunConfig::new(command, &a.finsler, field, a.dim)
        })
    }

    pub fn plan(&self, entry: &ModelEntry) -> SamplePlan {
        let mut plan = SamplePlan::for_region(&entry.region, self.seed);
        plan.num_base_points = self.base_points;
        plan.fibre_points_per_base = self.fibre_points;
        if let Some(b) = &self.x_box {
            plan.x_box = b.clone();
        }
        plan
    }

    pub fn class_tolerance(&self) -> ClassTolerance {
        let d = ClassTolerance::default();
        ClassTolerance {
            rel_tol: self.tolerances.rel.unwrap_or(d.rel_tol),
            fibre_spread_tol: self.tolerances.fibre.unwrap_or(d.fibre_spread_tol),
            constancy_tol: self.tolerances.constancy.unwrap_or(d.constancy_tol),
        }
    }

    pub fn identity_tolerance(&self) -> IdentityTolerance {
        let d = IdentityTolerance::default();
        IdentityTolerance {
            rel_tol: self.tolerances.rel.unwrap_or(d.rel_tol),
            ..d
        }
    }
}

fn number(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Input(format!("`{s}` is not a number")))
}

pub fn parse_box(text: &str, dim: usize) -> Result<Vec<(f64, f64)>, CliError> {
    let intervals: Vec<(f64, f64)> = text
        .split(',')
        .map(|iv| {
            let (a, b) = iv
                .split_once(':')
                .ok_or_else(|| CliError::Input(format!("interval `{iv}` must be `a:b`")))?;
            Ok((number(a)?, number(b)?))
        })
        .collect::<Result<_, CliError>>()?;
    match intervals.len() {
        1 => Ok(vec![intervals[0]; dim]),
        k if k == dim => Ok(intervals),
        k => Err(CliError::Input(format!("box has {k} intervals, dimension is {dim}"))),
    }
}

pub fn parse_tol(text: &str) -> Result<TolOverrides, CliError> {
    let mut t = TolOverrides::default();
    if !text.contains('=') {
        t.rel = Some(number(text)?);
        return Ok(t);
    }
    for part in text.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("tolerance `{part}` must be `key=value`")))?;
        let v = Some(number(v)?);
        match k.trim() {
            "rel" => t.rel = v,
            "fibre" => t.fibre = v,
            "constancy" => t.constancy = v,
            other => return Err(CliError::Input(format!("unknown tolerance `{other}`"))),
        }
    }
    Ok(t)
}

/// Parses `x1,...,xn;y1,...,yn`.
pub fn parse_point(text: &str, dim: usize) -> Result<SlitPoint, CliError> {
    let (xs, ys) = text
        .split_once(';')
        .ok_or_else(|| CliError::Input(format!("point `{text}` must be `x1,...,xn;y1,...,yn`")))?;
    let list = |s: &str| s.split(',').map(number).collect::<Result<Vec<f64>, _>>();
    let (x, y) = (list(xs)?, list(ys)?);
    if x.len() != dim || y.len() != dim {
        return Err(CliError::Input(format!("point `{text}` does not have dimension {dim}")));
    }
    SlitPoint::new(x, y).map_err(|e| CliError::Degenerate(e.to_string()))
}

fn emit(out: &Option<PathBuf>, format: Format, json: &str, table: impl FnOnce() -> String) -> Result<(), CliError> {
    if let Some(path) = out {
        std::fs::write(path, format!("{json}\n")).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    }
    match (format, out) {
        (Format::Table, _) => print!("{}", table()),
        (Format::Json, None) => println!("{json}"),
        (Format::Json, Some(_)) => {}
    }
    Ok(())
}

fn sci(v: f64) -> String {
    format!("{v:.3e}")
}

pub fn render_classification(r: &ClassificationReport) -> String {
    let mut s = String::new();
    let c = &r.config;
    let _ = writeln!(s, "finsler  {}\nfield    {}\nsamples  {} accepted, {} rejected\n", c.finsler, c.field, r.samples.accepted, r.samples.rejected);
    let v = &r.verdicts;
    for (name, verdict) in [
        ("projective", v.projective),
        ("affine", v.affine),
        ("conformal", v.conformal),
        ("homothetic", v.homothetic),
        ("killing", v.killing),
        ("volume_preserving", v.volume_preserving),
    ] {
        let _ = writeln!(s, "{name:<20}{}", verdict.as_str());
    }
    if let Some(a) = r.factor_estimates.homothety_constant {
        let _ = writeln!(s, "{:<20}{a:.9}", "homothety constant");
    }
    let _ = writeln!(s, "\n{:<28}{:>12}{:>12}  verdict", "check", "max", "tol");
    for ch in &r.checks {
        let _ = writeln!(s, "{:<28}{:>12}{:>12}  {}", ch.name, sci(ch.max_residual), sci(ch.tolerance), ch.verdict.as_str());
    }
    let _ = writeln!(s, "\n{:<36}{:>12}  status", "theorem", "residual");
    for t in &r.theorem_checks {
        let res = t.residual.map(sci).unwrap_or_else(|| "-".into());
        let _ = writeln!(s, "{:<36}{:>12}  {:?}", t.name, res, t.status);
    }
    s
}

pub fn render_identities(r: &IdentityReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "finsler  {}\nsamples  {}\n", r.config.finsler, r.samples);
    let _ = writeln!(s, "{:<36}{:>12}{:>12}  result", "identity", "max", "tol");
    for c in &r.checks {
        let ok = if c.passed { "pass" } else { "FAIL" };
        let _ = writeln!(s, "{:<36}{:>12}{:>12}  {ok}", c.name, sci(c.max_residual), sci(c.tolerance));
    }
    s
}

fn load(config: &RunConfig) -> Result<ModelEntry, CliError> {
    let entry = finsler_from_spec(&config.finsler, config.dim)?;
    if config.verbosity > 0 {
        eprintln!("model {}: {}", entry.name, entry.notes);
    }
    Ok(entry)
}

/// Builds the classification report for `config`.
pub fn classify_report(config: &RunConfig) -> Result<ClassificationReport, CliError> {
    let entry = load(config)?;
    let field_spec = config
        .field
        .as_deref()
        .ok_or_else(|| CliError::Input("classify needs --field".into()))?;
    let field = field_from_spec(field_spec, config.dim)?.into_field();
    let plan = config.plan(&entry);
    let mut report = classify(&entry.structure, &field, &plan, &config.class_tolerance())?;
    report.config.field = field_spec.to_string();
    if config.verbosity > 0 {
        eprintln!("{} points accepted, {} rejected", report.samples.accepted, report.samples.rejected);
    }
    Ok(report)
}

/// Classifies, writes the report and returns the exit code.
pub fn cmd_classify(config: &RunConfig) -> i32 {
    finish(classify_report(config).and_then(|r| emit(&config.out, config.format, &r.to_json(), || render_classification(&r))))
}

pub fn identities_report(config: &RunConfig) -> Result<IdentityReport, CliError> {
    let entry = load(config)?;
    let plan = config.plan(&entry);
    Ok(run_identities(&entry.structure, &plan, &config.identity_tolerance())?)
}

pub fn cmd_identities(config: &RunConfig) -> i32 {
    finish(identities_report(config).and_then(|r| emit(&config.out, config.format, &r.to_json(), || render_identities(&r))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SprayReport {
    pub report_version: u32,
    pub artifact_version: String,
    pub finsler: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub energy: f64,
    /// `G^i`.
    pub spray: Vec<f64>,
    /// `N^i_j`.
    pub nonlinear: Mat,
    /// `B^i_jk`.
    pub berwald: Vec<Mat>,
    /// `max_i |N^i_j y^j - 2G^i|`.
    pub homogeneity_residual: f64,
    pub tension: Mat,
    /// Largest torsion component over coordinate field pairs.
    pub torsion: f64,
}

pub fn spray_report(finsler: &str, dim: usize, at: &str) -> Result<SprayReport, CliError> {
    let entry = finsler_from_spec(finsler, dim)?;
    let p = parse_point(at, dim)?;
    let fs: &FinslerStructure = &entry.structure;
    let builtin = finsler.trim().starts_with("builtin:");
    if (builtin && !entry.region.admits(&p)) || !admissible(fs, &p) {
        return Err(CliError::Degenerate(format!("{p} lies outside the safe region of {}", entry.name)));
    }
    let c = connection(fs, &p)?;
    let mut tor: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let v = torsion(fs, &p, &basis_field(dim, i), &basis_field(dim, j))?;
            tor = v.iter().fold(tor, |m, t| m.max(t.abs()));
        }
    }
    Ok(SprayReport {
        report_version: REPORT_VERSION,
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        finsler: finsler.to_string(),
        energy: fs.energy(&p)?,
        homogeneity_residual: c.euler_residual(&p.y),
        tension: tension(fs, &p)?,
        torsion: tor,
        spray: c.spray,
        nonlinear: c.nonlinear,
        berwald: c.berwald,
        x: p.x,
        y: p.y,
    })
}

pub fn render_spray(r: &SprayReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "finsler  {}\nx        {:?}\ny        {:?}", r.finsler, r.x, r.y);
    let _ = writeln!(s, "G        {:?}", r.spray);
    for (i, row) in r.nonlinear.iter().enumerate() {
        let _ = writeln!(s, "N[{}]     {:?}", i + 1, row);
    }
    let _ = writeln!(s, "N.y-2G   {}", sci(r.homogeneity_residual));
    let _ = writeln!(s, "torsion  {}", sci(r.torsion));
    s
}

pub fn cmd_spray(finsler: &str, dim: usize, at: &str, out: &Option<PathBuf>, format: Format) -> i32 {
    finish(spray_report(finsler, dim, at).and_then(|r| {
        let json = serde_json::to_string_pretty(&r).expect("report is serialisable");
        emit(out, format, &json, || render_spray(&r))
    }))
}

fn finish(r: Result<(), CliError>) -> i32 {
    match r {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Entry point used by the binary.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Classify(a) => match RunConfig::from_common("classify", &a.common, Some(&a.field)) {
            Ok(c) => cmd_classify(&c),
            Err(e) => finish(Err(e)),
        },
        Command::Identities(a) => match RunConfig::from_common("identities", &a, None) {
            Ok(c) => cmd_identities(&c),
            Err(e) => finish(Err(e)),
        },
        Command::Spray(a) => cmd_spray(&a.finsler, a.dim, &a.at, &a.out, a.format),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_and_tolerance_syntax() {
        assert_eq!(parse_box("0:1", 2).unwrap(), vec![(0.0, 1.0); 2]);
        assert_eq!(parse_box("0:1,2:3", 2).unwrap(), vec![(0.0, 1.0), (2.0, 3.0)]);
        assert!(parse_box("0:1,2:3", 3).is_err());
        assert_eq!(parse_tol("1e-6").unwrap().rel, Some(1e-6));
        let t = parse_tol("fibre=1e-5,constancy=2e-6").unwrap();
        assert_eq!((t.rel, t.fibre, t.constancy), (None, Some(1e-5), Some(2e-6)));
        assert!(parse_tol("speed=1").is_err());
    }

    #[test]
    fn spray_at_polar_point() {
        let r = spray_report("builtin:polar", 2, "2,0;1,1").unwrap();
        assert!((r.spray[0] + 1.0).abs() < 1e-12 && (r.spray[1] - 0.5).abs() < 1e-12);
        assert!(r.homogeneity_residual < 1e-12);
        let e = spray_report("builtin:polar", 2, "3,0;1,1").unwrap_err();
        assert_eq!(e.exit_code(), EXIT_DEGENERATE);
        assert_eq!(spray_report("builtin:polar", 2, "2,0").unwrap_err().exit_code(), EXIT_INPUT);
    }

    #[test]
    fn error_codes() {
        let c = RunConfig::new("classify", "builtin:nowhere", Some("builtin:radial"), 2);
        assert_eq!(classify_report(&c).unwrap_err().exit_code(), EXIT_INPUT);
        let c = RunConfig::new("classify", "expr:sqrt(y1^2+y2^2", Some("builtin:radial"), 2);
        assert_eq!(classify_report(&c).unwrap_err().exit_code(), EXIT_INPUT);
        let c = RunConfig::new("classify", "expr:sqrt(y1^2)", Some("builtin:radial"), 2);
        assert_eq!(classify_report(&c).unwrap_err().exit_code(), EXIT_INDETERMINATE);
    }
}
