//! Sample-based classification of a base vector field `X` against a Finsler
//! structure: projective, affine, conformal, homothetic, Killing and
//! volume-preserving, with estimates of the conformal factor `φ` and the
//! projective factor `ψ`.
//!
//! A verdict of `holds` means the defining residual stayed within tolerance
//! at every sample; it is evidence, not a proof. A residual between `tol` and
//! `10·tol` gives `indeterminate`.
//!
//! Residuals are normalised by the sum of the norms of the terms that cancel,
//! floored at 1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    divergence_with_scale, fundamental_form, hilbert_covector_jets, metric, norm, sasaki_metric, values,
    FinslerStructure, GeomError, Mat, SlitPoint,
};
use crate::jets::Jet;
use crate::lifts::{
    base_bracket, bracket_with_scale, complete_lift, horizontal_lift, lie_form_omega, lie_form_theta,
    lie_metric_sasaki, spray_field, tilde_lie_metric, BaseVectorField, TmField,
};
use crate::sampling::{draw_samples, random_base_field, SampleError, SamplePlan, Samples};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Indeterminate,
}

impl Verdict {
    /// `≤ tol` holds, `> 10·tol` fails, otherwise indeterminate.
    pub fn band(residual: f64, tol: f64) -> Verdict {
        if residual <= tol {
            Verdict::Holds
        } else if residual > 10.0 * tol || residual.is_nan() {
            Verdict::Fails
        } else {
            Verdict::Indeterminate
        }
    }

    pub fn all(verdicts: &[Verdict]) -> Verdict {
        if verdicts.contains(&Verdict::Fails) {
            Verdict::Fails
        } else if verdicts.contains(&Verdict::Indeterminate) {
            Verdict::Indeterminate
        } else {
            Verdict::Holds
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Projective,
    Affine,
    Conformal,
    Homothetic,
    Killing,
    VolumePreserving,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::Projective,
        Property::Affine,
        Property::Conformal,
        Property::Homothetic,
        Property::Killing,
        Property::VolumePreserving,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Property::Projective => "projective",
            Property::Affine => "affine",
            Property::Conformal => "conformal",
            Property::Homothetic => "homothetic",
            Property::Killing => "killing",
            Property::VolumePreserving => "volume_preserving",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassTolerance {
    pub rel_tol: f64,
    pub fibre_spread_tol: f64,
    pub constancy_tol: f64,
}

impl Default for ClassTolerance {
    fn default() -> Self {
        ClassTolerance {
            rel_tol: 1e-7,
            fibre_spread_tol: 1e-6,
            constancy_tol: 1e-6,
        }
    }
}

impl ClassTolerance {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        let all = [self.rel_tol, self.fibre_spread_tol, self.constancy_tol];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(ClassifyError::InvalidTolerance(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Sampling(#[from] SampleError),
    #[error("tolerances must be positive: {0}")]
    InvalidTolerance(String),
    #[error("field has dimension {field}, structure has {structure}")]
    Dimension { field: usize, structure: usize },
    #[error("verdicts violate the implication lattice: {0}")]
    Lattice(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub projective: Verdict,
    pub affine: Verdict,
    pub conformal: Verdict,
    pub homothetic: Verdict,
    pub killing: Verdict,
    pub volume_preserving: Verdict,
}

impl Verdicts {
    pub fn get(&self, p: Property) -> Verdict {
        match p {
            Property::Projective => self.projective,
            Property::Affine => self.affine,
            Property::Conformal => self.conformal,
            Property::Homothetic => self.homothetic,
            Property::Killing => self.killing,
            Property::VolumePreserving => self.volume_preserving,
        }
    }

    /// Killing ⇒ homothetic ⇒ conformal and affine ⇒ projective.
    pub fn check_lattice(&self) -> Result<(), ClassifyError> {
        let rules = [
            (self.killing, self.homothetic, "killing holds but homothetic does not"),
            (self.homothetic, self.conformal, "homothetic holds but conformal does not"),
            (self.affine, self.projective, "affine holds but projective does not"),
        ];
        for (premise, conclusion, message) in rules {
            if premise.holds() && !conclusion.holds() {
                return Err(ClassifyError::Lattice(message.into()));
            }
        }
        Ok(())
    }
}

/// Everything measured at one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleEval {
    pub base: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub energy: f64,
    /// `‖[X^c, S]‖`, normalised.
    pub affine: f64,
    pub projective_x: f64,
    pub projective_parallel: f64,
    pub psi: f64,
    /// `ψ̂(x, 2y)` against `2ψ̂(x, y)`.
    pub projective_homogeneity: f64,
    /// `[X^c, Y^h] - [X, Y]^h` over five random `Y`.
    pub horizontal: f64,
    pub phi: f64,
    pub item_i: f64,
    pub item_iii: f64,
    pub item_v: f64,
    pub divergence: f64,
    pub volume: f64,
    /// `|div X^c - n φ̂|`.
    pub divergence_factor: f64,
    pub sasaki: f64,
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

fn mat_norm(a: &Mat) -> f64 {
    crate::geometry::frobenius(a)
}

fn mat_combo(a: &Mat, b: &Mat, c: f64) -> Mat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(u, v)| u - c * v).collect())
        .collect()
}

fn psi_of(w: &[f64], y: &[f64]) -> f64 {
    let n = y.len();
    let wy = &w[n..];
    wy.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / y.iter().map(|v| v * v).sum::<f64>()
}

/// Conformal factor estimate `X^c E / E` as a jet of order 1.
fn phi_jet(fs: &FinslerStructure, xc: &dyn TmField, p: &SlitPoint) -> Result<Jet, GeomError> {
    let e = fs.energy_jet(p, 2)?;
    let xi = xc.jets(p, 1)?;
    let mut xe = e.zero_like().truncate(1);
    for (a, c) in xi.iter().enumerate() {
        xe = xe + c * e.derivative(a).map_err(|err| p.jet_err(err))?;
    }
    xe.try_div(&e.truncate(1)).map_err(|err| p.jet_err(err))
}

pub fn evaluate_sample(
    fs: &FinslerStructure,
    x: &BaseVectorField,
    p: &SlitPoint,
    base: usize,
    plan: &SamplePlan,
    index: usize,
) -> Result<SampleEval, GeomError> {
    let n = p.dim();
    let xc = complete_lift(x.clone());
    let s = spray_field(fs);

    let (w, sw) = bracket_with_scale(xc.as_ref(), s.as_ref(), p)?;
    let psi = psi_of(&w, &p.y);
    let affine = rel(norm(&w), sw);
    let projective_x = rel(norm(&w[..n]), sw);
    let par: Vec<f64> = (0..n).map(|i| w[n + i] - psi * p.y[i]).collect();
    let projective_parallel = rel(norm(&par), sw);
    let p2 = p.with_fibre(p.y.iter().map(|v| 2.0 * v).collect());
    let (w2, _) = bracket_with_scale(xc.as_ref(), s.as_ref(), &p2)?;
    let psi2 = psi_of(&w2, &p2.y);
    let projective_homogeneity = rel((psi2 - 2.0 * psi).abs(), psi2.abs() + 2.0 * psi.abs());

    let mut rng = plan.sample_rng(index);
    let mut horizontal: f64 = 0.0;
    for _ in 0..5 {
        let y: BaseVectorField = random_base_field(&mut rng, n).into_field();
        let yh = horizontal_lift(fs, y.clone());
        let (a, sa) = bracket_with_scale(xc.as_ref(), yh.as_ref(), p)?;
        let b = values(&horizontal_lift(fs, base_bracket(x.clone(), y)).jets(p, 0)?);
        let d: Vec<f64> = a.iter().zip(&b).map(|(u, v)| u - v).collect();
        horizontal = horizontal.max(rel(norm(&d), sa + norm(&b)));
    }

    let energy = fs.energy(p)?;
    let phi_j = phi_jet(fs, xc.as_ref(), p)?;
    let phi = phi_j.value();

    let lg = tilde_lie_metric(fs, x, p)?;
    let g = metric(fs, p)?;
    let item_i = rel(mat_norm(&mat_combo(&lg, &g, phi)), mat_norm(&lg) + phi.abs() * mat_norm(&g));

    let ltheta = lie_form_theta(fs, xc.as_ref(), p)?;
    let theta = values(&hilbert_covector_jets(fs, p, 0)?);
    let d: Vec<f64> = ltheta.iter().zip(&theta).map(|(a, b)| a - phi * b).collect();
    let item_iii = rel(norm(&d), norm(&ltheta) + phi.abs() * norm(&theta));

    // L ω = φ ω + dφ ∧ θ, with dφ taken from the x-gradient of φ̂
    let lw = lie_form_omega(fs, xc.as_ref(), p)?;
    let w_mat = fundamental_form(fs, p)?;
    let mut dphi = vec![0.0; 2 * n];
    for (i, d) in dphi.iter_mut().enumerate().take(n) {
        *d = phi_j.first(i);
    }
    let wedge: Mat = (0..2 * n)
        .map(|a| (0..2 * n).map(|b| dphi[a] * theta[b] - dphi[b] * theta[a]).collect())
        .collect();
    let resid_v = mat_combo(&mat_combo(&lw, &w_mat, phi), &wedge, 1.0);
    let item_v = rel(
        mat_norm(&resid_v),
        mat_norm(&lw) + phi.abs() * mat_norm(&w_mat) + mat_norm(&wedge),
    );

    let (divergence, div_scale) = divergence_with_scale(fs, xc.as_ref(), p)?;
    let volume = rel(divergence.abs(), div_scale);
    let divergence_factor = (divergence - n as f64 * phi).abs();

    let ls = lie_metric_sasaki(fs, xc.as_ref(), p)?;
    let gs = sasaki_metric(fs, p)?;
    let sasaki = rel(mat_norm(&mat_combo(&ls, &gs, phi)), mat_norm(&ls) + phi.abs() * mat_norm(&gs));

    Ok(SampleEval {
        base,
        x: p.x.clone(),
        y: p.y.clone(),
        energy,
        affine,
        projective_x,
        projective_parallel,
        psi,
        projective_homogeneity,
        horizontal,
        phi,
        item_i,
        item_iii,
        item_v,
        divergence,
        volume,
        divergence_factor,
        sasaki,
    })
}

/// Evaluates all samples in parallel; results keep the sample order.
pub fn evaluate_samples(
    fs: &FinslerStructure,
    x: &BaseVectorField,
    samples: &Samples,
    plan: &SamplePlan,
) -> Result<Vec<SampleEval>, GeomError> {
    let points: Vec<(usize, &SlitPoint)> = samples.points().collect();
    points
        .par_iter()
        .enumerate()
        .map(|(i, (b, p))| evaluate_sample(fs, x, p, *b, plan, i))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub statement: String,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremStatus {
    Passed,
    Failed,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremRecord {
    pub name: String,
    pub statement: String,
    pub premise: String,
    pub status: TheoremStatus,
    pub residual: Option<f64>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalFactor {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Largest spread of `φ̂` along a single fibre, normalised.
    pub fibre_spread: f64,
    /// Spread of `φ̂` over all samples, normalised.
    pub global_spread: f64,
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub psi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorEstimates {
    pub conformal: ConformalFactor,
    /// `α`, reported when the field is homothetic.
    pub homothety_constant: Option<f64>,
    pub projective: Vec<ProjectiveSample>,
    pub divergence: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub base_points: usize,
    pub fibre_points_per_base: usize,
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub command: String,
    pub finsler: String,
    pub field: String,
    pub dim: usize,
    pub plan: SamplePlan,
    pub tolerances: ClassTolerance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub report_version: u32,
    pub artifact_version: String,
    pub config: ConfigEcho,
    pub samples: SampleSummary,
    pub verdicts: Verdicts,
    pub factor_estimates: FactorEstimates,
    pub checks: Vec<CheckRecord>,
    pub theorem_checks: Vec<TheoremRecord>,
    pub semantics: String,
}

impl ClassificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn theorem(&self, name: &str) -> Option<&TheoremRecord> {
        self.theorem_checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serialisable")
    }
}

fn stats(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut max: f64 = 0.0;
    let mut total = 0.0;
    let mut count = 0usize;
    for v in values {
        max = if v.is_nan() { f64::NAN } else { max.max(v) };
        total += v;
        count += 1;
    }
    (max, if count == 0 { 0.0 } else { total / count as f64 })
}

fn check(
    evals: &[SampleEval],
    name: &str,
    statement: &str,
    tol: f64,
    f: impl Fn(&SampleEval) -> f64,
) -> CheckRecord {
    let (max, mean) = stats(evals.iter().map(f));
    CheckRecord {
        name: name.into(),
        statement: statement.into(),
        max_residual: max,
        mean_residual: mean,
        tolerance: tol,
        verdict: Verdict::band(max, tol),
    }
}

fn spread(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    if values.is_empty() {
        0.0
    } else {
        (hi - lo) / scale
    }
}

/// Aggregates per-sample measurements into verdicts, factor estimates and
/// check records.
pub fn aggregate(evals: &[SampleEval], dim: usize, tol: &ClassTolerance) -> (Verdicts, FactorEstimates, Vec<CheckRecord>, Vec<TheoremRecord>) {
    let t = tol.rel_tol;
    let mut checks = vec![
        check(evals, "lie_symmetry", "[X^c, S] = 0", t, |e| e.affine),
        check(evals, "projective_vertical", "[X^c, S] has no horizontal part", t, |e| e.projective_x),
        check(evals, "projective_parallel", "[X^c, S] is parallel to C", t, |e| e.projective_parallel),
        check(evals, "projective_homogeneity", "C ψ = ψ for the projective factor", t, |e| {
            e.projective_homogeneity
        }),
        check(
            evals,
            "affine_horizontal_lifts",
            "[X^c, Y^h] = [X, Y]^h for a Lie symmetry X and random Y",
            t,
            |e| e.horizontal,
        ),
        check(evals, "conformal_item_i", "L_{X^c} g = φ g", t, |e| e.item_i),
        check(evals, "conformal_item_iii", "L_{X^c} θ = φ θ", t, |e| e.item_iii),
        check(evals, "conformal_item_v", "L_{X^c} ω = φ ω + dφ ∧ d_J E", t, |e| e.item_v),
        check(evals, "volume", "div X^c = 0 for the Dazord volume", t, |e| e.volume),
    ];

    // item (ii): φ̂ = X^c E / E must be constant along each fibre
    let bases = evals.iter().map(|e| e.base).max().map_or(0, |b| b + 1);
    let mut fibre_spreads = Vec::with_capacity(bases);
    for b in 0..bases {
        let phis: Vec<f64> = evals.iter().filter(|e| e.base == b).map(|e| e.phi).collect();
        fibre_spreads.push(spread(&phis));
    }
    let (fibre_spread, mean_fibre) = stats(fibre_spreads.iter().copied());
    checks.insert(
        5,
        CheckRecord {
            name: "conformal_item_ii".into(),
            statement: "X^c E = φ E with φ constant along fibres".into(),
            max_residual: fibre_spread,
            mean_residual: mean_fibre,
            tolerance: tol.fibre_spread_tol,
            verdict: Verdict::band(fibre_spread, tol.fibre_spread_tol),
        },
    );
    let verdict_of = |name: &str| checks.iter().find(|c| c.name == name).map(|c| c.verdict).unwrap();

    let affine = match verdict_of("lie_symmetry") {
        Verdict::Holds => verdict_of("affine_horizontal_lifts"),
        other => other,
    };
    let projective = Verdict::all(&[
        verdict_of("projective_vertical"),
        verdict_of("projective_parallel"),
        verdict_of("projective_homogeneity"),
    ]);

    let phis: Vec<f64> = evals.iter().map(|e| e.phi).collect();
    let same_sign = evals.iter().all(|e| e.energy > 0.0) || evals.iter().all(|e| e.energy < 0.0);
    let conformal = if !same_sign {
        Verdict::Indeterminate
    } else {
        Verdict::all(&[
            verdict_of("conformal_item_ii"),
            verdict_of("conformal_item_i"),
            verdict_of("conformal_item_iii"),
        ])
    };
    let global_spread = spread(&phis);
    let alpha = if phis.is_empty() {
        0.0
    } else {
        phis.iter().sum::<f64>() / phis.len() as f64
    };
    let homothetic = match conformal {
        Verdict::Holds => Verdict::band(global_spread, tol.constancy_tol),
        other => other,
    };
    let killing = match homothetic {
        Verdict::Holds => Verdict::band(alpha.abs(), t),
        other => other,
    };
    let volume_preserving = verdict_of("volume");
    let verdicts = Verdicts {
        projective,
        affine,
        conformal,
        homothetic,
        killing,
        volume_preserving,
    };

    let (max_affine, _) = stats(evals.iter().map(|e| e.affine));
    let max_abs_phi = phis.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let (max_div_factor, _) = stats(evals.iter().map(|e| e.divergence_factor));
    let (max_sasaki, _) = stats(evals.iter().map(|e| e.sasaki));
    let theorem = |name: &str, statement: &str, premise: &str, applies: bool, residual: f64, tol: f64| {
        let status = if !applies {
            TheoremStatus::NotApplicable
        } else if residual <= tol {
            TheoremStatus::Passed
        } else {
            TheoremStatus::Failed
        };
        TheoremRecord {
            name: name.into(),
            statement: statement.into(),
            premise: premise.into(),
            status,
            residual: applies.then_some(residual),
            tolerance: tol,
        }
    };
    let h = |v: Verdict| v.holds();
    let theorems = vec![
        theorem(
            "homothetic_is_affine",
            "a homothetic field is a Lie symmetry of the canonical spray",
            "homothetic",
            h(homothetic),
            max_affine,
            t,
        ),
        theorem(
            "projective_conformal_is_homothetic",
            "a projective conformal field is homothetic",
            "projective and conformal",
            h(projective) && h(conformal),
            global_spread,
            tol.constancy_tol,
        ),
        theorem(
            "volume_projective_is_affine",
            "a projective field preserving the Dazord volume is affine",
            "volume_preserving and projective",
            h(volume_preserving) && h(projective),
            max_affine,
            t,
        ),
        theorem(
            "volume_conformal_is_killing",
            "a conformal field preserving the Dazord volume is isometric",
            "volume_preserving and conformal",
            h(volume_preserving) && h(conformal),
            max_abs_phi,
            t,
        ),
        theorem(
            "divergence_of_conformal_lift",
            "div X^c = n φ for a conformal field",
            "conformal",
            h(conformal),
            max_div_factor,
            tol.constancy_tol,
        ),
        theorem(
            "conformal_sasaki",
            "an affine conformal field is conformal for the Sasaki metric with the same factor",
            "affine and conformal",
            h(affine) && h(conformal),
            max_sasaki,
            tol.constancy_tol,
        ),
    ];

    let (lo, hi) = phis
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    let factors = FactorEstimates {
        conformal: ConformalFactor {
            mean: alpha,
            min: lo,
            max: hi,
            fibre_spread,
            global_spread,
            samples: phis,
        },
        homothety_constant: homothetic.holds().then_some(alpha),
        projective: evals
            .iter()
            .map(|e| ProjectiveSample {
                x: e.x.clone(),
                y: e.y.clone(),
                psi: e.psi,
            })
            .collect(),
        divergence: evals.iter().map(|e| e.divergence).collect(),
    };
    let _ = dim;
    (verdicts, factors, checks, theorems)
}

const SEMANTICS: &str = "verdicts state consistency with each property at the sampled points within tolerance; \
residuals between tol and 10*tol are reported as indeterminate";

/// Runs every detector and the theorem suite.
pub fn classify(
    fs: &FinslerStructure,
    x: &BaseVectorField,
    plan: &SamplePlan,
    tol: &ClassTolerance,
) -> Result<ClassificationReport, ClassifyError> {
    tol.validate()?;
    if x.dim() != fs.dim() {
        return Err(ClassifyError::Dimension {
            field: x.dim(),
            structure: fs.dim(),
        });
    }
    let samples = draw_samples(fs, plan)?;
    let evals = evaluate_samples(fs, x, &samples, plan)?;
    let (verdicts, factor_estimates, checks, theorem_checks) = aggregate(&evals, fs.dim(), tol);
    verdicts.check_lattice()?;
    Ok(ClassificationReport {
        report_version: REPORT_VERSION,
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        config: ConfigEcho {
            command: "classify".into(),
            finsler: fs.name.clone(),
            field: x.label(),
            dim: fs.dim(),
            plan: plan.clone(),
            tolerances: *tol,
        },
        samples: SampleSummary {
            base_points: samples.groups.len(),
            fibre_points_per_base: plan.fibre_points_per_base,
            accepted: samples.len(),
            rejected: samples.rejected,
        },
        verdicts,
        factor_estimates,
        checks,
        theorem_checks,
        semantics: SEMANTICS.into(),
    })
}

/// Projective verdict and the samples of `ψ̂`.
pub fn projective_test(
    fs: &FinslerStructure,
    x: &BaseVectorField,
    plan: &SamplePlan,
    tol: &ClassTolerance,
) -> Result<(Verdict, Vec<f64>), ClassifyError> {
    let r = classify(fs, x, plan, tol)?;
    let psi = r.factor_estimates.projective.iter().map(|s| s.psi).collect();
    Ok((r.verdicts.projective, psi))
}

pub fn affine_test(
    fs: &FinslerStructure,
    x: &BaseVectorField,
    plan: &SamplePlan,
    tol: &ClassTolerance,
) -> Result<Verdict, ClassifyError> {
    Ok(classify(fs, x, plan, tol)?.verdicts.affine)
}

/// Conformal verdict and the samples of `φ̂`.
pub fn conformal_test(
    fs: &FinslerStructure,
    x: &BaseVectorField,
    plan: &SamplePlan,
    tol: &ClassTolerance,
) -> Result<(Verdict, Vec<f64>), ClassifyError> {
    let r = classify(fs, x, plan, tol)?;
    Ok((r.verdicts.conformal, r.factor_estimates.conformal.samples))
}

/// Homothetic and Killing verdicts with `α`.
pub fn homothetic_test(
    fs: &FinslerStructure,
    x: &BaseVectorField,
    plan: &SamplePlan,
    tol: &ClassTolerance,
) -> Result<(Verdict, Verdict, f64), ClassifyError> {
    let r = classify(fs, x, plan, tol)?;
    Ok((r.verdicts.homothetic, r.verdicts.killing, r.factor_estimates.conformal.mean))
}

pub fn volume_test(
    fs: &FinslerStructure,
    x: &BaseVectorField,
    plan: &SamplePlan,
    tol: &ClassTolerance,
) -> Result<Verdict, ClassifyError> {
    Ok(classify(fs, x, plan, tol)?.verdicts.volume_preserving)
}

pub fn theorem_suite(
    fs: &FinslerStructure,
    x: &BaseVectorField,
    plan: &SamplePlan,
    tol: &ClassTolerance,
) -> Result<Vec<TheoremRecord>, ClassifyError> {
    Ok(classify(fs, x, plan, tol)?.theorem_checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{field_from_spec, finsler_from_spec};

    fn run(finsler: &str, field: &str, dim: usize) -> ClassificationReport {
        let m = finsler_from_spec(finsler, dim).unwrap();
        let x = field_from_spec(field, dim).unwrap().into_field();
        let mut plan = SamplePlan::for_region(&m.region, 7);
        plan.num_base_points = 6;
        plan.fibre_points_per_base = 3;
        classify(&m.structure, &x, &plan, &ClassTolerance::default()).unwrap()
    }

    #[test]
    fn bands() {
        assert_eq!(Verdict::band(1e-8, 1e-7), Verdict::Holds);
        assert_eq!(Verdict::band(5e-7, 1e-7), Verdict::Indeterminate);
        assert_eq!(Verdict::band(2e-6, 1e-7), Verdict::Fails);
        assert_eq!(Verdict::band(f64::NAN, 1e-7), Verdict::Fails);
    }

    #[test]
    fn lattice_violation_is_an_error() {
        let v = Verdicts {
            projective: Verdict::Fails,
            affine: Verdict::Holds,
            conformal: Verdict::Holds,
            homothetic: Verdict::Holds,
            killing: Verdict::Holds,
            volume_preserving: Verdict::Holds,
        };
        assert!(matches!(v.check_lattice(), Err(ClassifyError::Lattice(_))));
    }

    #[test]
    fn euclidean_radial() {
        let r = run("builtin:euclidean", "builtin:radial", 2);
        assert_eq!(r.verdicts.homothetic, Verdict::Holds);
        assert_eq!(r.verdicts.killing, Verdict::Fails);
        assert_eq!(r.verdicts.affine, Verdict::Holds);
        assert_eq!(r.verdicts.volume_preserving, Verdict::Fails);
        assert!((r.factor_estimates.homothety_constant.unwrap() - 2.0).abs() < 1e-12);
        assert!(r.factor_estimates.divergence.iter().all(|d| (d - 4.0).abs() < 1e-12));
    }

    #[test]
    fn euclidean_x1_squared_is_not_projective() {
        let r = run("builtin:euclidean", "expr:[x1^2, 0]", 2);
        assert_eq!(r.verdicts.projective, Verdict::Fails);
    }

    #[test]
    fn projective_quadratic_factor() {
        let r = run("builtin:euclidean", "builtin:projective_quadratic", 2);
        assert_eq!(r.verdicts.projective, Verdict::Holds);
        assert_eq!(r.verdicts.affine, Verdict::Fails);
        for s in &r.factor_estimates.projective {
            assert!((s.psi + 2.0 * s.y[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn report_serialises_with_version() {
        let r = run("builtin:polar", "builtin:translation?v=0,1", 2);
        let json = r.to_json();
        assert!(json.contains("\"report_version\": 1"));
        let back: ClassificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.verdicts, r.verdicts);
    }
}
