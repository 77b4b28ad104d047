//! Built-in Finsler structures and vector fields, the spec-string syntax used
//! by the command line, and the ground-truth corpus.
//!
//! Spec strings are `builtin:<name>?k=v,...` or `expr:<source>`. Inside the
//! parameter list a token without `=` continues the previous value, so
//! `builtin:randers?b=0.3,0` sets `b = "0.3,0"`.

use thiserror::Error;

use crate::classify::{Property, Verdict};
use crate::exprlang::{self, parse, parse_field, Expr, ParseError};
use crate::geometry::{is_positive_definite, FinslerStructure, SlitPoint};
use crate::lifts::ExprField;

#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error("malformed spec `{0}`: expected `builtin:<name>?k=v,...` or `expr:<source>`")]
    Spec(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("parameter `{name}`: {message}")]
    Param { name: String, message: String },
    #[error("parse error in `{source_text}`: {error}")]
    Parse { source_text: String, error: ParseError },
}

fn param_err(name: &str, message: impl Into<String>) -> ModelError {
    ModelError::Param {
        name: name.to_string(),
        message: message.into(),
    }
}

/// A parsed spec string.
#[derive(Debug, Clone, PartialEq)]
pub enum Spec {
    Builtin {
        name: String,
        params: Vec<(String, String)>,
    },
    Expr(String),
}

pub fn parse_spec(text: &str) -> Result<Spec, ModelError> {
    let text = text.trim();
    if let Some(src) = text.strip_prefix("expr:") {
        return Ok(Spec::Expr(src.to_string()));
    }
    let rest = text
        .strip_prefix("builtin:")
        .ok_or_else(|| ModelError::Spec(text.to_string()))?;
    let (name, query) = match rest.split_once('?') {
        Some((n, q)) => (n, Some(q)),
        None => (rest, None),
    };
    if name.is_empty() {
        return Err(ModelError::Spec(text.to_string()));
    }
    let mut params: Vec<(String, String)> = Vec::new();
    for token in query.into_iter().flat_map(|q| q.split(',')) {
        match token.split_once('=') {
            Some((k, v)) => params.push((k.trim().to_string(), v.trim().to_string())),
            None => match params.last_mut() {
                Some((_, v)) => {
                    v.push(',');
                    v.push_str(token.trim());
                }
                None if token.trim().is_empty() => {}
                None => return Err(ModelError::Spec(text.to_string())),
            },
        }
    }
    Ok(Spec::Builtin {
        name: name.to_string(),
        params,
    })
}

struct Params<'a> {
    list: &'a [(String, String)],
}

impl<'a> Params<'a> {
    fn new(list: &'a [(String, String)], allowed: &[&str]) -> Result<Params<'a>, ModelError> {
        for (k, _) in list {
            if !allowed.contains(&k.as_str()) {
                return Err(param_err(k, "not accepted here"));
            }
        }
        Ok(Params { list })
    }

    fn get(&self, key: &str) -> Option<&'a str> {
        self.list
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn floats(&self, key: &str) -> Result<Option<Vec<f64>>, ModelError> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .ok()
                            .filter(|f| f.is_finite())
                            .ok_or_else(|| param_err(key, format!("`{t}` is not a number")))
                    })
                    .collect()
            })
            .transpose()
    }

    fn index(&self, key: &str, default: usize, n: usize) -> Result<usize, ModelError> {
        let Some(v) = self.get(key) else {
            return Ok(default);
        };
        match v.trim().parse::<usize>() {
            Ok(i) if (1..=n).contains(&i) => Ok(i),
            _ => Err(param_err(key, format!("index `{v}` out of range 1..={n}"))),
        }
    }

    fn dim(&self, dim: usize) -> Result<usize, ModelError> {
        match self.get("n") {
            None => Ok(dim),
            Some(v) => match v.trim().parse::<usize>() {
                Ok(k) if k == dim => Ok(k),
                _ => Err(param_err("n", format!("`{v}` does not match dimension {dim}"))),
            },
        }
    }
}

/// Sampling region on which a model is known to be smooth and nondegenerate.
#[derive(Debug, Clone, PartialEq)]
pub struct SafeRegion {
    pub x: Vec<(f64, f64)>,
    pub y: Vec<(f64, f64)>,
    /// Lower bound on every `|y^i|`.
    pub min_abs_y: f64,
    /// Whether the base box restricts the domain; when false it only bounds
    /// sampling.
    pub bounded_base: bool,
}

impl SafeRegion {
    pub fn cube(n: usize, x: (f64, f64), y: (f64, f64)) -> SafeRegion {
        SafeRegion {
            x: vec![x; n],
            y: vec![y; n],
            min_abs_y: 0.0,
            bounded_base: true,
        }
    }

    /// Whether `p` lies over the safe base box and away from excluded fibre
    /// loci. The fibre box only bounds sampling.
    pub fn admits(&self, p: &SlitPoint) -> bool {
        (!self.bounded_base || p.x.iter().zip(&self.x).all(|(v, (a, b))| *a <= *v && *v <= *b))
            && p.y.iter().all(|v| v.abs() >= self.min_abs_y)
            && p.y.iter().any(|v| *v != 0.0)
    }
}

#[derive(Debug, Clone)]
pub struct ModelEntry {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub structure: FinslerStructure,
    pub region: SafeRegion,
    pub notes: &'static str,
}

fn sum_of(n: usize, term: impl Fn(usize) -> String) -> String {
    (1..=n).map(term).collect::<Vec<_>>().join(" + ")
}

fn parse_energy(src: &str, n: usize) -> Result<Expr, ModelError> {
    parse(src, n, true).map_err(|error| ModelError::Parse {
        source_text: src.to_string(),
        error,
    })
}

/// Registry of built-in structures.
pub fn builtin_finsler(name: &str, params: &[(String, String)], dim: usize) -> Result<ModelEntry, ModelError> {
    if dim < 2 {
        return Err(param_err("dim", format!("dimension must be at least 2, got {dim}")));
    }
    let unit = SafeRegion::cube(dim, (-1.0, 1.0), (-1.0, 1.0));
    let flat = SafeRegion {
        bounded_base: false,
        ..unit.clone()
    };
    let (energy, region, notes) = match name {
        "euclidean" => {
            let n = Params::new(params, &["n"])?.dim(dim)?;
            let e = format!("0.5*({})", sum_of(n, |i| format!("y{i}^2")));
            (parse_energy(&e, n)?, flat, "flat metric; smooth on the whole slit bundle")
        }
        "riemannian" => {
            let p = Params::new(params, &["n", "a"])?;
            let n = p.dim(dim)?;
            let entries: Vec<String> = match p.get("a") {
                Some(a) => exprlang::split_top_level(a)
                    .into_iter()
                    .map(|(_, s)| s.trim().to_string())
                    .collect(),
                None => (0..n * n)
                    .map(|k| if k / n == k % n { format!("1/x{n}^2") } else { "0".into() })
                    .collect(),
            };
            if entries.len() != n * n {
                return Err(param_err("a", format!("expected {} entries, found {}", n * n, entries.len())));
            }
            let mut region = SafeRegion::cube(n, (-1.0, 1.0), (-1.0, 1.0));
            region.x[n - 1] = (0.5, 1.5);
            let mut matrix = Vec::with_capacity(n);
            for i in 0..n {
                let mut row = Vec::with_capacity(n);
                for j in 0..n {
                    let src = &entries[i * n + j];
                    row.push(parse(src, n, false).map_err(|error| ModelError::Parse {
                        source_text: src.clone(),
                        error,
                    })?);
                }
                matrix.push(row);
            }
            // spot check at the centre of the safe box
            let centre: Vec<f64> = region.x.iter().map(|(a, b)| 0.5 * (a + b)).collect();
            let a: Vec<Vec<f64>> = matrix
                .iter()
                .map(|row| row.iter().map(|e| e.eval_f64(&centre, &[])).collect())
                .collect();
            for i in 0..n {
                for j in 0..n {
                    if (a[i][j] - a[j][i]).abs() > 1e-12 * (1.0 + a[i][j].abs()) {
                        return Err(param_err("a", "matrix is not symmetric"));
                    }
                }
            }
            if !is_positive_definite(&a) {
                return Err(param_err("a", "matrix is not positive definite on the safe box"));
            }
            let mut src = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if entries[i * n + j] != "0" {
                        src.push(format!("({})*y{}*y{}", entries[i * n + j], i + 1, j + 1));
                    }
                }
            }
            let e = format!("0.5*({})", src.join(" + "));
            (
                parse_energy(&e, n)?,
                region,
                "quadratic energy; the default metric is the hyperbolic one on x_n > 0",
            )
        }
        "polar" => {
            Params::new(params, &["n"])?.dim(dim)?;
            if dim != 2 {
                return Err(param_err("n", "polar is only defined for n = 2"));
            }
            let mut region = SafeRegion::cube(2, (-1.0, 1.0), (-1.0, 1.0));
            region.x[0] = (0.5, 2.0);
            (
                parse_energy("0.5*(y1^2 + x1^2*y2^2)", 2)?,
                region,
                "metric diag(1, x1^2); nondegenerate for x1 > 0",
            )
        }
        "randers" => {
            let p = Params::new(params, &["n", "b"])?;
            let n = p.dim(dim)?;
            let b = p.floats("b")?.unwrap_or_else(|| vec![0.0; n]);
            if b.len() != n {
                return Err(param_err("b", format!("expected {n} components, found {}", b.len())));
            }
            let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            if nb >= 1.0 {
                return Err(param_err("b", format!("|b| = {nb} must be below 1")));
            }
            let mut f = format!("sqrt({})", sum_of(n, |i| format!("y{i}^2")));
            for (i, bi) in b.iter().enumerate() {
                if *bi != 0.0 {
                    f.push_str(&format!(" + ({bi})*y{}", i + 1));
                }
            }
            let fexpr = parse_energy(&f, n)?;
            let fs = FinslerStructure::from_finsler(n, fexpr, "randers");
            return Ok(ModelEntry {
                name: "randers".into(),
                params: params.to_vec(),
                structure: fs.with_params(params.to_vec()),
                region: flat,
                notes: "F = |y| + b.y with constant b, |b| < 1",
            });
        }
        "quartic" => {
            let n = Params::new(params, &["n"])?.dim(dim)?;
            let e = format!("0.5*sqrt({})", sum_of(n, |i| format!("y{i}^4")));
            let mut region = flat;
            region.min_abs_y = 0.1;
            (
                parse_energy(&e, n)?,
                region,
                "F = (sum y_i^4)^(1/4); sampling keeps every |y_i| >= 0.1",
            )
        }
        other => return Err(ModelError::UnknownModel(other.to_string())),
    };
    Ok(ModelEntry {
        name: name.to_string(),
        params: params.to_vec(),
        structure: FinslerStructure::from_energy(dim, energy, name).with_params(params.to_vec()),
        region,
        notes,
    })
}

/// Structure from a spec string; `expr:` sources give `F`.
pub fn finsler_from_spec(text: &str, dim: usize) -> Result<ModelEntry, ModelError> {
    match parse_spec(text)? {
        Spec::Builtin { name, params } => {
            let mut entry = builtin_finsler(&name, &params, dim)?;
            entry.structure.name = text.trim().to_string();
            Ok(entry)
        }
        Spec::Expr(src) => {
            let f = parse(&src, dim, true).map_err(|error| ModelError::Parse {
                source_text: src.clone(),
                error,
            })?;
            Ok(ModelEntry {
                name: format!("expr:{src}"),
                params: Vec::new(),
                structure: FinslerStructure::from_finsler(dim, f, format!("expr:{src}")),
                region: SafeRegion::cube(dim, (-1.0, 1.0), (-1.0, 1.0)),
                notes: "user-supplied Finsler function",
            })
        }
    }
}

fn field_parse(src: &str, n: usize) -> Result<ExprField, ModelError> {
    parse_field(src, n)
        .map(|field| ExprField { field })
        .map_err(|error| ModelError::Parse {
            source_text: src.to_string(),
            error,
        })
}

/// Registry of built-in base vector fields.
pub fn builtin_field(name: &str, params: &[(String, String)], n: usize) -> Result<ExprField, ModelError> {
    let src = match name {
        "translation" => {
            let p = Params::new(params, &["v"])?;
            let v = p.floats("v")?.unwrap_or_else(|| {
                let mut e = vec![0.0; n];
                e[0] = 1.0;
                e
            });
            if v.len() != n {
                return Err(param_err("v", format!("expected {n} components, found {}", v.len())));
            }
            return Ok(ExprField::constant(&v));
        }
        "rotation" => {
            let p = Params::new(params, &["i", "j"])?;
            let i = p.index("i", 1, n)?;
            let j = p.index("j", 2, n)?;
            if i == j {
                return Err(param_err("j", "rotation needs two distinct indices"));
            }
            let comps: Vec<String> = (1..=n)
                .map(|k| {
                    if k == i {
                        format!("-x{j}")
                    } else if k == j {
                        format!("x{i}")
                    } else {
                        "0".into()
                    }
                })
                .collect();
            comps.join(", ")
        }
        "radial" => {
            Params::new(params, &[])?;
            (1..=n).map(|k| format!("x{k}")).collect::<Vec<_>>().join(", ")
        }
        "linear" => {
            let p = Params::new(params, &["a"])?;
            let a = p.floats("a")?.ok_or_else(|| param_err("a", "missing matrix entries"))?;
            if a.len() != n * n {
                return Err(param_err("a", format!("expected {} entries, found {}", n * n, a.len())));
            }
            (0..n)
                .map(|i| {
                    let terms: Vec<String> = (0..n)
                        .filter(|j| a[i * n + j] != 0.0)
                        .map(|j| format!("({})*x{}", a[i * n + j], j + 1))
                        .collect();
                    if terms.is_empty() {
                        "0".to_string()
                    } else {
                        terms.join(" + ")
                    }
                })
                .collect::<Vec<_>>()
                .join(", ")
        }
        "expr" => {
            let p = Params::new(params, &["f"])?;
            p.get("f").ok_or_else(|| param_err("f", "missing field source"))?.to_string()
        }
        "projective_quadratic" => {
            Params::new(params, &[])?;
            let mut comps = vec!["x1^2".to_string()];
            comps.extend((2..=n).map(|k| format!("x1*x{k}")));
            comps.join(", ")
        }
        other => return Err(ModelError::UnknownField(other.to_string())),
    };
    field_parse(&src, n)
}

pub fn field_from_spec(text: &str, n: usize) -> Result<ExprField, ModelError> {
    match parse_spec(text)? {
        Spec::Builtin { name, params } => builtin_field(&name, &params, n),
        Spec::Expr(src) => field_parse(&src, n),
    }
}

/// Expected classification of one (model, field) pair.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub id: &'static str,
    pub finsler: &'static str,
    pub field: &'static str,
    pub dim: usize,
    pub expected: Vec<(Property, Verdict)>,
    /// Homothety constant, when the field is homothetic.
    pub alpha: Option<f64>,
    /// Exact conformal factor as a function of `x`.
    pub conformal_factor: Option<fn(&[f64]) -> f64>,
    /// Exact projective factor as a function of `(x, y)`.
    pub projective_factor: Option<fn(&[f64], &[f64]) -> f64>,
    /// Exact divergence of the complete lift.
    pub divergence: Option<fn(&[f64], &[f64]) -> f64>,
    pub provenance: &'static str,
}

const H: Verdict = Verdict::Holds;
const F: Verdict = Verdict::Fails;

/// Verdicts in the order projective, affine, conformal, homothetic,
/// killing, volume preserving.
fn verdicts(v: [Verdict; 6]) -> Vec<(Property, Verdict)> {
    Property::ALL.iter().copied().zip(v).collect()
}

fn zero_x(_: &[f64]) -> f64 {
    0.0
}

fn zero_xy(_: &[f64], _: &[f64]) -> f64 {
    0.0
}

pub fn ground_truth() -> Vec<GroundTruth> {
    let entry = |id, finsler, field, dim, v, provenance| GroundTruth {
        id,
        finsler,
        field,
        dim,
        expected: verdicts(v),
        alpha: None,
        conformal_factor: None,
        projective_factor: None,
        divergence: None,
        provenance,
    };
    let killing = [H, H, H, H, H, H];
    vec![
        GroundTruth {
            alpha: Some(2.0),
            conformal_factor: Some(|_| 2.0),
            projective_factor: Some(zero_xy),
            divergence: Some(|_, _| 4.0),
            ..entry(
                "euclidean2-radial",
                "builtin:euclidean",
                "builtin:radial",
                2,
                [H, H, H, H, F, F],
                "trivial: X^c E = 2E; div X^c = trace of the identity on R^4",
            )
        },
        GroundTruth {
            alpha: Some(0.0),
            conformal_factor: Some(zero_x),
            divergence: Some(zero_xy),
            ..entry(
                "euclidean2-rotation",
                "builtin:euclidean",
                "builtin:rotation?i=1,j=2",
                2,
                killing,
                "trivial: antisymmetric Jacobian",
            )
        },
        GroundTruth {
            alpha: Some(0.0),
            ..entry(
                "euclidean2-translation",
                "builtin:euclidean",
                "builtin:translation?v=1,0.5",
                2,
                killing,
                "trivial: constant field on a flat structure",
            )
        },
        GroundTruth {
            alpha: Some(0.0),
            ..entry(
                "randers2-translation",
                "builtin:randers?b=0.3,0",
                "builtin:translation?v=0,1",
                2,
                killing,
                "trivial: F does not depend on x",
            )
        },
        GroundTruth {
            alpha: Some(2.0),
            divergence: Some(|_, _| 4.0),
            ..entry(
                "randers2-radial",
                "builtin:randers?b=0.3,0",
                "builtin:radial",
                2,
                [H, H, H, H, F, F],
                "derived: E is 2-homogeneous in y and x-independent, so X^c E = 2E",
            )
        },
        GroundTruth {
            projective_factor: Some(|_, y| -2.0 * y[0]),
            divergence: Some(|x, _| 6.0 * x[0]),
            ..entry(
                "euclidean2-projective-quadratic",
                "builtin:euclidean",
                "builtin:projective_quadratic",
                2,
                [H, F, F, F, F, F],
                "derived: hand bracket [X^c, S] = -2 y1 C with S = (y, 0)",
            )
        },
        GroundTruth {
            divergence: Some(|_, _| 6.0),
            ..entry(
                "euclidean2-linear-diag",
                "builtin:euclidean",
                "builtin:linear?a=1,0,0,2",
                2,
                [H, H, F, F, F, F],
                "trivial: X^c E = y1^2 + 2 y2^2 is not proportional to E",
            )
        },
        GroundTruth {
            alpha: Some(0.0),
            divergence: Some(zero_xy),
            ..entry(
                "polar-x2",
                "builtin:polar",
                "builtin:translation?v=0,1",
                2,
                killing,
                "derived: metric independent of x2; density x1^2",
            )
        },
        GroundTruth {
            divergence: Some(|x, _| 2.0 / x[0]),
            ..entry(
                "polar-x1",
                "builtin:polar",
                "builtin:translation?v=1,0",
                2,
                [F, F, F, F, F, F],
                "derived: X^c E / E = 2 x1 y2^2 / (y1^2 + x1^2 y2^2) varies along the fibre",
            )
        },
        GroundTruth {
            alpha: Some(0.0),
            ..entry(
                "quartic2-translation",
                "builtin:quartic",
                "builtin:translation?v=1,1",
                2,
                killing,
                "trivial: F does not depend on x",
            )
        },
        GroundTruth {
            alpha: Some(2.0),
            divergence: Some(|_, _| 4.0),
            ..entry(
                "quartic2-radial",
                "builtin:quartic",
                "builtin:radial",
                2,
                [H, H, H, H, F, F],
                "trivial: F is 1-homogeneous in y and x-independent",
            )
        },
        entry(
            "quartic2-rotation",
            "builtin:quartic",
            "builtin:rotation?i=1,j=2",
            2,
            [H, H, F, F, F, F],
            "derived: flat spray, linear field; the quartic norm is not rotation invariant",
        ),
        GroundTruth {
            alpha: Some(2.0),
            divergence: Some(|_, _| 6.0),
            ..entry(
                "euclidean3-radial",
                "builtin:euclidean",
                "builtin:radial",
                3,
                [H, H, H, H, F, F],
                "trivial: homothety of R^3",
            )
        },
        GroundTruth {
            alpha: Some(0.0),
            ..entry(
                "euclidean3-rotation",
                "builtin:euclidean",
                "builtin:rotation?i=1,j=3",
                3,
                killing,
                "trivial: rotation of R^3",
            )
        },
        GroundTruth {
            alpha: Some(0.0),
            divergence: Some(zero_xy),
            ..entry(
                "hyperbolic2-dilation",
                "builtin:riemannian",
                "builtin:radial",
                2,
                killing,
                "derived: dilations are isometries of the half-plane metric I/x2^2",
            )
        },
        GroundTruth {
            alpha: Some(0.0),
            ..entry(
                "hyperbolic2-translation",
                "builtin:riemannian?a=1/x2^2,0,0,1/x2^2",
                "builtin:translation?v=1,0",
                2,
                killing,
                "trivial: metric independent of x1",
            )
        },
        GroundTruth {
            conformal_factor: Some(|x| 4.0 * x[0]),
            divergence: Some(|x, _| 8.0 * x[0]),
            ..entry(
                "euclidean2-holomorphic-square",
                "builtin:euclidean",
                "expr:[x1^2 - x2^2, 2*x1*x2]",
                2,
                [F, F, H, F, F, F],
                "derived: Jacobian 2 x1 I + antisymmetric, so L g = 4 x1 g",
            )
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{check_nondegenerate, metric};

    fn kv(k: &str, v: &str) -> (String, String) {
        (k.to_string(), v.to_string())
    }

    #[test]
    fn spec_continuation_tokens() {
        assert_eq!(
            parse_spec("builtin:randers?b=0.3,0").unwrap(),
            Spec::Builtin {
                name: "randers".into(),
                params: vec![kv("b", "0.3,0")]
            }
        );
        assert_eq!(
            parse_spec("builtin:rotation?i=1,j=3").unwrap(),
            Spec::Builtin {
                name: "rotation".into(),
                params: vec![kv("i", "1"), kv("j", "3")]
            }
        );
        assert_eq!(parse_spec("expr:[x1, x2]").unwrap(), Spec::Expr("[x1, x2]".into()));
        assert!(parse_spec("euclidean").is_err());
        assert!(parse_spec("builtin:?a=1").is_err());
    }

    #[test]
    fn registry_errors() {
        assert!(matches!(builtin_finsler("funk", &[], 2), Err(ModelError::UnknownModel(_))));
        assert!(matches!(
            builtin_finsler("randers", &[kv("b", "0.8,0.8")], 2),
            Err(ModelError::Param { .. })
        ));
        assert!(builtin_finsler("polar", &[], 3).is_err());
        assert!(matches!(builtin_field("shear", &[], 2), Err(ModelError::UnknownField(_))));
        assert!(builtin_field("rotation", &[kv("i", "1"), kv("j", "4")], 3).is_err());
        assert!(builtin_finsler("riemannian", &[kv("a", "1,2,3,1")], 2).is_err());
    }

    #[test]
    fn euclidean_metric_is_identity() {
        let m = builtin_finsler("euclidean", &[], 2).unwrap();
        let p = SlitPoint::new(vec![0.3, 0.1], vec![1.0, -2.0]).unwrap();
        assert_eq!(metric(&m.structure, &p).unwrap(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn builtin_fields() {
        let r = builtin_field("rotation", &[], 2).unwrap();
        assert_eq!(r.to_string(), "[-x2, x1]");
        let q = builtin_field("projective_quadratic", &[], 3).unwrap();
        assert_eq!(q.to_string(), "[x1^2, x1*x2, x1*x3]");
        let l = field_from_spec("builtin:linear?a=1,0,0,2", 2).unwrap();
        assert_eq!(l.field.components[1].eval_f64(&[3.0, 5.0], &[]), 10.0);
        let t = field_from_spec("builtin:translation?v=0,1", 2).unwrap();
        assert_eq!(t.to_string(), "[0, 1]");
    }

    #[test]
    fn quartic_is_homogeneous_on_safe_box() {
        let m = builtin_finsler("quartic", &[], 2).unwrap();
        for y in [[0.3, -0.7], [1.0, 0.2], [-0.5, -0.5]] {
            let p = SlitPoint::new(vec![0.0, 0.0], y.to_vec()).unwrap();
            assert!(m.region.admits(&p));
            let e = m.structure.energy(&p).unwrap();
            let theta = crate::geometry::hilbert_form(&m.structure, &p).unwrap();
            let ce: f64 = theta.iter().zip(&y).map(|(a, b)| a * b).sum();
            assert!((ce - 2.0 * e).abs() < 1e-12);
            let g = metric(&m.structure, &p).unwrap();
            check_nondegenerate(&m.structure, &p, &g).unwrap();
        }
        let axis = SlitPoint::new(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        assert!(!m.region.admits(&axis));
    }

    #[test]
    fn corpus_specs_resolve() {
        let corpus = ground_truth();
        assert!(corpus.len() >= 10);
        for gt in corpus {
            finsler_from_spec(gt.finsler, gt.dim).unwrap();
            field_from_spec(gt.field, gt.dim).unwrap();
            assert_eq!(gt.expected.len(), 6);
        }
    }
}
