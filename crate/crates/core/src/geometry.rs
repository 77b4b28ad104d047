//! Finsler structures and the quantities derived from the energy
//! `E = F²/2`: metric, Hilbert form, fundamental 2-form, canonical spray,
//! its Ehresmann connection and Berwald coefficients, the Dazord density,
//! divergence and the Sasaki metric.
//!
//! Coordinates on the tangent bundle are `z = (x^1..x^n, y^1..y^n)`. A
//! matrix of a 2-form `Ω` holds `Ω[a][b] = ω(∂_a, ∂_b)`; for the fundamental
//! form the `(y, x)` block is the metric, the `(x, y)` block its negative and
//! the `(y, y)` block vanishes.

use std::fmt;

use thiserror::Error;

use crate::exprlang::{self, BinOp, EvalError, Expr, ParseError};
use crate::jets::{self, determinant_jets, solve_linear_jets, Jet, JetError, JetPoint};
use crate::lifts::{self, BaseVectorField, ExprField, TmField};

pub type Mat = Vec<Vec<f64>>;

#[derive(Debug, Clone, Error)]
pub enum GeomError {
    #[error("evaluation failed at {point}: {source}")]
    Evaluation { point: String, source: EvalError },
    #[error("jet arithmetic failed at {point}: {source}")]
    Jet { point: String, source: JetError },
    #[error("metric is degenerate at {point} (det g = {det:e})")]
    DegenerateMetric { point: String, det: f64 },
    #[error("fundamental 2-form is singular at {point}")]
    SingularForm { point: String },
    #[error("point lies on the zero section")]
    ZeroSection,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("vector field is not projectable: {0}")]
    NotProjectable(String),
    #[error("horizontal lifts disagree with N at {point} (residual {residual:e})")]
    InconsistentConnection { point: String, residual: f64 },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A point of the slit tangent bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct SlitPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl SlitPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<SlitPoint, GeomError> {
        if x.len() != y.len() {
            return Err(GeomError::Dimension(format!(
                "x has {} coordinates, y has {}",
                x.len(),
                y.len()
            )));
        }
        if y.iter().all(|v| *v == 0.0) {
            return Err(GeomError::ZeroSection);
        }
        Ok(SlitPoint { x, y })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn jet_point(&self) -> JetPoint {
        JetPoint::tangent(&self.x, &self.y)
    }

    /// Coordinate jets of `(x, y)` in `2n` variables.
    pub fn coordinate_jets(&self, order: usize) -> Result<Vec<Jet>, GeomError> {
        self.jet_point()
            .coordinate_jets(order)
            .map_err(|e| self.jet_err(e))
    }

    /// Same base point, fibre coordinates replaced.
    pub fn with_fibre(&self, y: Vec<f64>) -> SlitPoint {
        SlitPoint {
            x: self.x.clone(),
            y,
        }
    }

    pub(crate) fn jet_err(&self, source: JetError) -> GeomError {
        match source {
            JetError::Singular { .. } => GeomError::SingularForm {
                point: self.to_string(),
            },
            source => GeomError::Jet {
                point: self.to_string(),
                source,
            },
        }
    }

    pub(crate) fn eval_err(&self, source: EvalError) -> GeomError {
        GeomError::Evaluation {
            point: self.to_string(),
            source,
        }
    }
}

impl fmt::Display for SlitPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={:?}, y={:?}", self.x, self.y)
    }
}

/// A Finsler (or merely nondegenerate) structure given by its energy
/// function `E(x, y)`.
#[derive(Debug, Clone)]
pub struct FinslerStructure {
    dim: usize,
    energy: Expr,
    pub name: String,
    pub params: Vec<(String, String)>,
}

impl FinslerStructure {
    /// Builds the structure from an energy expression `E`.
    pub fn from_energy(dim: usize, energy: Expr, name: impl Into<String>) -> FinslerStructure {
        FinslerStructure {
            dim,
            energy,
            name: name.into(),
            params: Vec::new(),
        }
    }

    /// Builds the structure from a Finsler function `F`; `E = F²/2`.
    pub fn from_finsler(dim: usize, finsler: Expr, name: impl Into<String>) -> FinslerStructure {
        let energy = Expr::binary(BinOp::Mul, Expr::Num(0.5), finsler.powi(2));
        FinslerStructure::from_energy(dim, energy, name)
    }

    /// Parses `F` from source text.
    pub fn parse_finsler(source: &str, dim: usize) -> Result<FinslerStructure, GeomError> {
        let f = exprlang::parse(source, dim, true)?;
        Ok(FinslerStructure::from_finsler(dim, f, format!("expr:{source}")))
    }

    pub fn with_params(mut self, params: Vec<(String, String)>) -> FinslerStructure {
        self.params = params;
        self
    }

    /// The structure with `F` replaced by `c·F`.
    pub fn scaled(&self, c: f64) -> FinslerStructure {
        let energy = Expr::binary(BinOp::Mul, Expr::num(c * c), self.energy.clone());
        FinslerStructure {
            dim: self.dim,
            energy,
            name: format!("{} (scaled by {c})", self.name),
            params: self.params.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn energy_expr(&self) -> &Expr {
        &self.energy
    }

    fn check(&self, p: &SlitPoint) -> Result<(), GeomError> {
        if p.dim() != self.dim {
            return Err(GeomError::Dimension(format!(
                "point has dimension {}, structure has {}",
                p.dim(),
                self.dim
            )));
        }
        if p.y.iter().all(|v| *v == 0.0) {
            return Err(GeomError::ZeroSection);
        }
        Ok(())
    }

    /// Jet of `E` at `p` in the `2n` coordinates.
    pub fn energy_jet(&self, p: &SlitPoint, order: usize) -> Result<Jet, GeomError> {
        self.check(p)?;
        let vars = p.coordinate_jets(order)?;
        let (xs, ys) = vars.split_at(self.dim);
        self.energy.eval_jets(xs, ys).map_err(|e| p.eval_err(e))
    }

    pub fn energy(&self, p: &SlitPoint) -> Result<f64, GeomError> {
        Ok(self.energy_jet(p, 0)?.value())
    }

    /// `F = sqrt(2E)`; only meaningful where `E > 0`.
    pub fn finsler_value(&self, p: &SlitPoint) -> Result<f64, GeomError> {
        Ok((2.0 * self.energy(p)?).sqrt())
    }
}

fn deriv(j: &Jet, var: usize, p: &SlitPoint) -> Result<Jet, GeomError> {
    j.derivative(var).map_err(|e| p.jet_err(e))
}

/// `g_ij = ∂²E/∂y^i∂y^j` as jets of the given order.
pub fn metric_jets(fs: &FinslerStructure, p: &SlitPoint, order: usize) -> Result<Vec<Vec<Jet>>, GeomError> {
    let n = fs.dim();
    let e = fs.energy_jet(p, order + 2)?;
    let theta: Vec<Jet> = (0..n)
        .map(|i| deriv(&e, n + i, p))
        .collect::<Result<_, _>>()?;
    (0..n)
        .map(|i| (0..n).map(|j| deriv(&theta[i], n + j, p)).collect())
        .collect()
}

/// Metric tensor at `p`; fails when it is degenerate.
pub fn metric(fs: &FinslerStructure, p: &SlitPoint) -> Result<Mat, GeomError> {
    let g = values_mat(&metric_jets(fs, p, 0)?);
    check_nondegenerate(fs, p, &g)?;
    Ok(g)
}

/// Degeneracy test `|det g| < 1e-10 · s^n` with the scale `s = 2|E|/|y|²`.
pub fn check_nondegenerate(fs: &FinslerStructure, p: &SlitPoint, g: &Mat) -> Result<(), GeomError> {
    let det = det_f64(g);
    let e = fs.energy(p)?;
    let y2: f64 = p.y.iter().map(|v| v * v).sum();
    let scale = 2.0 * e.abs() / y2;
    if !det.is_finite() || det.abs() < 1e-10 * scale.powi(fs.dim() as i32) || scale == 0.0 {
        return Err(GeomError::DegenerateMetric {
            point: p.to_string(),
            det,
        });
    }
    Ok(())
}

/// Whether `g(p)` is positive definite (informational).
pub fn is_positive_definite(g: &Mat) -> bool {
    // leading principal minors
    (1..=g.len()).all(|k| {
        let minor: Mat = g[..k].iter().map(|row| row[..k].to_vec()).collect();
        det_f64(&minor) > 0.0
    })
}

/// Hilbert form components `θ_i = ∂E/∂y^i` as jets.
pub fn hilbert_jets(fs: &FinslerStructure, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
    let n = fs.dim();
    let e = fs.energy_jet(p, order + 1)?;
    (0..n).map(|i| deriv(&e, n + i, p)).collect()
}

pub fn hilbert_form(fs: &FinslerStructure, p: &SlitPoint) -> Result<Vec<f64>, GeomError> {
    Ok(values(&hilbert_jets(fs, p, 0)?))
}

/// The Hilbert form as a covector on the tangent bundle: `θ = θ_i dx^i`.
pub fn hilbert_covector_jets(fs: &FinslerStructure, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
    let mut theta = hilbert_jets(fs, p, order)?;
    let zero = theta[0].zero_like();
    theta.extend(std::iter::repeat_n(zero, fs.dim()));
    Ok(theta)
}

fn omega_from_energy(e: &Jet, n: usize, p: &SlitPoint) -> Result<Vec<Vec<Jet>>, GeomError> {
    let theta: Vec<Jet> = (0..n)
        .map(|i| deriv(e, n + i, p))
        .collect::<Result<_, _>>()?;
    // dtheta[c][i] = ∂θ_i/∂z^c
    let dtheta: Vec<Vec<Jet>> = (0..2 * n)
        .map(|c| theta.iter().map(|t| deriv(t, c, p)).collect())
        .collect::<Result<_, _>>()?;
    let zero = dtheta[0][0].zero_like();
    let mut omega = vec![vec![zero; 2 * n]; 2 * n];
    for c in 0..2 * n {
        for d in 0..2 * n {
            let mut entry = omega[c][d].clone();
            if d < n {
                entry = &entry + &dtheta[c][d];
            }
            if c < n {
                entry = &entry - &dtheta[d][c];
            }
            omega[c][d] = entry;
        }
    }
    Ok(omega)
}

/// Matrix of `ω = dθ` as jets of the given order.
pub fn fundamental_form_jets(fs: &FinslerStructure, p: &SlitPoint, order: usize) -> Result<Vec<Vec<Jet>>, GeomError> {
    let e = fs.energy_jet(p, order + 2)?;
    omega_from_energy(&e, fs.dim(), p)
}

pub fn fundamental_form(fs: &FinslerStructure, p: &SlitPoint) -> Result<Mat, GeomError> {
    Ok(values_mat(&fundamental_form_jets(fs, p, 0)?))
}

/// Solves `i_S ω = -dE` over jets, to jet order `order`. Components are `(S^x, S^y)`; the spray
/// coefficients are `G = -S^y / 2`.
pub fn canonical_spray(fs: &FinslerStructure, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
    let n = fs.dim();
    let e = fs.energy_jet(p, order + 2)?;
    let omega = omega_from_energy(&e, n, p)?;
    // (i_S ω)_b = Σ_a S^a Ω[a][b], so the system matrix is Ωᵀ.
    let system: Vec<Vec<Jet>> = (0..2 * n)
        .map(|b| (0..2 * n).map(|a| omega[a][b].clone()).collect())
        .collect();
    let rhs: Vec<Jet> = (0..2 * n)
        .map(|b| Ok(-deriv(&e, b, p)?.truncate(order)))
        .collect::<Result<_, GeomError>>()?;
    solve_linear_jets(&system, &rhs).map_err(|e| p.jet_err(e))
}

/// Spray coefficients `G^i` as jets.
pub fn spray_coefficient_jets(fs: &FinslerStructure, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
    let n = fs.dim();
    let s = canonical_spray(fs, p, order)?;
    Ok(s[n..].iter().map(|j| j.scale(-0.5)).collect())
}

/// `N^i_j = ∂G^i/∂y^j` as jets.
pub fn nonlinear_jets(fs: &FinslerStructure, p: &SlitPoint, order: usize) -> Result<Vec<Vec<Jet>>, GeomError> {
    let n = fs.dim();
    let g = spray_coefficient_jets(fs, p, order + 1)?;
    g.iter()
        .map(|gi| (0..n).map(|j| deriv(gi, n + j, p)).collect())
        .collect()
}

/// Spray coefficients, connection coefficients and Berwald coefficients at a
/// point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionData {
    /// `G^i`, with `S = y^i ∂/∂x^i - 2 G^i ∂/∂y^i`.
    pub spray: Vec<f64>,
    /// `N[i][j] = ∂G^i/∂y^j`.
    pub nonlinear: Mat,
    /// `berwald[i][j][k] = ∂²G^i/∂y^j∂y^k`.
    pub berwald: Vec<Mat>,
}

impl ConnectionData {
    /// `max_i |N^i_j y^j - 2G^i|`, zero by homogeneity.
    pub fn euler_residual(&self, y: &[f64]) -> f64 {
        self.nonlinear
            .iter()
            .zip(&self.spray)
            .map(|(row, g)| (dot_f64(row, y) - 2.0 * g).abs())
            .fold(0.0, f64::max)
    }
}

pub fn connection(fs: &FinslerStructure, p: &SlitPoint) -> Result<ConnectionData, GeomError> {
    let n = fs.dim();
    let g = spray_coefficient_jets(fs, p, 2)?;
    let mut nonlinear = vec![vec![0.0; n]; n];
    let mut berwald = vec![vec![vec![0.0; n]; n]; n];
    let mut index = vec![0u8; 2 * n];
    for i in 0..n {
        for j in 0..n {
            nonlinear[i][j] = g[i].first(n + j);
            for k in 0..n {
                index.iter_mut().for_each(|v| *v = 0);
                index[n + j] += 1;
                index[n + k] += 1;
                berwald[i][j][k] = g[i].partial(&index).map_err(|e| p.jet_err(e))?;
            }
        }
    }
    let data = ConnectionData {
        spray: values(&g),
        nonlinear,
        berwald,
    };
    // the fibre part of the horizontal lift of e_j must be -N[.][j]
    let mut residual: f64 = 0.0;
    let scale = data
        .nonlinear
        .iter()
        .flatten()
        .fold(1.0_f64, |m, v| m.max(v.abs()));
    for j in 0..n {
        let basis = lifts::basis_field(n, j);
        let h = lifts::horizontal_lift(fs, basis).jets(p, 0)?;
        for i in 0..n {
            residual = residual.max((h[n + i].value() + data.nonlinear[i][j]).abs() / scale);
        }
    }
    if residual > 1e-9 {
        return Err(GeomError::InconsistentConnection {
            point: p.to_string(),
            residual,
        });
    }
    Ok(data)
}

/// Tension `t[i][j]`: component `i` of `V[X_j^h, C]` for the coordinate
/// basis field `X_j`.
pub fn tension(fs: &FinslerStructure, p: &SlitPoint) -> Result<Mat, GeomError> {
    let n = fs.dim();
    let c = lifts::liouville(n);
    let mut t = vec![vec![0.0; n]; n];
    for j in 0..n {
        let h = lifts::horizontal_lift(fs, lifts::basis_field(n, j));
        let br = lifts::bracket(h.as_ref(), c.as_ref(), p)?;
        let v = lifts::vertical_map_values(fs, &br, p)?;
        for i in 0..n {
            t[i][j] = v[i];
        }
    }
    Ok(t)
}

/// Torsion on basic sections: `V([X^h,Y^v] - [Y^h,X^v] - [X,Y]^v)`.
pub fn torsion(
    fs: &FinslerStructure,
    p: &SlitPoint,
    x: &BaseVectorField,
    y: &BaseVectorField,
) -> Result<Vec<f64>, GeomError> {
    Ok(torsion_with_scale(fs, p, x, y)?.0)
}

/// Torsion together with the magnitude of the terms that cancel in it.
pub fn torsion_with_scale(
    fs: &FinslerStructure,
    p: &SlitPoint,
    x: &BaseVectorField,
    y: &BaseVectorField,
) -> Result<(Vec<f64>, f64), GeomError> {
    let xh = lifts::horizontal_lift(fs, x.clone());
    let yh = lifts::horizontal_lift(fs, y.clone());
    let xv = lifts::vertical_lift(x.clone());
    let yv = lifts::vertical_lift(y.clone());
    let xy = lifts::vertical_lift(lifts::base_bracket(x.clone(), y.clone()));
    let (a, sa) = lifts::bracket_with_scale(xh.as_ref(), yv.as_ref(), p)?;
    let (b, sb) = lifts::bracket_with_scale(yh.as_ref(), xv.as_ref(), p)?;
    let c = values(&xy.jets(p, 0)?);
    let total: Vec<f64> = (0..a.len()).map(|k| a[k] - b[k] - c[k]).collect();
    let v = lifts::vertical_map_values(fs, &total, p)?;
    Ok((v, sa + sb + norm(&c)))
}

/// Determinant of the matrix of `ω` as a jet.
pub fn omega_determinant_jet(fs: &FinslerStructure, p: &SlitPoint, order: usize) -> Result<Jet, GeomError> {
    let omega = fundamental_form_jets(fs, p, order)?;
    determinant_jets(&omega).map_err(|e| p.jet_err(e))
}

/// Coordinate density `ρ = |det Ω|^{1/2}` of the Dazord volume, as a jet.
pub fn dazord_density_jet(fs: &FinslerStructure, p: &SlitPoint, order: usize) -> Result<Jet, GeomError> {
    let det = omega_determinant_jet(fs, p, order)?;
    let det = if det.value() < 0.0 { -det } else { det };
    det.sqrt().map_err(|_| GeomError::SingularForm {
        point: p.to_string(),
    })
}

pub fn dazord_density(fs: &FinslerStructure, p: &SlitPoint) -> Result<f64, GeomError> {
    Ok(dazord_density_jet(fs, p, 0)?.value())
}

/// Divergence with respect to the Dazord volume:
/// `div ξ = Σ ∂_a ξ^a + ξ^a ∂_a ρ / ρ`.
pub fn divergence(fs: &FinslerStructure, xi: &dyn TmField, p: &SlitPoint) -> Result<f64, GeomError> {
    Ok(divergence_with_scale(fs, xi, p)?.0)
}

/// Divergence and the sum of the absolute values of its terms.
pub fn divergence_with_scale(
    fs: &FinslerStructure,
    xi: &dyn TmField,
    p: &SlitPoint,
) -> Result<(f64, f64), GeomError> {
    let m = 2 * fs.dim();
    let field = xi.jets(p, 1)?;
    let det = omega_determinant_jet(fs, p, 1)?;
    let mut div = 0.0;
    let mut scale = 0.0;
    for a in 0..m {
        let d = field[a].first(a);
        let r = field[a].value() * 0.5 * det.first(a) / det.value();
        div += d + r;
        scale += d.abs() + r.abs();
    }
    Ok((div, scale))
}

/// Sasaki extension as jets:
/// `G = [[g + Nᵀ g N, Nᵀ g], [g N, g]]`.
pub fn sasaki_jets(fs: &FinslerStructure, p: &SlitPoint, order: usize) -> Result<Vec<Vec<Jet>>, GeomError> {
    let n = fs.dim();
    let g = metric_jets(fs, p, order)?;
    let nl = nonlinear_jets(fs, p, order)?;
    let zero = g[0][0].zero_like();
    // gn[i][j] = Σ_k g_ik N^k_j
    let gn: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(zero.clone(), |acc, k| acc + &g[i][k] * &nl[k][j]))
                .collect()
        })
        .collect();
    let mut out = vec![vec![zero.clone(); 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let ntgn = (0..n).fold(zero.clone(), |acc, k| acc + &nl[k][i] * &gn[k][j]);
            out[i][j] = &g[i][j] + &ntgn;
            out[i][n + j] = gn[j][i].clone();
            out[n + i][j] = gn[i][j].clone();
            out[n + i][n + j] = g[i][j].clone();
        }
    }
    Ok(out)
}

pub fn sasaki_metric(fs: &FinslerStructure, p: &SlitPoint) -> Result<Mat, GeomError> {
    Ok(values_mat(&sasaki_jets(fs, p, 0)?))
}

/// Bilinear form `uᵀ A v`.
pub fn pair(a: &Mat, u: &[f64], v: &[f64]) -> f64 {
    a.iter()
        .zip(u)
        .map(|(row, ui)| ui * dot_f64(row, v))
        .sum()
}

pub fn values(j: &[Jet]) -> Vec<f64> {
    j.iter().map(Jet::value).collect()
}

pub fn values_mat(j: &[Vec<Jet>]) -> Mat {
    j.iter().map(|row| values(row)).collect()
}

pub fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn frobenius(a: &Mat) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// Plain determinant by partial pivoting.
pub fn det_f64(a: &Mat) -> f64 {
    let jets: Vec<Vec<Jet>> = a
        .iter()
        .map(|row| {
            row.iter()
                .map(|&v| Jet::constant(v, 0, 1).expect("order 0"))
                .collect()
        })
        .collect();
    match jets::determinant_jets(&jets) {
        Ok(d) => d.value(),
        Err(_) => 0.0,
    }
}

/// Convenience for tests and the CLI: the constant field `e_j`.
pub fn coordinate_field(n: usize, j: usize) -> BaseVectorField {
    lifts::basis_field(n, j)
}

/// Convenience: base field from component source strings.
pub fn field_from_strs(components: &[&str]) -> Result<BaseVectorField, GeomError> {
    let n = components.len();
    let comps = components
        .iter()
        .map(|s| exprlang::parse(s, n, false))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExprField::from_components(comps).into_field())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse;

    fn euclid(n: usize) -> FinslerStructure {
        let src: Vec<String> = (1..=n).map(|i| format!("y{i}^2")).collect();
        let e = parse(&format!("0.5*({})", src.join(" + ")), n, true).unwrap();
        FinslerStructure::from_energy(n, e, "euclidean")
    }

    fn polar() -> FinslerStructure {
        let e = parse("0.5*(y1^2 + x1^2*y2^2)", 2, true).unwrap();
        FinslerStructure::from_energy(2, e, "polar")
    }

    fn randers() -> FinslerStructure {
        FinslerStructure::parse_finsler("sqrt(y1^2 + y2^2) + 0.3*y1", 2).unwrap()
    }

    fn pt(x: &[f64], y: &[f64]) -> SlitPoint {
        SlitPoint::new(x.to_vec(), y.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn zero_section_is_rejected() {
        assert!(matches!(
            SlitPoint::new(vec![1.0, 2.0], vec![0.0, 0.0]),
            Err(GeomError::ZeroSection)
        ));
    }

    #[test]
    fn euclidean_metric_is_identity() {
        let g = metric(&euclid(2), &pt(&[0.3, -1.0], &[0.5, 2.0])).unwrap();
        assert_eq!(g, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn riemannian_metric_ignores_fibre() {
        let fs = polar();
        let g1 = metric(&fs, &pt(&[2.0, 0.5], &[1.0, 1.0])).unwrap();
        let g2 = metric(&fs, &pt(&[2.0, 0.5], &[-0.3, 4.0])).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(g1, vec![vec![1.0, 0.0], vec![0.0, 4.0]]);
    }

    #[test]
    fn randers_metric_matches_finite_differences() {
        let fs = randers();
        let p = pt(&[0.0, 0.0], &[1.0, 0.0]);
        let g = metric(&fs, &p).unwrap();
        let e = fs.energy_expr().clone();
        for i in 0..2 {
            for j in 0..2 {
                let mut mi = [0u8; 2];
                mi[i] += 1;
                mi[j] += 1;
                let fd = jets::finite_difference_oracle(
                    |y: &[f64]| e.eval_f64(&[0.0, 0.0], y),
                    &p.y,
                    &mi,
                    1e-4,
                );
                assert!(close(g[i][j], fd, 1e-6), "g[{i}][{j}] = {} vs {fd}", g[i][j]);
            }
        }
    }

    #[test]
    fn degenerate_metric_is_reported() {
        let fs = FinslerStructure::from_energy(2, parse("0.5*y1^2", 2, true).unwrap(), "rank one");
        assert!(matches!(
            metric(&fs, &pt(&[0.0, 0.0], &[1.0, 1.0])),
            Err(GeomError::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn hilbert_form_examples() {
        let theta = hilbert_form(&euclid(2), &pt(&[0.0, 0.0], &[3.0, 4.0])).unwrap();
        assert_eq!(theta, vec![3.0, 4.0]);
        let p = pt(&[2.0, 0.1], &[0.7, -1.2]);
        let theta = hilbert_form(&polar(), &p).unwrap();
        assert!(close(theta[0], 0.7, 1e-15));
        assert!(close(theta[1], 4.0 * -1.2, 1e-15));
        for fs in [randers(), polar(), euclid(2)] {
            let theta = hilbert_form(&fs, &p).unwrap();
            let e = fs.energy(&p).unwrap();
            assert!(close(dot_f64(&theta, &p.y), 2.0 * e, 1e-12));
        }
    }

    #[test]
    fn fundamental_form_blocks() {
        let w = fundamental_form(&euclid(2), &pt(&[0.0, 0.0], &[1.0, 2.0])).unwrap();
        let expected = vec![
            vec![0.0, 0.0, -1.0, 0.0],
            vec![0.0, 0.0, 0.0, -1.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
        ];
        assert_eq!(w, expected);
    }

    #[test]
    fn omega_pairs_liouville_with_spray() {
        for fs in [randers(), polar()] {
            let p = pt(&[1.5, 0.2], &[0.4, -0.9]);
            let w = fundamental_form(&fs, &p).unwrap();
            let s = values(&canonical_spray(&fs, &p, 0).unwrap());
            let mut c = vec![0.0, 0.0];
            c.extend_from_slice(&p.y);
            let e = fs.energy(&p).unwrap();
            assert!(close(pair(&w, &c, &s), 2.0 * e, 1e-9));
        }
    }

    #[test]
    fn euclidean_and_minkowski_sprays_are_flat() {
        for fs in [euclid(2), randers()] {
            let p = pt(&[0.4, -0.1], &[0.6, 0.8]);
            let s = values(&canonical_spray(&fs, &p, 0).unwrap());
            assert!(close(s[0], 0.6, 1e-13) && close(s[1], 0.8, 1e-13));
            assert!(s[2].abs() < 1e-13 && s[3].abs() < 1e-13);
        }
    }

    #[test]
    fn polar_spray_matches_christoffel_symbols() {
        // G^i = ½ Γ^i_jk y^j y^k with Γ^1_22 = -x1, Γ^2_12 = 1/x1
        let p = pt(&[2.0, 0.0], &[1.0, 1.0]);
        let g = values(&spray_coefficient_jets(&polar(), &p, 0).unwrap());
        assert!(close(g[0], -1.0, 1e-13));
        assert!(close(g[1], 0.5, 1e-13));
    }

    #[test]
    fn polar_connection() {
        let p = pt(&[2.0, 0.3], &[1.0, 1.0]);
        let c = connection(&polar(), &p).unwrap();
        assert!(close(c.berwald[0][1][1], -2.0, 1e-12));
        assert!(close(c.berwald[1][0][1], 0.5, 1e-12));
        assert!(close(c.berwald[1][1][0], 0.5, 1e-12));
        assert!(c.berwald[0][0][0].abs() < 1e-12);
        assert!(c.euler_residual(&p.y) < 1e-12);
    }

    #[test]
    fn euclidean_connection_vanishes() {
        let c = connection(&euclid(3), &pt(&[0.1, 0.2, 0.3], &[1.0, -1.0, 0.5])).unwrap();
        assert!(c.nonlinear.iter().flatten().all(|v| v.abs() < 1e-14));
        assert!(c.berwald.iter().flatten().flatten().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn tension_vanishes() {
        for fs in [euclid(2), randers(), polar()] {
            let t = tension(&fs, &pt(&[1.2, 0.4], &[0.3, 0.9])).unwrap();
            assert!(t.iter().flatten().all(|v| v.abs() < 1e-9), "{t:?}");
        }
    }

    #[test]
    fn torsion_vanishes_on_basis_fields() {
        let p = pt(&[1.2, 0.4], &[0.3, 0.9]);
        let t = torsion(&polar(), &p, &coordinate_field(2, 0), &coordinate_field(2, 1)).unwrap();
        assert!(t.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn euclidean_density_is_one() {
        assert!(close(dazord_density(&euclid(2), &pt(&[0.0, 1.0], &[1.0, 0.0])).unwrap(), 1.0, 1e-15));
    }

    #[test]
    fn randers_density_equals_det_g() {
        let fs = randers();
        let p = pt(&[0.0, 0.0], &[1.0, 0.0]);
        let g = metric(&fs, &p).unwrap();
        assert!(close(dazord_density(&fs, &p).unwrap(), det_f64(&g), 1e-12));
    }

    #[test]
    fn liouville_and_spray_divergence() {
        let p = pt(&[1.1, 0.3], &[0.7, -0.4]);
        for fs in [randers(), polar(), euclid(2)] {
            let c = lifts::liouville(2);
            assert!(close(divergence(&fs, c.as_ref(), &p).unwrap(), 2.0, 1e-10));
            let s = lifts::spray_field(&fs);
            assert!(divergence(&fs, s.as_ref(), &p).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn euclidean_sasaki_is_identity() {
        let gs = sasaki_metric(&euclid(2), &pt(&[0.5, 0.5], &[1.0, 2.0])).unwrap();
        for (i, row) in gs.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn sasaki_on_liouville_is_twice_energy() {
        let p = pt(&[1.3, 0.2], &[0.5, 0.8]);
        for fs in [randers(), polar()] {
            let gs = sasaki_metric(&fs, &p).unwrap();
            let mut c = vec![0.0, 0.0];
            c.extend_from_slice(&p.y);
            assert!(close(pair(&gs, &c, &c), 2.0 * fs.energy(&p).unwrap(), 1e-12));
        }
    }

    #[test]
    fn positive_definiteness() {
        assert!(is_positive_definite(&vec![vec![2.0, 1.0], vec![1.0, 2.0]]));
        assert!(!is_positive_definite(&vec![vec![1.0, 0.0], vec![0.0, -1.0]]));
    }
}
