//! Vector fields on the base and on the tangent bundle, sections of the
//! pull-back bundle, and the lifts and Lie derivatives built from them.
//!
//! Every field is evaluated as a vector of jets at a point, so brackets and
//! Lie derivatives can be nested as long as the total order stays within
//! [`crate::jets::MAX_ORDER`]. A bracket consumes one order.

use std::fmt;
use std::sync::Arc;

use crate::exprlang::{Expr, FieldExpr};
use crate::geometry::{
    canonical_spray, hilbert_covector_jets, fundamental_form_jets, metric_jets, nonlinear_jets, norm,
    sasaki_jets, values, values_mat, FinslerStructure, GeomError, Mat, SlitPoint,
};
use crate::jets::Jet;

/// A vector field on the base manifold.
pub trait BaseField: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    /// Components at `x`, as jets in `num_vars >= n` variables of which the
    /// first `n` are the base coordinates.
    fn jets(&self, x: &[f64], num_vars: usize, order: usize) -> Result<Vec<Jet>, GeomError>;
    fn label(&self) -> String {
        format!("{self:?}")
    }
}

pub type BaseVectorField = Arc<dyn BaseField>;

/// A vector field on the slit tangent bundle, components `(a, b)` in the
/// coordinate frame `(∂_x, ∂_y)`.
pub trait TmField: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError>;
    /// Set by constructions that are projectable by design.
    fn is_projectable(&self) -> bool {
        false
    }
}

pub type TMVectorField = Arc<dyn TmField>;

/// A section of the pull-back bundle `π*TM`: a function of `(x, y)` with
/// values in `T_x M`.
pub trait SectionField: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError>;
}

pub type Section = Arc<dyn SectionField>;

fn coord(p: &SlitPoint, var: usize, order: usize) -> Result<Jet, GeomError> {
    let value = if var < p.dim() {
        p.x[var]
    } else {
        p.y[var - p.dim()]
    };
    Jet::variable(var, value, order, 2 * p.dim()).map_err(|e| p.jet_err(e))
}

fn zeros(p: &SlitPoint, order: usize, count: usize) -> Result<Vec<Jet>, GeomError> {
    let z = Jet::constant(0.0, order, 2 * p.dim()).map_err(|e| p.jet_err(e))?;
    Ok(vec![z; count])
}

fn check_dim(expected: usize, found: usize) -> Result<(), GeomError> {
    if expected != found {
        return Err(GeomError::Dimension(format!(
            "expected dimension {expected}, found {found}"
        )));
    }
    Ok(())
}

/// A base field given by component expressions in `x`.
#[derive(Debug, Clone)]
pub struct ExprField {
    pub field: FieldExpr,
}

impl ExprField {
    pub fn from_components(components: Vec<Expr>) -> ExprField {
        ExprField {
            field: FieldExpr { components },
        }
    }

    pub fn constant(v: &[f64]) -> ExprField {
        ExprField::from_components(v.iter().map(|c| Expr::num(*c)).collect())
    }

    pub fn into_field(self) -> BaseVectorField {
        Arc::new(self)
    }
}

impl fmt::Display for ExprField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.field.fmt(f)
    }
}

impl BaseField for ExprField {
    fn dim(&self) -> usize {
        self.field.dim()
    }

    fn label(&self) -> String {
        self.field.to_string()
    }

    fn jets(&self, x: &[f64], num_vars: usize, order: usize) -> Result<Vec<Jet>, GeomError> {
        let point = || format!("x={x:?}");
        let xs: Vec<Jet> = x
            .iter()
            .enumerate()
            .map(|(i, v)| Jet::variable(i, *v, order, num_vars))
            .collect::<Result<_, _>>()
            .map_err(|source| GeomError::Jet {
                point: point(),
                source,
            })?;
        self.field
            .components
            .iter()
            .map(|c| {
                c.eval_jets(&xs, &[]).map_err(|source| GeomError::Evaluation {
                    point: point(),
                    source,
                })
            })
            .collect()
    }
}

/// The constant coordinate field `∂/∂x^{j+1}`.
pub fn basis_field(n: usize, j: usize) -> BaseVectorField {
    let mut v = vec![0.0; n];
    v[j] = 1.0;
    ExprField::constant(&v).into_field()
}

/// `[X, Y]` on the base.
#[derive(Debug, Clone)]
pub struct BaseBracket(pub BaseVectorField, pub BaseVectorField);

impl BaseField for BaseBracket {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jets(&self, x: &[f64], num_vars: usize, order: usize) -> Result<Vec<Jet>, GeomError> {
        let a = self.0.jets(x, num_vars, order + 1)?;
        let b = self.1.jets(x, num_vars, order + 1)?;
        let n = a.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut c = a[i].zero_like().truncate(order);
            for j in 0..n {
                let dbi = b[i].derivative(j).map_err(|e| jet_err_at(x, e))?;
                let dai = a[i].derivative(j).map_err(|e| jet_err_at(x, e))?;
                c = c + &a[j] * &dbi - &b[j] * &dai;
            }
            out.push(c);
        }
        Ok(out)
    }
}

fn jet_err_at(x: &[f64], source: crate::jets::JetError) -> GeomError {
    GeomError::Jet {
        point: format!("x={x:?}"),
        source,
    }
}

pub fn base_bracket(x: BaseVectorField, y: BaseVectorField) -> BaseVectorField {
    Arc::new(BaseBracket(x, y))
}

/// `X^v = (0, X)`.
#[derive(Debug, Clone)]
pub struct VerticalLift(pub BaseVectorField);

impl TmField for VerticalLift {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
        check_dim(self.dim(), p.dim())?;
        let mut out = zeros(p, order, p.dim())?;
        out.extend(self.0.jets(&p.x, 2 * p.dim(), order)?);
        Ok(out)
    }

    fn is_projectable(&self) -> bool {
        true
    }
}

/// `X^c = (X, ∂_j X · y^j)`.
#[derive(Debug, Clone)]
pub struct CompleteLift(pub BaseVectorField);

impl TmField for CompleteLift {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
        let n = p.dim();
        check_dim(self.dim(), n)?;
        let x = self.0.jets(&p.x, 2 * n, order + 1)?;
        let ys: Vec<Jet> = (0..n)
            .map(|j| coord(p, n + j, order))
            .collect::<Result<_, _>>()?;
        let mut out: Vec<Jet> = x.iter().map(|c| c.truncate(order)).collect();
        for xi in &x {
            let mut b = ys[0].zero_like();
            for (j, yj) in ys.iter().enumerate() {
                b = b + xi.derivative(j).map_err(|e| p.jet_err(e))? * yj;
            }
            out.push(b);
        }
        Ok(out)
    }

    fn is_projectable(&self) -> bool {
        true
    }
}

/// Liouville field `C = (0, y)`.
#[derive(Debug, Clone)]
pub struct Liouville(pub usize);

impl TmField for Liouville {
    fn dim(&self) -> usize {
        self.0
    }

    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
        let n = p.dim();
        check_dim(self.0, n)?;
        let mut out = zeros(p, order, n)?;
        for j in 0..n {
            out.push(coord(p, n + j, order)?);
        }
        Ok(out)
    }

    fn is_projectable(&self) -> bool {
        true
    }
}

/// The canonical spray of a structure.
#[derive(Debug, Clone)]
pub struct SprayField(pub FinslerStructure);

impl TmField for SprayField {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
        canonical_spray(&self.0, p, order)
    }
}

/// `X^h = ½(X^c + [X^v, S])`.
#[derive(Debug, Clone)]
pub struct HorizontalLift {
    pub fs: FinslerStructure,
    pub base: BaseVectorField,
}

impl TmField for HorizontalLift {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
        let xc = CompleteLift(self.base.clone()).jets(p, order)?;
        let xv = VerticalLift(self.base.clone()).jets(p, order + 1)?;
        let s = canonical_spray(&self.fs, p, order + 1)?;
        let br = bracket_jets(&xv, &s, p)?;
        Ok(xc.iter().zip(&br).map(|(a, b)| (a + b).scale(0.5)).collect())
    }

    fn is_projectable(&self) -> bool {
        true
    }
}

/// `[ξ, η]`.
#[derive(Debug, Clone)]
pub struct Bracket(pub TMVectorField, pub TMVectorField);

impl TmField for Bracket {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
        let a = self.0.jets(p, order + 1)?;
        let b = self.1.jets(p, order + 1)?;
        bracket_jets(&a, &b, p)
    }

    fn is_projectable(&self) -> bool {
        self.0.is_projectable() && self.1.is_projectable()
    }
}

/// A constant-coefficient combination `Σ c_k ξ_k`.
#[derive(Debug, Clone)]
pub struct Combination(pub Vec<(f64, TMVectorField)>);

impl TmField for Combination {
    fn dim(&self) -> usize {
        self.0.first().map_or(0, |(_, f)| f.dim())
    }

    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
        let mut out = zeros(p, order, 2 * p.dim())?;
        for (c, f) in &self.0 {
            for (o, v) in out.iter_mut().zip(f.jets(p, order)?) {
                *o = &*o + v.scale(*c);
            }
        }
        Ok(out)
    }

    fn is_projectable(&self) -> bool {
        self.0.iter().all(|(_, f)| f.is_projectable())
    }
}

/// A field on the tangent bundle given by `2n` component expressions.
#[derive(Debug, Clone)]
pub struct ExprTmField(pub Vec<Expr>);

impl TmField for ExprTmField {
    fn dim(&self) -> usize {
        self.0.len() / 2
    }

    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
        eval_exprs(&self.0, p, order)
    }
}

fn eval_exprs(exprs: &[Expr], p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
    let vars = p.coordinate_jets(order)?;
    let (xs, ys) = vars.split_at(p.dim());
    exprs
        .iter()
        .map(|e| e.eval_jets(xs, ys).map_err(|err| p.eval_err(err)))
        .collect()
}

/// `i(s) = (0, s)`.
#[derive(Debug, Clone)]
pub struct VerticalOf(pub Section);

impl TmField for VerticalOf {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
        let mut out = zeros(p, order, p.dim())?;
        out.extend(self.0.jets(p, order)?);
        Ok(out)
    }

    fn is_projectable(&self) -> bool {
        true
    }
}

/// `J(ξ) = (0, a)` for `ξ = (a, b)`.
#[derive(Debug, Clone)]
pub struct JOf(pub TMVectorField);

impl TmField for JOf {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
        let n = p.dim();
        let f = self.0.jets(p, order)?;
        let mut out = zeros(p, order, n)?;
        out.extend(f.into_iter().take(n));
        Ok(out)
    }

    fn is_projectable(&self) -> bool {
        true
    }
}

/// `H(s) = (s, -N s)` for the canonical connection.
#[derive(Debug, Clone)]
pub struct HorizontalOf {
    pub fs: FinslerStructure,
    pub s: Section,
}

impl TmField for HorizontalOf {
    fn dim(&self) -> usize {
        self.s.dim()
    }

    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
        let s = self.s.jets(p, order)?;
        let nl = nonlinear_jets(&self.fs, p, order)?;
        let mut out = s.clone();
        for row in &nl {
            let ns = row.iter().zip(&s).fold(s[0].zero_like(), |acc, (a, b)| acc + a * b);
            out.push(-ns);
        }
        Ok(out)
    }
}

/// The canonical section `δ(x, y) = y`.
#[derive(Debug, Clone)]
pub struct CanonicalDelta(pub usize);

impl SectionField for CanonicalDelta {
    fn dim(&self) -> usize {
        self.0
    }

    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
        (0..p.dim()).map(|j| coord(p, p.dim() + j, order)).collect()
    }
}

/// The basic section `X̂(x, y) = X(x)`.
#[derive(Debug, Clone)]
pub struct BasicSection(pub BaseVectorField);

impl SectionField for BasicSection {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
        self.0.jets(&p.x, 2 * p.dim(), order)
    }
}

/// A section given by `n` expressions in `(x, y)`.
#[derive(Debug, Clone)]
pub struct ExprSection(pub Vec<Expr>);

impl SectionField for ExprSection {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
        eval_exprs(&self.0, p, order)
    }
}

/// `j(ξ) = a` for `ξ = (a, b)`.
#[derive(Debug, Clone)]
pub struct JSection(pub TMVectorField);

impl SectionField for JSection {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
        let f = self.0.jets(p, order)?;
        Ok(f.into_iter().take(p.dim()).collect())
    }
}

/// `L̃_ξ s` for projectable `ξ`: the fibre part of `[ξ, i(s)]`, whose base
/// part vanishes identically.
#[derive(Debug, Clone)]
pub struct TildeLie {
    xi: TMVectorField,
    s: Section,
}

impl TildeLie {
    pub fn new(xi: TMVectorField, s: Section) -> Result<TildeLie, GeomError> {
        if !xi.is_projectable() {
            return Err(GeomError::NotProjectable(format!("{xi:?}")));
        }
        Ok(TildeLie { xi, s })
    }
}

impl SectionField for TildeLie {
    fn dim(&self) -> usize {
        self.s.dim()
    }

    fn jets(&self, p: &SlitPoint, order: usize) -> Result<Vec<Jet>, GeomError> {
        let br = Bracket(self.xi.clone(), Arc::new(VerticalOf(self.s.clone()))).jets(p, order)?;
        Ok(br.into_iter().skip(p.dim()).collect())
    }
}

pub fn vertical_lift(x: BaseVectorField) -> TMVectorField {
    Arc::new(VerticalLift(x))
}

pub fn complete_lift(x: BaseVectorField) -> TMVectorField {
    Arc::new(CompleteLift(x))
}

pub fn horizontal_lift(fs: &FinslerStructure, x: BaseVectorField) -> TMVectorField {
    Arc::new(HorizontalLift {
        fs: fs.clone(),
        base: x,
    })
}

pub fn horizontal_lift_at(fs: &FinslerStructure, x: BaseVectorField, p: &SlitPoint) -> Result<Vec<f64>, GeomError> {
    Ok(values(&horizontal_lift(fs, x).jets(p, 0)?))
}

pub fn horizontal_section(fs: &FinslerStructure, s: Section) -> TMVectorField {
    Arc::new(HorizontalOf { fs: fs.clone(), s })
}

pub fn liouville(n: usize) -> TMVectorField {
    Arc::new(Liouville(n))
}

pub fn spray_field(fs: &FinslerStructure) -> TMVectorField {
    Arc::new(SprayField(fs.clone()))
}

pub fn canonical_delta(n: usize) -> Section {
    Arc::new(CanonicalDelta(n))
}

pub fn basic_section(x: BaseVectorField) -> Section {
    Arc::new(BasicSection(x))
}

pub fn tm_bracket(a: TMVectorField, b: TMVectorField) -> TMVectorField {
    Arc::new(Bracket(a, b))
}

pub fn i_map(s: Section) -> TMVectorField {
    Arc::new(VerticalOf(s))
}

pub fn j_map(xi: TMVectorField) -> Section {
    Arc::new(JSection(xi))
}

/// The vertical endomorphism `J = i ∘ j`.
pub fn vertical_endomorphism(xi: TMVectorField) -> TMVectorField {
    Arc::new(JOf(xi))
}

pub fn tilde_lie(xi: TMVectorField, s: Section) -> Result<Section, GeomError> {
    Ok(Arc::new(TildeLie::new(xi, s)?))
}

/// `[ξ, η]^c = ξ^d ∂_d η^c - η^d ∂_d ξ^c` on component jets; the result has
/// one order less than the inputs.
pub fn bracket_jets(a: &[Jet], b: &[Jet], p: &SlitPoint) -> Result<Vec<Jet>, GeomError> {
    Ok(bracket_terms(a, b, p)?
        .into_iter()
        .map(|(first, second)| first - second)
        .collect())
}

fn bracket_terms(a: &[Jet], b: &[Jet], p: &SlitPoint) -> Result<Vec<(Jet, Jet)>, GeomError> {
    let m = a.len();
    let mut out = Vec::with_capacity(m);
    for c in 0..m {
        let mut first = a[c].zero_like();
        let mut second = a[c].zero_like();
        for d in 0..m {
            first = first + &a[d] * b[c].derivative(d).map_err(|e| p.jet_err(e))?;
            second = second + &b[d] * a[c].derivative(d).map_err(|e| p.jet_err(e))?;
        }
        out.push((first, second));
    }
    Ok(out)
}

pub fn bracket(xi: &dyn TmField, eta: &dyn TmField, p: &SlitPoint) -> Result<Vec<f64>, GeomError> {
    Ok(bracket_with_scale(xi, eta, p)?.0)
}

/// The bracket at `p` and `‖Dη·ξ‖ + ‖Dξ·η‖`.
pub fn bracket_with_scale(xi: &dyn TmField, eta: &dyn TmField, p: &SlitPoint) -> Result<(Vec<f64>, f64), GeomError> {
    let a = xi.jets(p, 1)?;
    let b = eta.jets(p, 1)?;
    let terms = bracket_terms(&a, &b, p)?;
    let first: Vec<f64> = terms.iter().map(|t| t.0.value()).collect();
    let second: Vec<f64> = terms.iter().map(|t| t.1.value()).collect();
    let v = first.iter().zip(&second).map(|(x, y)| x - y).collect();
    Ok((v, norm(&first) + norm(&second)))
}

/// `V(a, b) = b + N a` on a vector given by values at `p`.
pub fn vertical_map_values(fs: &FinslerStructure, v: &[f64], p: &SlitPoint) -> Result<Vec<f64>, GeomError> {
    let n = p.dim();
    let nl = values_mat(&nonlinear_jets(fs, p, 0)?);
    Ok((0..n)
        .map(|i| v[n + i] + (0..n).map(|j| nl[i][j] * v[j]).sum::<f64>())
        .collect())
}

pub fn vertical_map(fs: &FinslerStructure, xi: &dyn TmField, p: &SlitPoint) -> Result<Vec<f64>, GeomError> {
    vertical_map_values(fs, &values(&xi.jets(p, 0)?), p)
}

/// Checks that the base part of `ξ` does not depend on the fibre, by
/// comparing it at five further points of the fibre through `p`.
pub fn check_projectable(xi: &dyn TmField, p: &SlitPoint) -> Result<(), GeomError> {
    if xi.is_projectable() {
        return Ok(());
    }
    let n = p.dim();
    let base = values(&xi.jets(p, 0)?[..n]);
    let scale = 1.0 + norm(&base);
    for k in 1..=5 {
        let kf = k as f64;
        let y: Vec<f64> = p
            .y
            .iter()
            .enumerate()
            .map(|(i, v)| v * (1.0 + 0.3 * kf) + 0.17 * kf * (i as f64 + 1.0) * if k % 2 == 0 { -1.0 } else { 1.0 })
            .collect();
        let q = p.with_fibre(y);
        let a = values(&xi.jets(&q, 0)?[..n]);
        let diff = a.iter().zip(&base).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        if diff > 1e-10 * scale {
            return Err(GeomError::NotProjectable(format!(
                "base part changes by {diff:e} along the fibre at {p}"
            )));
        }
    }
    Ok(())
}

/// `L̃_ξ s = V[ξ, i(s)]` at `p`.
pub fn tilde_lie_section(
    fs: &FinslerStructure,
    xi: &TMVectorField,
    s: &Section,
    p: &SlitPoint,
) -> Result<Vec<f64>, GeomError> {
    check_projectable(xi.as_ref(), p)?;
    let is = VerticalOf(s.clone());
    let br = bracket(xi.as_ref(), &is, p)?;
    vertical_map_values(fs, &br, p)
}

/// Lie derivative of a covector on the tangent bundle:
/// `(L_ξ t)_b = ξ^a ∂_a t_b + t_a ∂_b ξ^a`.
pub fn lie_covector_jets(xi: &[Jet], t: &[Jet], p: &SlitPoint) -> Result<Vec<Jet>, GeomError> {
    let m = xi.len();
    let d = |j: &Jet, v: usize| j.derivative(v).map_err(|e| p.jet_err(e));
    let mut out = Vec::with_capacity(m);
    for b in 0..m {
        let mut acc = t[b].zero_like();
        for a in 0..m {
            acc = acc + &xi[a] * d(&t[b], a)? + &t[a] * d(&xi[a], b)?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Lie derivative of a covariant 2-tensor:
/// `(L_ξ T)_bc = ξ^a ∂_a T_bc + T_ac ∂_b ξ^a + T_ba ∂_c ξ^a`.
pub fn lie_two_tensor_jets(xi: &[Jet], t: &[Vec<Jet>], p: &SlitPoint) -> Result<Vec<Vec<Jet>>, GeomError> {
    let m = xi.len();
    let dxi: Vec<Vec<Jet>> = xi
        .iter()
        .map(|c| (0..m).map(|v| c.derivative(v).map_err(|e| p.jet_err(e))).collect())
        .collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(m);
    for b in 0..m {
        let mut row = Vec::with_capacity(m);
        for c in 0..m {
            let mut acc = t[b][c].zero_like();
            for a in 0..m {
                let dt = t[b][c].derivative(a).map_err(|e| p.jet_err(e))?;
                acc = acc + &xi[a] * dt + &t[a][c] * &dxi[a][b] + &t[b][a] * &dxi[a][c];
            }
            row.push(acc);
        }
        out.push(row);
    }
    Ok(out)
}

/// `(L̃_{X^c} g)_ij = X^c(g_ij) + ∂_i X^k g_kj + ∂_j X^k g_ik`, as jets.
pub fn tilde_lie_metric_jets(
    fs: &FinslerStructure,
    x: &BaseVectorField,
    p: &SlitPoint,
    order: usize,
) -> Result<Vec<Vec<Jet>>, GeomError> {
    let n = p.dim();
    let xc = CompleteLift(x.clone()).jets(p, order + 1)?;
    let g = metric_jets(fs, p, order + 1)?;
    let d = |j: &Jet, v: usize| j.derivative(v).map_err(|e| p.jet_err(e));
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = g[i][j].zero_like().truncate(order);
            for (a, xa) in xc.iter().enumerate() {
                acc = acc + xa * d(&g[i][j], a)?;
            }
            for k in 0..n {
                acc = acc + d(&xc[k], i)? * &g[k][j] + d(&xc[k], j)? * &g[i][k];
            }
            row.push(acc);
        }
        out.push(row);
    }
    Ok(out)
}

pub fn tilde_lie_metric(fs: &FinslerStructure, x: &BaseVectorField, p: &SlitPoint) -> Result<Mat, GeomError> {
    Ok(values_mat(&tilde_lie_metric_jets(fs, x, p, 0)?))
}

/// `L_ξ θ` with `θ = θ_i dx^i` viewed on the tangent bundle.
pub fn lie_form_theta(fs: &FinslerStructure, xi: &dyn TmField, p: &SlitPoint) -> Result<Vec<f64>, GeomError> {
    let f = xi.jets(p, 1)?;
    let theta = hilbert_covector_jets(fs, p, 1)?;
    Ok(values(&lie_covector_jets(&f, &theta, p)?))
}

pub fn lie_form_omega(fs: &FinslerStructure, xi: &dyn TmField, p: &SlitPoint) -> Result<Mat, GeomError> {
    let f = xi.jets(p, 1)?;
    let w = fundamental_form_jets(fs, p, 1)?;
    Ok(values_mat(&lie_two_tensor_jets(&f, &w, p)?))
}

pub fn lie_metric_sasaki(fs: &FinslerStructure, xi: &dyn TmField, p: &SlitPoint) -> Result<Mat, GeomError> {
    let f = xi.jets(p, 1)?;
    let gs = sasaki_jets(fs, p, 1)?;
    Ok(values_mat(&lie_two_tensor_jets(&f, &gs, p)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse;
    use crate::geometry::{field_from_strs, fundamental_form, pair};

    fn pt(x: &[f64], y: &[f64]) -> SlitPoint {
        SlitPoint::new(x.to_vec(), y.to_vec()).unwrap()
    }

    fn euclid() -> FinslerStructure {
        FinslerStructure::from_energy(2, parse("0.5*(y1^2 + y2^2)", 2, true).unwrap(), "euclidean")
    }

    fn randers() -> FinslerStructure {
        FinslerStructure::parse_finsler("sqrt(y1^2 + y2^2) + 0.3*y1", 2).unwrap()
    }

    fn field(src: &[&str]) -> BaseVectorField {
        field_from_strs(src).unwrap()
    }

    fn vals(f: &dyn TmField, p: &SlitPoint) -> Vec<f64> {
        values(&f.jets(p, 0).unwrap())
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        for (u, v) in a.iter().zip(b) {
            assert!((u - v).abs() <= tol * v.abs().max(1.0), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn lifts_of_rotation() {
        let x = field(&["-x2", "x1"]);
        let p = pt(&[1.0, 2.0], &[3.0, 4.0]);
        assert_eq!(vals(&VerticalLift(x.clone()), &p), vec![0.0, 0.0, -2.0, 1.0]);
        assert_eq!(vals(&CompleteLift(x), &p), vec![-2.0, 1.0, -4.0, 3.0]);
    }

    #[test]
    fn euclidean_horizontal_lift_is_base_part() {
        let x = field(&["x1*x2", "x2^2"]);
        let p = pt(&[0.5, -1.5], &[0.2, 0.7]);
        let h = horizontal_lift_at(&euclid(), x, &p).unwrap();
        assert_close(&h, &[-0.75, 2.25, 0.0, 0.0], 1e-13);
    }

    #[test]
    fn projective_quadratic_bracket_with_spray() {
        let x = complete_lift(field(&["x1^2", "x1*x2"]));
        let s = spray_field(&euclid());
        let p = pt(&[0.3, 0.8], &[1.5, -0.5]);
        let w = bracket(x.as_ref(), s.as_ref(), &p).unwrap();
        let (y1, y2) = (1.5, -0.5);
        assert_close(&w, &[0.0, 0.0, -2.0 * y1 * y1, -2.0 * y1 * y2], 1e-12);
    }

    #[test]
    fn basic_bracket_rules() {
        let x = field(&["x2", "x1^2"]);
        let y = field(&["sin(x1)", "x1*x2"]);
        let xy = base_bracket(x.clone(), y.clone());
        let p = pt(&[0.4, 1.1], &[0.9, -0.6]);
        let (xv, yv, xc, yc) = (
            vertical_lift(x.clone()),
            vertical_lift(y.clone()),
            complete_lift(x.clone()),
            complete_lift(y.clone()),
        );
        assert_close(&bracket(xv.as_ref(), yv.as_ref(), &p).unwrap(), &[0.0; 4], 1e-14);
        assert_close(
            &bracket(xc.as_ref(), yv.as_ref(), &p).unwrap(),
            &vals(&VerticalLift(xy.clone()), &p),
            1e-13,
        );
        assert_close(
            &bracket(xc.as_ref(), yc.as_ref(), &p).unwrap(),
            &vals(&CompleteLift(xy), &p),
            1e-13,
        );
    }

    #[test]
    fn liouville_brackets() {
        let p = pt(&[0.4, 1.1], &[0.9, -0.6]);
        let c = liouville(2);
        let s = spray_field(&randers());
        let x = field(&["x2", "x1^2"]);
        let xc = complete_lift(x.clone());
        let xv = vertical_lift(x);
        let xvv = vals(xv.as_ref(), &p);
        assert_close(&bracket(c.as_ref(), s.as_ref(), &p).unwrap(), &vals(s.as_ref(), &p), 1e-10);
        assert_close(&bracket(c.as_ref(), xc.as_ref(), &p).unwrap(), &[0.0; 4], 1e-13);
        let neg: Vec<f64> = xvv.iter().map(|v| -v).collect();
        assert_close(&bracket(c.as_ref(), xv.as_ref(), &p).unwrap(), &neg, 1e-13);
    }

    #[test]
    fn j_and_i_maps() {
        let p = pt(&[0.4, 1.1], &[0.9, -0.6]);
        let s = spray_field(&randers());
        let delta = values(&j_map(s.clone()).jets(&p, 0).unwrap());
        assert_close(&delta, &p.y, 1e-12);
        let js = vertical_endomorphism(s);
        assert_close(&vals(js.as_ref(), &p), &vals(liouville(2).as_ref(), &p), 1e-12);
    }

    #[test]
    fn tilde_lie_of_delta_is_zero_for_complete_lifts() {
        let fs = randers();
        let p = pt(&[0.4, 1.1], &[0.9, -0.6]);
        let xc = complete_lift(field(&["x2*x1", "x1^2"]));
        let v = tilde_lie_section(&fs, &xc, &canonical_delta(2), &p).unwrap();
        assert_close(&v, &[0.0, 0.0], 1e-13);
    }

    #[test]
    fn tilde_lie_is_independent_of_connection() {
        let p = pt(&[0.4, 1.1], &[0.9, -0.6]);
        let xc = complete_lift(field(&["x2*x1", "x1^2"]));
        let s: Section = Arc::new(ExprSection(vec![
            parse("x1*y2", 2, true).unwrap(),
            parse("y1^2 + x2", 2, true).unwrap(),
        ]));
        let a = tilde_lie_section(&euclid(), &xc, &s, &p).unwrap();
        let b = tilde_lie_section(&randers(), &xc, &s, &p).unwrap();
        assert_close(&a, &b, 1e-13);
    }

    #[test]
    fn tilde_lie_rejects_non_projectable_fields() {
        let p = pt(&[0.4, 1.1], &[0.9, -0.6]);
        let s = spray_field(&euclid());
        assert!(matches!(
            tilde_lie_section(&euclid(), &s, &canonical_delta(2), &p),
            Err(GeomError::NotProjectable(_))
        ));
        assert!(TildeLie::new(s, canonical_delta(2)).is_err());
    }

    #[test]
    fn lie_derivative_of_omega_along_spray_vanishes() {
        let fs = randers();
        let p = pt(&[0.4, 1.1], &[0.9, -0.6]);
        let s = spray_field(&fs);
        let l = lie_form_omega(&fs, s.as_ref(), &p).unwrap();
        assert!(l.iter().flatten().all(|v| v.abs() < 1e-9), "{l:?}");
    }

    #[test]
    fn liouville_scales_theta() {
        // E is 2-homogeneous, so L_C θ = θ
        let fs = randers();
        let p = pt(&[0.4, 1.1], &[0.9, -0.6]);
        let l = lie_form_theta(&fs, liouville(2).as_ref(), &p).unwrap();
        let theta = values(&hilbert_covector_jets(&fs, &p, 0).unwrap());
        assert_close(&l, &theta, 1e-12);
        let w = fundamental_form(&fs, &p).unwrap();
        let lw = lie_form_omega(&fs, liouville(2).as_ref(), &p).unwrap();
        assert_close(&lw.concat(), &w.concat(), 1e-12);
        let xi = [1.0, 2.0, 3.0, 4.0];
        assert!((pair(&lw, &xi, &xi)).abs() < 1e-12);
    }

    #[test]
    fn killing_metric_derivative_vanishes() {
        let fs = euclid();
        let p = pt(&[0.4, 1.1], &[0.9, -0.6]);
        let l = tilde_lie_metric(&fs, &field(&["-x2", "x1"]), &p).unwrap();
        assert!(l.iter().flatten().all(|v| v.abs() < 1e-14));
        let l = tilde_lie_metric(&fs, &field(&["x1", "x2"]), &p).unwrap();
        assert_close(&l.concat(), &[2.0, 0.0, 0.0, 2.0], 1e-14);
    }
}
