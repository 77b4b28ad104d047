//! A small language of smooth expressions in `x1..xn` (base coordinates) and
//! `y1..yn` (fibre coordinates).
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = ("-" | "+") unary | power ;
//! power    = primary [ "^" exponent ] ;
//! exponent = [ "+" | "-" ] INTEGER [ "^" exponent ] ;
//! primary  = NUMBER | VAR | FUNC "(" expr ")"
//!          | "pow" "(" expr "," exponent ")" | "(" expr ")" ;
//! FUNC     = "sqrt" | "sin" | "cos" | "exp" | "log" ;
//! VAR      = ("x" | "y") DIGITS ;        (1-based, at most the dimension)
//! ```
//!
//! Exponents are integer literals. There is no `abs`, `min` or `max`.

mod parser;

use std::fmt;

use thiserror::Error;

use crate::jets::{Jet, JetError, JetPoint, VarKind};

/// Source offset of a node. Ignored by equality.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span(pub usize);

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var {
    pub kind: VarKind,
    /// 1-based coordinate index.
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        span: Span,
    },
    Pow {
        base: Box<Expr>,
        exp: i32,
        span: Span,
    },
    Call {
        func: Func,
        arg: Box<Expr>,
        span: Span,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("malformed number `{0}`")]
    BadNumber(String),
    #[error("expected {expected}, found {found}")]
    UnexpectedToken { found: String, expected: String },
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEnd(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("`{name}` exceeds the dimension {dim}")]
    IndexOutOfRange { name: String, dim: usize },
    #[error("fibre variable `{0}` is not allowed here")]
    FibreVariable(String),
    #[error("exponent must be an integer literal")]
    NonIntegerExponent,
    #[error("expected {expected} components, found {found}")]
    ComponentCount { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at offset {pos}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: usize,
}

/// An evaluation failure inside an expression.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{source} in `{node}` (offset {pos})")]
pub struct EvalError {
    pub source: JetError,
    pub pos: usize,
    pub node: String,
}

/// Parses `source` as an expression over `dim` coordinates.
pub fn parse(source: &str, dim: usize, allow_fibre_vars: bool) -> Result<Expr, ParseError> {
    parser::Parser::new(source, dim, allow_fibre_vars)?.parse_complete()
}

/// Evaluates `e` as a jet of the given order expanded at `point`.
pub fn evaluate(e: &Expr, point: &JetPoint, order: usize) -> Result<Jet, EvalError> {
    let vars = point.coordinate_jets(order).map_err(|source| EvalError {
        source,
        pos: 0,
        node: e.to_string(),
    })?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (jet, kind) in vars.into_iter().zip(&point.var_kinds) {
        match kind {
            VarKind::Base => xs.push(jet),
            VarKind::Fibre => ys.push(jet),
        }
    }
    e.eval_jets(&xs, &ys)
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        if v < 0.0 {
            Expr::Neg(Box::new(Expr::Num(-v)))
        } else {
            Expr::Num(v)
        }
    }

    pub fn x(index: usize) -> Expr {
        Expr::Var(Var {
            kind: VarKind::Base,
            index,
        })
    }

    pub fn y(index: usize) -> Expr {
        Expr::Var(Var {
            kind: VarKind::Fibre,
            index,
        })
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
            span: Span::default(),
        }
    }

    pub fn powi(self, exp: i32) -> Expr {
        Expr::Pow {
            base: Box::new(self),
            exp,
            span: Span::default(),
        }
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call {
            func,
            arg: Box::new(arg),
            span: Span::default(),
        }
    }

    /// Whether any `y` variable occurs.
    pub fn uses_fibre(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(v) => v.kind == VarKind::Fibre,
            Expr::Neg(e) => e.uses_fibre(),
            Expr::Binary { lhs, rhs, .. } => lhs.uses_fibre() || rhs.uses_fibre(),
            Expr::Pow { base, .. } => base.uses_fibre(),
            Expr::Call { arg, .. } => arg.uses_fibre(),
        }
    }

    /// Largest coordinate index referenced.
    pub fn max_index(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(v) => v.index,
            Expr::Neg(e) => e.max_index(),
            Expr::Binary { lhs, rhs, .. } => lhs.max_index().max(rhs.max_index()),
            Expr::Pow { base, .. } => base.max_index(),
            Expr::Call { arg, .. } => arg.max_index(),
        }
    }

    /// Recursive evaluation over jets; `xs[i]` and `ys[i]` are the jets
    /// substituted for `x{i+1}` and `y{i+1}`.
    pub fn eval_jets(&self, xs: &[Jet], ys: &[Jet]) -> Result<Jet, EvalError> {
        let template = xs.first().or(ys.first()).expect("no variables supplied");
        self.eval_inner(xs, ys, template)
    }

    fn eval_inner(&self, xs: &[Jet], ys: &[Jet], template: &Jet) -> Result<Jet, EvalError> {
        let fail = |source: JetError, span: &Span| EvalError {
            source,
            pos: span.0,
            node: self.to_string(),
        };
        Ok(match self {
            Expr::Num(v) => template.constant_like(*v),
            Expr::Var(v) => {
                let slot = match v.kind {
                    VarKind::Base => xs.get(v.index - 1),
                    VarKind::Fibre => ys.get(v.index - 1),
                };
                slot.cloned().ok_or_else(|| EvalError {
                    source: JetError::IndexOutOfRange {
                        index: v.index,
                        num_vars: xs.len().max(ys.len()),
                    },
                    pos: 0,
                    node: self.to_string(),
                })?
            }
            Expr::Neg(e) => -e.eval_inner(xs, ys, template)?,
            Expr::Binary { op, lhs, rhs, span } => {
                let a = lhs.eval_inner(xs, ys, template)?;
                let b = rhs.eval_inner(xs, ys, template)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a.try_div(&b).map_err(|e| fail(e, span))?,
                }
            }
            Expr::Pow { base, exp, span } => base
                .eval_inner(xs, ys, template)?
                .powi(*exp)
                .map_err(|e| fail(e, span))?,
            Expr::Call { func, arg, span } => {
                let a = arg.eval_inner(xs, ys, template)?;
                match func {
                    Func::Sqrt => a.sqrt().map_err(|e| fail(e, span))?,
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp().map_err(|e| fail(e, span))?,
                    Func::Log => a.ln().map_err(|e| fail(e, span))?,
                }
            }
        })
    }

    /// Plain floating-point evaluation. Shares no code with the jet path and
    /// serves as the reference for finite-difference checks. Out-of-domain
    /// inputs yield NaN or infinities.
    pub fn eval_f64(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(v) => match v.kind {
                VarKind::Base => x[v.index - 1],
                VarKind::Fibre => y[v.index - 1],
            },
            Expr::Neg(e) => -e.eval_f64(x, y),
            Expr::Binary { op, lhs, rhs, .. } => {
                let a = lhs.eval_f64(x, y);
                let b = rhs.eval_f64(x, y);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Expr::Pow { base, exp, .. } => base.eval_f64(x, y).powi(*exp),
            Expr::Call { func, arg, .. } => {
                let a = arg.eval_f64(x, y);
                match func {
                    Func::Sqrt => a.sqrt(),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Log => a.ln(),
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary {
                op: BinOp::Add | BinOp::Sub,
                ..
            } => 1,
            Expr::Binary { .. } => 2,
            Expr::Neg(_) => 3,
            Expr::Num(v) if *v < 0.0 => 3,
            Expr::Pow { .. } => 4,
            _ => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let wrap = self.precedence() < min_prec;
        if wrap {
            f.write_str("(")?;
        }
        match self {
            Expr::Num(v) => write!(f, "{v}")?,
            Expr::Var(v) => {
                let c = match v.kind {
                    VarKind::Base => 'x',
                    VarKind::Fibre => 'y',
                };
                write!(f, "{c}{}", v.index)?
            }
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.fmt_at(f, 3)?;
            }
            Expr::Binary { op, lhs, rhs, .. } => {
                let (sym, prec) = match op {
                    BinOp::Add => (" + ", 1),
                    BinOp::Sub => (" - ", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                };
                lhs.fmt_at(f, prec)?;
                f.write_str(sym)?;
                rhs.fmt_at(f, prec + 1)?;
            }
            Expr::Pow { base, exp, .. } => {
                base.fmt_at(f, 5)?;
                write!(f, "^{exp}")?;
            }
            Expr::Call { func, arg, .. } => {
                write!(f, "{}(", func.name())?;
                arg.fmt_at(f, 0)?;
                f.write_str(")")?;
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// Components of a vector field on the base, each a function of `x` only.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldExpr {
    pub components: Vec<Expr>,
}

impl FieldExpr {
    pub fn dim(&self) -> usize {
        self.components.len()
    }
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

/// Splits `source` at commas outside parentheses and brackets.
pub fn split_top_level(source: &str) -> Vec<(usize, &str)> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in source.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push((start, &source[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push((start, &source[start..]));
    parts
}

/// Parses `"[e1, ..., en]"` (brackets optional) into a base vector field.
pub fn parse_field(source: &str, dim: usize) -> Result<FieldExpr, ParseError> {
    let trimmed = source.trim();
    let (offset, body) = match trimmed.strip_prefix('[') {
        Some(rest) => match rest.strip_suffix(']') {
            Some(body) => (source.find('[').unwrap_or(0) + 1, body),
            None => {
                return Err(ParseError {
                    kind: ParseErrorKind::UnexpectedEnd("`]`".into()),
                    pos: source.len(),
                })
            }
        },
        None => (source.len() - source.trim_start().len(), trimmed),
    };
    let parts = split_top_level(body);
    if parts.len() != dim {
        return Err(ParseError {
            kind: ParseErrorKind::ComponentCount {
                expected: dim,
                found: parts.len(),
            },
            pos: offset,
        });
    }
    let components = parts
        .into_iter()
        .map(|(start, text)| {
            parse(text, dim, false).map_err(|mut e| {
                e.pos += offset + start;
                e
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FieldExpr { components })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(x: &[f64], y: &[f64]) -> JetPoint {
        JetPoint::tangent(x, y)
    }

    #[test]
    fn euclidean_norm_evaluates() {
        let e = parse("sqrt(y1^2 + y2^2)", 2, true).unwrap();
        let v = evaluate(&e, &at(&[0.0, 0.0], &[3.0, 4.0]), 1).unwrap();
        assert!((v.value() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn precedence_of_product_and_power() {
        let e = parse("x1 + 2*x2^3", 2, false).unwrap();
        let expected = Expr::binary(
            BinOp::Add,
            Expr::x(1),
            Expr::binary(BinOp::Mul, Expr::Num(2.0), Expr::x(2).powi(3)),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(
            parse("-x1^2", 1, false).unwrap(),
            Expr::Neg(Box::new(Expr::x(1).powi(2)))
        );
        assert_eq!(parse("2^3^2", 1, false).unwrap(), Expr::Num(2.0).powi(9));
        assert_eq!(parse("x1^-2", 1, false).unwrap(), Expr::x(1).powi(-2));
    }

    #[test]
    fn trailing_operator_is_a_syntax_error() {
        let err = parse("y1 + ", 1, true).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::UnexpectedEnd(_)));
        assert_eq!(err.pos, 5);
    }

    #[test]
    fn identifier_checks() {
        assert!(matches!(
            parse("x3", 2, true).unwrap_err().kind,
            ParseErrorKind::IndexOutOfRange { .. }
        ));
        assert!(matches!(
            parse("y1", 2, false).unwrap_err().kind,
            ParseErrorKind::FibreVariable(_)
        ));
        assert!(matches!(
            parse("z1", 2, true).unwrap_err().kind,
            ParseErrorKind::UnknownIdentifier(_)
        ));
        assert!(matches!(
            parse("abs(x1)", 2, true).unwrap_err().kind,
            ParseErrorKind::UnknownFunction(_)
        ));
        assert!(matches!(
            parse("x1^0.5", 2, true).unwrap_err().kind,
            ParseErrorKind::NonIntegerExponent
        ));
        assert!(matches!(
            parse("x1^y1", 2, true).unwrap_err().kind,
            ParseErrorKind::NonIntegerExponent
        ));
    }

    #[test]
    fn euclidean_energy_hessian() {
        let e = parse("0.5*(y1^2+y2^2)", 2, true).unwrap();
        let j = evaluate(&e, &at(&[0.3, -2.0], &[1.1, 0.4]), 2).unwrap();
        assert_eq!(j.partial(&[0, 0, 2, 0]).unwrap(), 1.0);
        assert_eq!(j.partial(&[0, 0, 0, 2]).unwrap(), 1.0);
        assert_eq!(j.partial(&[0, 0, 1, 1]).unwrap(), 0.0);
    }

    #[test]
    fn randers_value() {
        let e = parse("sqrt(y1^2+y2^2) + 0.3*y1", 2, true).unwrap();
        let j = evaluate(&e, &at(&[0.0, 0.0], &[1.0, 0.0]), 2).unwrap();
        assert!((j.value() - 1.3).abs() < 1e-15);
    }

    #[test]
    fn log_domain_error_carries_location() {
        let e = parse("1 + log(x1)", 1, false).unwrap();
        let err = evaluate(&e, &JetPoint::base(&[-1.0]), 1).unwrap_err();
        assert_eq!(err.pos, 4);
        assert_eq!(err.node, "log(x1)");
        assert!(matches!(err.source, JetError::Domain { op: "log", .. }));
    }

    #[test]
    fn pow_function_is_sugar() {
        assert_eq!(
            parse("pow(x1 + 1, 3)", 1, false).unwrap(),
            parse("(x1 + 1)^3", 1, false).unwrap()
        );
    }

    #[test]
    fn field_parsing() {
        let f = parse_field("[x1^2, x1*x2]", 2).unwrap();
        assert_eq!(f.dim(), 2);
        assert_eq!(f.to_string(), "[x1^2, x1*x2]");
        let f = parse_field("pow(x1, 2), x2", 2).unwrap();
        assert_eq!(f.components[0], Expr::x(1).powi(2));
        assert!(matches!(
            parse_field("[x1]", 2).unwrap_err().kind,
            ParseErrorKind::ComponentCount { .. }
        ));
        assert!(matches!(
            parse_field("[x1, y1]", 2).unwrap_err().kind,
            ParseErrorKind::FibreVariable(_)
        ));
    }

    #[test]
    fn printing_reparses_to_the_same_tree() {
        for src in ["-(x1 - x2)", "x1 - (x2 - x1)", "(x1/x2)/x1", "x1/(x2/x1)", "(-x1)^2", "(x1^2)^3", "--x1"] {
            let e = parse(src, 2, true).unwrap();
            let printed = e.to_string();
            assert_eq!(parse(&printed, 2, true).unwrap(), e, "{src} -> {printed}");
        }
    }
}
