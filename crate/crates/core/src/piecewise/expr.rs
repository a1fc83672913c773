//! Closed-form real expressions in one variable `x`, used for the
//! continuous pieces of an interval function.

use std::fmt;
use std::sync::Arc;

use super::poly::Poly;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    fn apply(self, v: &Scalar) -> Option<Scalar> {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Sqrt => v.sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Scalar),
    Pi,
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExprKind {
    Polynomial,
    Rational,
    Transcendental,
}

impl Expr {
    /// Negation that folds constants, so `Neg(Const)` never appears.
    pub fn negate(self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(-c),
            e => Expr::Neg(Box::new(e)),
        }
    }

    /// Division that folds two constants into one.
    pub fn divide(num: Expr, den: Expr) -> Expr {
        if let (Expr::Const(a), Expr::Const(b)) = (&num, &den) {
            if let Some(q) = a.checked_div(b) {
                return Expr::Const(q);
            }
        }
        Expr::Div(Box::new(num), Box::new(den))
    }

    pub fn eval(&self, x: &Scalar) -> Option<Scalar> {
        Some(match self {
            Expr::Const(c) => c.clone(),
            Expr::Pi => Scalar::Float(std::f64::consts::PI),
            Expr::X => x.clone(),
            Expr::Neg(a) => -a.eval(x)?,
            Expr::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Expr::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Expr::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Expr::Div(a, b) => a.eval(x)?.checked_div(&b.eval(x)?)?,
            Expr::Call(f, a) => f.apply(&a.eval(x)?)?,
            Expr::Min(a, b) => a.eval(x)?.min(b.eval(x)?),
            Expr::Max(a, b) => a.eval(x)?.max(b.eval(x)?),
        })
        .filter(|v| v.to_f64().is_finite())
    }

    pub fn as_poly(&self) -> Option<Poly> {
        Some(match self {
            Expr::Const(c) => Poly::constant(c.clone()),
            Expr::Pi => Poly::constant(Scalar::Float(std::f64::consts::PI)),
            Expr::X => Poly::x(),
            Expr::Neg(a) => a.as_poly()?.neg(),
            Expr::Add(a, b) => a.as_poly()?.add(&b.as_poly()?),
            Expr::Sub(a, b) => a.as_poly()?.sub(&b.as_poly()?),
            Expr::Mul(a, b) => a.as_poly()?.mul(&b.as_poly()?),
            Expr::Div(a, b) => {
                let den = b.as_poly()?.as_constant()?;
                let inv = Scalar::one().checked_div(&den)?;
                a.as_poly()?.scale(&inv)
            }
            Expr::Call(f, a) => {
                let c = a.as_poly()?.as_constant()?;
                Poly::constant(f.apply(&c)?)
            }
            Expr::Min(_, _) | Expr::Max(_, _) => return None,
        })
    }

    fn is_rational_form(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Pi | Expr::X => true,
            Expr::Neg(a) => a.is_rational_form(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_rational_form() && b.is_rational_form()
            }
            Expr::Call(_, _) | Expr::Min(_, _) | Expr::Max(_, _) => false,
        }
    }

    fn collect_denominators<'a>(&'a self, out: &mut Vec<&'a Expr>) {
        match self {
            Expr::Const(_) | Expr::Pi | Expr::X => {}
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_denominators(out),
            Expr::Div(a, b) => {
                out.push(b);
                a.collect_denominators(out);
                b.collect_denominators(out);
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Min(a, b) | Expr::Max(a, b) => {
                a.collect_denominators(out);
                b.collect_denominators(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(_, _) | Expr::Sub(_, _) => 1,
            Expr::Mul(_, _) | Expr::Div(_, _) => 2,
            Expr::Neg(_) => 3,
            // Negative constants print with a leading minus, which binds
            // like unary negation.
            Expr::Const(c) if c.is_decimal() && *c < Scalar::zero() => 3,
            _ => 4,
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr, prec: u8| {
            a.write_child(f, a.precedence() < prec)?;
            f.write_str(op)?;
            b.write_child(f, b.precedence() <= prec)
        };
        match self {
            Expr::Const(c) if c.is_decimal() => f.write_str(&c.to_text()),
            Expr::Const(c) => write!(f, "({})", c.to_text()),
            Expr::Pi => f.write_str("pi"),
            Expr::X => f.write_str("x"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.write_child(f, a.precedence() < 3)
            }
            Expr::Add(a, b) => binary(f, a, " + ", b, 1),
            Expr::Sub(a, b) => binary(f, a, " - ", b, 1),
            Expr::Mul(a, b) => binary(f, a, "*", b, 2),
            Expr::Div(a, b) => binary(f, a, "/", b, 2),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Min(a, b) => write!(f, "min({a}, {b})"),
            Expr::Max(a, b) => write!(f, "max({a}, {b})"),
        }
    }
}

/// An expression attached to a piece, shared cheaply between functions.
#[derive(Clone, Debug)]
pub struct PieceExpr(Arc<Expr>);

impl PieceExpr {
    pub fn new(root: Expr) -> Self {
        PieceExpr(Arc::new(root))
    }

    pub fn constant(c: Scalar) -> Self {
        PieceExpr::new(Expr::Const(c))
    }

    pub fn x() -> Self {
        PieceExpr::new(Expr::X)
    }

    /// Canonical tree for a polynomial: `c0 + c1*x + c2*x*x ...`.
    pub fn from_poly(p: &Poly) -> Self {
        let mut acc: Option<Expr> = None;
        for (i, c) in p.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let negative = *c < Scalar::zero() && acc.is_some();
            let magnitude = if negative { -c } else { c.clone() };
            // Left-nested products print without parentheses: `3*x*x`.
            let (start, factors) = if i > 0 && magnitude == Scalar::one() {
                (Expr::X, i - 1)
            } else {
                (Expr::Const(magnitude), i)
            };
            let term = (0..factors).fold(start, |t, _| Expr::Mul(Box::new(t), Box::new(Expr::X)));
            acc = Some(match acc {
                None => term,
                Some(prev) if negative => Expr::Sub(Box::new(prev), Box::new(term)),
                Some(prev) => Expr::Add(Box::new(prev), Box::new(term)),
            });
        }
        PieceExpr::new(acc.unwrap_or(Expr::Const(Scalar::zero())))
    }

    pub fn root(&self) -> &Expr {
        &self.0
    }

    pub fn eval(&self, x: &Scalar) -> Option<Scalar> {
        self.0.eval(x)
    }

    pub fn as_poly(&self) -> Option<Poly> {
        self.0.as_poly()
    }

    pub fn kind(&self) -> ExprKind {
        if self.as_poly().is_some() {
            ExprKind::Polynomial
        } else if self.0.is_rational_form() {
            ExprKind::Rational
        } else {
            ExprKind::Transcendental
        }
    }

    /// Degree-at-most-one polynomial, returned as `(intercept, slope)`.
    pub fn as_linear(&self) -> Option<(Scalar, Scalar)> {
        let p = self.as_poly()?;
        (p.degree() <= 1).then(|| (p.coeff(0), p.coeff(1)))
    }

    pub fn is_linear(&self) -> bool {
        self.as_linear().is_some()
    }

    pub fn denominators(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        self.0.collect_denominators(&mut out);
        out
    }

    fn combine(
        a: &PieceExpr,
        b: &PieceExpr,
        poly: impl Fn(&Poly, &Poly) -> Poly,
        tree: impl Fn(Box<Expr>, Box<Expr>) -> Expr,
    ) -> PieceExpr {
        match (a.as_poly(), b.as_poly()) {
            (Some(p), Some(q)) => PieceExpr::from_poly(&poly(&p, &q)),
            _ => PieceExpr::new(tree(Box::new(a.root().clone()), Box::new(b.root().clone()))),
        }
    }

    pub fn add(&self, other: &PieceExpr) -> PieceExpr {
        Self::combine(self, other, Poly::add, Expr::Add)
    }

    pub fn sub(&self, other: &PieceExpr) -> PieceExpr {
        Self::combine(self, other, Poly::sub, Expr::Sub)
    }

    pub fn mul(&self, other: &PieceExpr) -> PieceExpr {
        Self::combine(self, other, Poly::mul, Expr::Mul)
    }

    pub fn neg(&self) -> PieceExpr {
        match self.as_poly() {
            Some(p) => PieceExpr::from_poly(&p.neg()),
            None => PieceExpr::new(self.root().clone().negate()),
        }
    }

    pub fn min(&self, other: &PieceExpr) -> PieceExpr {
        if self.same_as(other, 0.0) {
            return self.clone();
        }
        PieceExpr::new(Expr::Min(Box::new(self.root().clone()), Box::new(other.root().clone())))
    }

    pub fn max(&self, other: &PieceExpr) -> PieceExpr {
        if self.same_as(other, 0.0) {
            return self.clone();
        }
        PieceExpr::new(Expr::Max(Box::new(self.root().clone()), Box::new(other.root().clone())))
    }

    /// Symbolic equality: polynomial coefficients when both sides are
    /// polynomials, structural equality of the trees otherwise.
    pub fn same_as(&self, other: &PieceExpr, tol: f64) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (self.as_poly(), other.as_poly()) {
            (Some(p), Some(q)) => p.approx_eq(&q, tol),
            _ => self.root() == other.root(),
        }
    }
}

impl PartialEq for PieceExpr {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other, 0.0)
    }
}

impl fmt::Display for PieceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
