//! Univariate expressions with fuzzy-number constants.
//!
//! The grammar (see [`parse`]) covers the forms used by the limit engine:
//! `+ - * / ^` with `^` binding tightest and right-associative, unary
//! minus between `^` and `*`, function calls `exp sin abs sqrt`, bare
//! numbers as singleton constants, 3-tuples `(a, b, c)` as triangular
//! constants, and piecewise blocks `{ expr if cond ; ... }`.

mod lexer;
mod parser;

pub use lexer::{tokenize, Token};
pub use parser::parse;

use crate::fuzzy::{AlphaGrid, FuzzyNumber};
use std::fmt;
use thiserror::Error;

/// Grid used to materialize constants; singleton and triangular cuts are
/// closed-form, so a minimal stack suffices at any α.
pub(crate) fn const_grid() -> AlphaGrid {
    AlphaGrid { levels: 3 }
}

/// Expression AST. `Var` is the single free variable `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var,
    Const(FuzzyNumber),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    PowInt(Box<Expr>, u32),
    Unary(UnaryFn, Box<Expr>),
    Piecewise(Vec<(Guard, Expr)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryFn {
    Exp,
    Sin,
    Abs,
    Sqrt,
}

impl UnaryFn {
    pub fn name(self) -> &'static str {
        match self {
            UnaryFn::Exp => "exp",
            UnaryFn::Sin => "sin",
            UnaryFn::Abs => "abs",
            UnaryFn::Sqrt => "sqrt",
        }
    }

    pub fn apply(self, v: f64) -> Result<f64, ScalarError> {
        match self {
            UnaryFn::Exp => Ok(v.exp()),
            UnaryFn::Sin => Ok(v.sin()),
            UnaryFn::Abs => Ok(v.abs()),
            UnaryFn::Sqrt => {
                if v < 0.0 {
                    Err(ScalarError::Domain {
                        what: format!("sqrt of negative value {v}"),
                    })
                } else {
                    Ok(v.sqrt())
                }
            }
        }
    }
}

/// A piecewise branch condition against a fuzzy bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Guard {
    pub op: GuardOp,
    pub bound: FuzzyNumber,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuardOp {
    Lt,
    Gt,
    Eq,
}

/// Errors from crisp scalar evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error: {what}")]
    Domain { what: String },
    #[error("no piecewise branch holds at x = {x}")]
    NoBranch { x: f64 },
}

impl Expr {
    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn constant(n: FuzzyNumber) -> Expr {
        Expr::Const(n)
    }

    pub fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }

    pub fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }

    pub fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }

    pub fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }

    pub fn pow(self, n: u32) -> Expr {
        Expr::PowInt(Box::new(self), n)
    }

    /// Replaces every occurrence of the variable with `inner`.
    pub fn substitute(&self, inner: &Expr) -> Expr {
        match self {
            Expr::Var => inner.clone(),
            Expr::Const(n) => Expr::Const(n.clone()),
            Expr::Neg(e) => Expr::Neg(Box::new(e.substitute(inner))),
            Expr::Add(a, b) => Expr::Add(Box::new(a.substitute(inner)), Box::new(b.substitute(inner))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.substitute(inner)), Box::new(b.substitute(inner))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.substitute(inner)), Box::new(b.substitute(inner))),
            Expr::Div(a, b) => Expr::Div(Box::new(a.substitute(inner)), Box::new(b.substitute(inner))),
            Expr::PowInt(e, n) => Expr::PowInt(Box::new(e.substitute(inner)), *n),
            Expr::Unary(f, e) => Expr::Unary(*f, Box::new(e.substitute(inner))),
            Expr::Piecewise(branches) => Expr::Piecewise(
                branches
                    .iter()
                    .map(|(g, e)| (g.clone(), e.substitute(inner)))
                    .collect(),
            ),
        }
    }

    /// Ordinary real evaluation; fuzzy constants collapse to their core
    /// midpoint and piecewise guards test against the bound's core midpoint.
    pub fn eval_scalar(&self, x: f64) -> Result<f64, ScalarError> {
        match self {
            Expr::Var => Ok(x),
            Expr::Const(n) => Ok(n.core().midpoint()),
            Expr::Neg(e) => Ok(-e.eval_scalar(x)?),
            Expr::Add(a, b) => Ok(a.eval_scalar(x)? + b.eval_scalar(x)?),
            Expr::Sub(a, b) => Ok(a.eval_scalar(x)? - b.eval_scalar(x)?),
            Expr::Mul(a, b) => Ok(a.eval_scalar(x)? * b.eval_scalar(x)?),
            Expr::Div(a, b) => {
                let d = b.eval_scalar(x)?;
                if d == 0.0 {
                    return Err(ScalarError::DivisionByZero);
                }
                Ok(a.eval_scalar(x)? / d)
            }
            Expr::PowInt(e, n) => Ok(e.eval_scalar(x)?.powi(*n as i32)),
            Expr::Unary(f, e) => f.apply(e.eval_scalar(x)?),
            Expr::Piecewise(branches) => {
                for (guard, body) in branches {
                    let m = guard.bound.core().midpoint();
                    let holds = match guard.op {
                        GuardOp::Lt => x < m,
                        GuardOp::Gt => x > m,
                        GuardOp::Eq => x == m,
                    };
                    if holds {
                        return body.eval_scalar(x);
                    }
                }
                Err(ScalarError::NoBranch { x })
            }
        }
    }
}

// Precedence ranks for printing: higher binds tighter.
const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => PREC_ADD,
        Expr::Mul(..) | Expr::Div(..) => PREC_MUL,
        Expr::Neg(..) => PREC_NEG,
        Expr::PowInt(..) => PREC_POW,
        Expr::Var | Expr::Const(..) | Expr::Unary(..) | Expr::Piecewise(..) => PREC_ATOM,
    }
}

fn fmt_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if prec(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn fmt_const(f: &mut fmt::Formatter<'_>, n: &FuzzyNumber) -> fmt::Result {
    use crate::fuzzy::Kind;
    match n.kind() {
        Kind::Singleton(r) => write!(f, "{r}"),
        Kind::Triangular(a, b, c) => write!(f, "({a}, {b}, {c})"),
        // no literal syntax for general stacks; print a triangular sketch
        Kind::General => {
            let s = n.support();
            write!(f, "({}, {}, {})", s.lo, n.core().midpoint(), s.hi)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var => write!(f, "x"),
            Expr::Const(n) => fmt_const(f, n),
            Expr::Neg(e) => {
                write!(f, "-")?;
                fmt_child(f, e, PREC_NEG)
            }
            Expr::Add(a, b) => {
                fmt_child(f, a, PREC_ADD)?;
                write!(f, " + ")?;
                fmt_child(f, b, PREC_ADD + 1)
            }
            Expr::Sub(a, b) => {
                fmt_child(f, a, PREC_ADD)?;
                write!(f, " - ")?;
                fmt_child(f, b, PREC_ADD + 1)
            }
            Expr::Mul(a, b) => {
                fmt_child(f, a, PREC_MUL)?;
                write!(f, "*")?;
                fmt_child(f, b, PREC_MUL + 1)
            }
            Expr::Div(a, b) => {
                fmt_child(f, a, PREC_MUL)?;
                write!(f, "/")?;
                fmt_child(f, b, PREC_MUL + 1)
            }
            Expr::PowInt(e, n) => {
                // a negative singleton base would reparse as a negation of
                // the whole power
                let negative_const = matches!(
                    &**e,
                    Expr::Const(c) if matches!(c.kind(), crate::fuzzy::Kind::Singleton(r) if r < 0.0)
                );
                if negative_const {
                    write!(f, "({e})^{n}")
                } else {
                    fmt_child(f, e, PREC_ATOM)?;
                    write!(f, "^{n}")
                }
            }
            Expr::Unary(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Piecewise(branches) => {
                write!(f, "{{ ")?;
                for (i, (guard, body)) in branches.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ; ")?;
                    }
                    let op = match guard.op {
                        GuardOp::Lt => "<",
                        GuardOp::Gt => ">",
                        GuardOp::Eq => "==",
                    };
                    write!(f, "{body} if x {op} ")?;
                    fmt_const(f, &guard.bound)?;
                }
                write!(f, " }}")
            }
        }
    }
}
