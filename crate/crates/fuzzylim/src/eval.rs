//! Interval arithmetic and whole-expression evaluation over α-cut boxes.
//!
//! Three evaluation semantics are exposed through [`EvalMode`]:
//!
//! * [`EvalMode::PaperVertex`] — correlated endpoint enumeration. The
//!   variable gets a global list of copies `c1..cN` (N = the largest power
//!   it is raised to); `x^n` maps to the product `c1*...*cn` and a bare `x`
//!   to `c1`, so `(x^3 - 4)/(x^2 + 1)` over a box enumerates exactly the
//!   eight cases `(ci*cj*ck - 4)/(ci*cj + 1)`. Every non-degenerate fuzzy
//!   constant contributes its own independent endpoint index. This is not
//!   an enclosure of the true range: `x^2` over `[-1, 2]` yields `[-2, 4]`
//!   via the cross term, and composite bases like `(x+1)^2` are powered
//!   after enumeration.
//! * [`EvalMode::NaturalInterval`] — standard interval arithmetic, one
//!   `iv_*` operation per AST node, each operator exact over its operand
//!   intervals. An enclosure of the true range.
//! * [`EvalMode::RigorousSubdivide`] — splits the box into `2^depth`
//!   sub-boxes, evaluates each with natural interval arithmetic together
//!   with midpoint probes, and hulls the results; converges toward the true
//!   range as depth grows.

use crate::expr::{Expr, GuardOp, UnaryFn};
use crate::fuzzy::{FuzzyNumber, Interval};
use thiserror::Error;

/// Cap on enumerated endpoint indices in PaperVertex mode.
pub const OCCURRENCE_CAP: usize = 20;

/// A divisor interval within this distance of zero counts as containing it.
pub const ZERO_DIV_TOL: f64 = 1e-12;

/// Evaluation semantics selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    PaperVertex,
    NaturalInterval,
    RigorousSubdivide(u32),
}

impl EvalMode {
    pub fn label(&self) -> String {
        match self {
            EvalMode::PaperVertex => "paper".to_string(),
            EvalMode::NaturalInterval => "natural".to_string(),
            EvalMode::RigorousSubdivide(d) => format!("rigorous:{d}"),
        }
    }
}

/// Which end of an interval an enumerated index took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Lo,
    Hi,
}

/// Result of a vertex evaluation. In PaperVertex mode `attained_at` holds
/// one assignment realizing the lower bound and one realizing the upper.
#[derive(Debug, Clone)]
pub struct VertexReport {
    pub result: Interval,
    pub attained_at: Vec<Vec<Endpoint>>,
    pub mode: EvalMode,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by an interval containing zero in {detail}")]
    DivisionByZero { detail: String },
    #[error("domain error: {what}")]
    Domain { what: String },
    #[error("{count} endpoint indices exceed the enumeration cap of {cap}")]
    TooManyOccurrences { count: usize, cap: usize },
    #[error("box {at} straddles a piecewise branch boundary")]
    StraddlesBranch { at: String },
    #[error("result cuts are not nested: level {alpha_high} escapes level {alpha_low} by {gap}")]
    NonNested {
        alpha_low: f64,
        alpha_high: f64,
        gap: f64,
    },
}

/// An [`EvalError`] tagged with the α-level it occurred at.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("at alpha = {alpha}: {source}")]
pub struct FuzzyEvalError {
    pub alpha: f64,
    pub source: EvalError,
}

// ---------------------------------------------------------------------------
// Interval operations
// ---------------------------------------------------------------------------

pub fn iv_add(a: &Interval, b: &Interval) -> Interval {
    Interval {
        lo: a.lo + b.lo,
        hi: a.hi + b.hi,
    }
}

pub fn iv_sub(a: &Interval, b: &Interval) -> Interval {
    Interval {
        lo: a.lo - b.hi,
        hi: a.hi - b.lo,
    }
}

pub fn iv_neg(a: &Interval) -> Interval {
    Interval {
        lo: -a.hi,
        hi: -a.lo,
    }
}

pub fn iv_mul(a: &Interval, b: &Interval) -> Interval {
    let ps = [a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi];
    Interval {
        lo: ps.iter().cloned().fold(f64::INFINITY, f64::min),
        hi: ps.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Whether a divisor interval counts as containing zero (within tolerance).
pub fn divisor_contains_zero(b: &Interval) -> bool {
    b.lo <= ZERO_DIV_TOL && b.hi >= -ZERO_DIV_TOL
}

pub fn iv_div(a: &Interval, b: &Interval) -> Result<Interval, EvalError> {
    if divisor_contains_zero(b) {
        return Err(EvalError::DivisionByZero {
            detail: format!("{a} / {b}"),
        });
    }
    Ok(iv_mul(
        a,
        &Interval {
            lo: 1.0 / b.hi,
            hi: 1.0 / b.lo,
        },
    ))
}

/// Integer power of an interval.
///
/// PaperVertex uses the endpoint-product convention including cross terms
/// (`[-1,2]^2 = [-2,4]`); the other modes return the true range
/// (`[-1,2]^2 = [0,4]`).
pub fn iv_pow_int(a: &Interval, n: u32, mode: EvalMode) -> Interval {
    if n == 0 {
        return Interval::point(1.0);
    }
    match mode {
        EvalMode::PaperVertex => {
            // products of n endpoint choices: lo^j * hi^(n-j)
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for j in 0..=n {
                let p = a.lo.powi(j as i32) * a.hi.powi((n - j) as i32);
                lo = lo.min(p);
                hi = hi.max(p);
            }
            Interval { lo, hi }
        }
        _ => pow_true_range(a, n),
    }
}

fn pow_true_range(a: &Interval, n: u32) -> Interval {
    let (pl, ph) = (a.lo.powi(n as i32), a.hi.powi(n as i32));
    if n % 2 == 1 {
        Interval { lo: pl, hi: ph }
    } else if a.lo >= 0.0 {
        Interval { lo: pl, hi: ph }
    } else if a.hi <= 0.0 {
        Interval { lo: ph, hi: pl }
    } else {
        Interval {
            lo: 0.0,
            hi: pl.max(ph),
        }
    }
}

/// Image of an interval under a monotone unary function tag (exp, sqrt).
pub fn iv_monotone_unary(f: UnaryFn, a: &Interval) -> Result<Interval, EvalError> {
    match f {
        UnaryFn::Exp => Ok(Interval {
            lo: a.lo.exp(),
            hi: a.hi.exp(),
        }),
        UnaryFn::Sqrt => {
            if a.lo < 0.0 {
                Err(EvalError::Domain {
                    what: format!("sqrt over {a} reaches negative values"),
                })
            } else {
                Ok(Interval {
                    lo: a.lo.sqrt(),
                    hi: a.hi.sqrt(),
                })
            }
        }
        other => Err(EvalError::Domain {
            what: format!("{} is not monotone", other.name()),
        }),
    }
}

/// Exact range of any supported unary function over an interval.
pub fn iv_unary(f: UnaryFn, a: &Interval) -> Result<Interval, EvalError> {
    match f {
        UnaryFn::Exp | UnaryFn::Sqrt => iv_monotone_unary(f, a),
        UnaryFn::Abs => Ok(if a.lo >= 0.0 {
            *a
        } else if a.hi <= 0.0 {
            iv_neg(a)
        } else {
            Interval {
                lo: 0.0,
                hi: (-a.lo).max(a.hi),
            }
        }),
        UnaryFn::Sin => Ok(iv_sin(a)),
    }
}

fn iv_sin(a: &Interval) -> Interval {
    use std::f64::consts::{FRAC_PI_2, PI};
    if a.width() >= 2.0 * PI {
        return Interval { lo: -1.0, hi: 1.0 };
    }
    let contains_phase = |phase: f64| {
        // some k with phase + 2kπ in [lo, hi]
        let k = ((a.lo - phase) / (2.0 * PI)).ceil();
        phase + 2.0 * PI * k <= a.hi
    };
    let (sl, sh) = (a.lo.sin(), a.hi.sin());
    Interval {
        lo: if contains_phase(-FRAC_PI_2) { -1.0 } else { sl.min(sh) },
        hi: if contains_phase(FRAC_PI_2) { 1.0 } else { sl.max(sh) },
    }
}

// ---------------------------------------------------------------------------
// Piecewise branch resolution
// ---------------------------------------------------------------------------

/// Replaces every piecewise node by the branch whose guard holds for the
/// whole box at the given α. Guards are strict and componentwise:
/// `x < B` holds when `box.hi < B.cut(α).lo`, `x > B` when
/// `box.lo > B.cut(α).hi`, and `x == B` only for matching degenerate cuts.
fn resolve_branches(e: &Expr, domain: &Interval, alpha: f64) -> Result<Expr, EvalError> {
    Ok(match e {
        Expr::Var | Expr::Const(_) => e.clone(),
        Expr::Neg(a) => Expr::Neg(Box::new(resolve_branches(a, domain, alpha)?)),
        Expr::Add(a, b) => Expr::Add(
            Box::new(resolve_branches(a, domain, alpha)?),
            Box::new(resolve_branches(b, domain, alpha)?),
        ),
        Expr::Sub(a, b) => Expr::Sub(
            Box::new(resolve_branches(a, domain, alpha)?),
            Box::new(resolve_branches(b, domain, alpha)?),
        ),
        Expr::Mul(a, b) => Expr::Mul(
            Box::new(resolve_branches(a, domain, alpha)?),
            Box::new(resolve_branches(b, domain, alpha)?),
        ),
        Expr::Div(a, b) => Expr::Div(
            Box::new(resolve_branches(a, domain, alpha)?),
            Box::new(resolve_branches(b, domain, alpha)?),
        ),
        Expr::PowInt(a, n) => Expr::PowInt(Box::new(resolve_branches(a, domain, alpha)?), *n),
        Expr::Unary(f, a) => Expr::Unary(*f, Box::new(resolve_branches(a, domain, alpha)?)),
        Expr::Piecewise(branches) => {
            for (guard, body) in branches {
                let cut = guard
                    .bound
                    .alpha_cut(alpha)
                    .map_err(|err| EvalError::Domain {
                        what: err.to_string(),
                    })?;
                let holds = match guard.op {
                    GuardOp::Lt => domain.hi < cut.lo,
                    GuardOp::Gt => domain.lo > cut.hi,
                    GuardOp::Eq => {
                        domain.is_degenerate() && cut.is_degenerate() && domain.lo == cut.lo
                    }
                };
                if holds {
                    return resolve_branches(body, domain, alpha);
                }
            }
            return Err(EvalError::StraddlesBranch {
                at: domain.to_string(),
            });
        }
    })
}

// ---------------------------------------------------------------------------
// PaperVertex enumeration
// ---------------------------------------------------------------------------

/// Number of variable copies the paper's convention needs: the largest
/// power the variable is raised to anywhere (1 for a bare occurrence).
fn copy_count(e: &Expr) -> usize {
    match e {
        Expr::Var => 1,
        Expr::Const(_) => 0,
        Expr::Neg(a) | Expr::Unary(_, a) => copy_count(a),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            copy_count(a).max(copy_count(b))
        }
        Expr::PowInt(a, n) => {
            if **a == Expr::Var {
                *n as usize
            } else {
                copy_count(a)
            }
        }
        Expr::Piecewise(branches) => branches.iter().map(|(_, b)| copy_count(b)).fold(0, usize::max),
    }
}

/// Collects the α-cuts of non-degenerate fuzzy constants, in DFS order.
fn const_slots(e: &Expr, alpha: f64, out: &mut Vec<Interval>) -> Result<(), EvalError> {
    match e {
        Expr::Var => Ok(()),
        Expr::Const(c) => {
            let cut = c.alpha_cut(alpha).map_err(|err| EvalError::Domain {
                what: err.to_string(),
            })?;
            if !cut.is_degenerate() {
                out.push(cut);
            }
            Ok(())
        }
        Expr::Neg(a) | Expr::Unary(_, a) | Expr::PowInt(a, _) => const_slots(a, alpha, out),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            const_slots(a, alpha, out)?;
            const_slots(b, alpha, out)
        }
        // resolved away before enumeration; for width estimates take the
        // widest branch
        Expr::Piecewise(branches) => {
            let mut widest = Vec::new();
            for (_, body) in branches {
                let mut branch = Vec::new();
                const_slots(body, alpha, &mut branch)?;
                if branch.len() > widest.len() {
                    widest = branch;
                }
            }
            out.extend(widest);
            Ok(())
        }
    }
}

struct Assignment<'a> {
    copies: &'a [f64],
    consts: &'a [f64],
    cursor: usize,
    alpha: f64,
}

fn eval_assignment(e: &Expr, asg: &mut Assignment) -> Result<f64, EvalError> {
    let v = match e {
        Expr::Var => asg.copies[0],
        Expr::Const(c) => {
            let cut = c.alpha_cut(asg.alpha).map_err(|err| EvalError::Domain {
                what: err.to_string(),
            })?;
            if cut.is_degenerate() {
                cut.lo
            } else {
                let v = asg.consts[asg.cursor];
                asg.cursor += 1;
                v
            }
        }
        Expr::Neg(a) => -eval_assignment(a, asg)?,
        Expr::Add(a, b) => eval_assignment(a, asg)? + eval_assignment(b, asg)?,
        Expr::Sub(a, b) => eval_assignment(a, asg)? - eval_assignment(b, asg)?,
        Expr::Mul(a, b) => eval_assignment(a, asg)? * eval_assignment(b, asg)?,
        Expr::Div(a, b) => {
            let num = eval_assignment(a, asg)?;
            let den = eval_assignment(b, asg)?;
            if den == 0.0 {
                return Err(EvalError::DivisionByZero {
                    detail: e.to_string(),
                });
            }
            num / den
        }
        Expr::PowInt(a, n) => {
            if **a == Expr::Var {
                asg.copies[..*n as usize].iter().product()
            } else {
                eval_assignment(a, asg)?.powi(*n as i32)
            }
        }
        Expr::Unary(f, a) => {
            let v = eval_assignment(a, asg)?;
            f.apply(v).map_err(|err| EvalError::Domain {
                what: err.to_string(),
            })?
        }
        Expr::Piecewise(_) => unreachable!("piecewise resolved before enumeration"),
    };
    if v.is_nan() {
        return Err(EvalError::Domain {
            what: format!("evaluation of {e} produced NaN"),
        });
    }
    Ok(v)
}

fn paper_vertex(e: &Expr, domain: &Interval, alpha: f64) -> Result<VertexReport, EvalError> {
    let n_copies = copy_count(e);
    let mut cuts = Vec::new();
    const_slots(e, alpha, &mut cuts)?;
    let total = n_copies + cuts.len();
    if total > OCCURRENCE_CAP {
        return Err(EvalError::TooManyOccurrences {
            count: total,
            cap: OCCURRENCE_CAP,
        });
    }

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut arg_lo = Vec::new();
    let mut arg_hi = Vec::new();
    let mut copies = vec![0.0; n_copies];
    let mut consts = vec![0.0; cuts.len()];

    for mask in 0u32..(1u32 << total) {
        let mut ends = Vec::with_capacity(total);
        for (i, c) in copies.iter_mut().enumerate() {
            let high = mask >> i & 1 == 1;
            *c = if high { domain.hi } else { domain.lo };
            ends.push(if high { Endpoint::Hi } else { Endpoint::Lo });
        }
        for (i, c) in consts.iter_mut().enumerate() {
            let high = mask >> (n_copies + i) & 1 == 1;
            *c = if high { cuts[i].hi } else { cuts[i].lo };
            ends.push(if high { Endpoint::Hi } else { Endpoint::Lo });
        }
        let mut asg = Assignment {
            copies: &copies,
            consts: &consts,
            cursor: 0,
            alpha,
        };
        let v = eval_assignment(e, &mut asg)?;
        if v < lo {
            lo = v;
            arg_lo = ends.clone();
        }
        if v > hi {
            hi = v;
            arg_hi = ends;
        }
    }

    Ok(VertexReport {
        result: Interval { lo, hi },
        attained_at: vec![arg_lo, arg_hi],
        mode: EvalMode::PaperVertex,
    })
}

// ---------------------------------------------------------------------------
// Natural interval and subdivided evaluation
// ---------------------------------------------------------------------------

fn natural(e: &Expr, domain: &Interval, alpha: f64, mode: EvalMode) -> Result<Interval, EvalError> {
    Ok(match e {
        Expr::Var => *domain,
        Expr::Const(c) => c.alpha_cut(alpha).map_err(|err| EvalError::Domain {
            what: err.to_string(),
        })?,
        Expr::Neg(a) => iv_neg(&natural(a, domain, alpha, mode)?),
        Expr::Add(a, b) => iv_add(
            &natural(a, domain, alpha, mode)?,
            &natural(b, domain, alpha, mode)?,
        ),
        Expr::Sub(a, b) => iv_sub(
            &natural(a, domain, alpha, mode)?,
            &natural(b, domain, alpha, mode)?,
        ),
        Expr::Mul(a, b) => iv_mul(
            &natural(a, domain, alpha, mode)?,
            &natural(b, domain, alpha, mode)?,
        ),
        Expr::Div(a, b) => iv_div(
            &natural(a, domain, alpha, mode)?,
            &natural(b, domain, alpha, mode)?,
        )?,
        Expr::PowInt(a, n) => iv_pow_int(&natural(a, domain, alpha, mode)?, *n, mode),
        Expr::Unary(f, a) => iv_unary(*f, &natural(a, domain, alpha, mode)?)?,
        Expr::Piecewise(_) => unreachable!("piecewise resolved before evaluation"),
    })
}

fn subdivided(e: &Expr, domain: &Interval, alpha: f64, depth: u32) -> Result<Interval, EvalError> {
    let pieces = 1usize << depth.max(1);
    let width = domain.width();
    let mut hull: Option<Interval> = None;
    for i in 0..pieces {
        let lo = domain.lo + width * i as f64 / pieces as f64;
        let hi = if i + 1 == pieces {
            domain.hi
        } else {
            domain.lo + width * (i + 1) as f64 / pieces as f64
        };
        let sub = Interval { lo, hi };
        let mid = Interval::point(sub.midpoint());
        for piece in [sub, mid] {
            let r = natural(e, &piece, alpha, EvalMode::NaturalInterval)?;
            hull = Some(match hull {
                Some(h) => h.hull(&r),
                None => r,
            });
        }
    }
    Ok(hull.unwrap())
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

/// Number of endpoint indices PaperVertex enumeration would use for an
/// expression at a given α (variable copies plus non-degenerate constant
/// slots); compare against [`OCCURRENCE_CAP`].
pub fn enumeration_width(e: &Expr, alpha: f64) -> Result<usize, EvalError> {
    let mut cuts = Vec::new();
    const_slots(e, alpha, &mut cuts)?;
    Ok(copy_count(e) + cuts.len())
}

/// Vertex evaluation with fuzzy constants cut at a given α.
pub fn vertex_eval_at(
    e: &Expr,
    domain: Interval,
    alpha: f64,
    mode: EvalMode,
) -> Result<VertexReport, EvalError> {
    let resolved = resolve_branches(e, &domain, alpha)?;
    match mode {
        EvalMode::PaperVertex => paper_vertex(&resolved, &domain, alpha),
        EvalMode::NaturalInterval => Ok(VertexReport {
            result: natural(&resolved, &domain, alpha, mode)?,
            attained_at: Vec::new(),
            mode,
        }),
        EvalMode::RigorousSubdivide(depth) => Ok(VertexReport {
            result: subdivided(&resolved, &domain, alpha, depth)?,
            attained_at: Vec::new(),
            mode,
        }),
    }
}

/// Vertex evaluation with fuzzy constants collapsed to their core cuts.
pub fn vertex_eval(e: &Expr, domain: Interval, mode: EvalMode) -> Result<VertexReport, EvalError> {
    vertex_eval_at(e, domain, 1.0, mode)
}

/// Policy for α-cut stacks that come out non-nested (possible in
/// PaperVertex mode on non-monotone expressions).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NestPolicy {
    /// Surface a [`EvalError::NonNested`] diagnostic naming the offending
    /// α pair.
    #[default]
    Reject,
    /// Intersect each higher cut into its predecessor.
    HullRepair,
}

/// Applies the resolution principle level-wise: evaluates the expression
/// on every stored α-cut of `x` and reassembles the results.
pub fn eval_fuzzy(e: &Expr, x: &FuzzyNumber, mode: EvalMode) -> Result<FuzzyNumber, FuzzyEvalError> {
    eval_fuzzy_with(e, x, mode, NestPolicy::Reject)
}

pub fn eval_fuzzy_with(
    e: &Expr,
    x: &FuzzyNumber,
    mode: EvalMode,
    policy: NestPolicy,
) -> Result<FuzzyNumber, FuzzyEvalError> {
    let mut levels = Vec::with_capacity(x.decompose().len());
    for &(alpha, cut) in x.decompose() {
        let report = vertex_eval_at(e, cut, alpha, mode)
            .map_err(|source| FuzzyEvalError { alpha, source })?;
        levels.push((alpha, report.result));
    }
    assemble_levels(levels, policy)
}

/// Validates nestedness (repairing under [`NestPolicy::HullRepair`]) and
/// rebuilds a fuzzy number from per-α result cuts.
pub fn assemble_levels(
    mut levels: Vec<(f64, Interval)>,
    policy: NestPolicy,
) -> Result<FuzzyNumber, FuzzyEvalError> {
    for i in 1..levels.len() {
        let (a_prev, prev) = levels[i - 1];
        let (a_cur, cur) = levels[i];
        if prev.contains_interval(&cur) {
            continue;
        }
        let gap = (prev.lo - cur.lo).max(cur.hi - prev.hi).max(0.0);
        match policy {
            NestPolicy::Reject => {
                return Err(FuzzyEvalError {
                    alpha: a_cur,
                    source: EvalError::NonNested {
                        alpha_low: a_prev,
                        alpha_high: a_cur,
                        gap,
                    },
                })
            }
            NestPolicy::HullRepair => {
                let lo = cur.lo.max(prev.lo);
                let hi = cur.hi.min(prev.hi);
                if lo > hi {
                    return Err(FuzzyEvalError {
                        alpha: a_cur,
                        source: EvalError::NonNested {
                            alpha_low: a_prev,
                            alpha_high: a_cur,
                            gap,
                        },
                    });
                }
                levels[i] = (a_cur, Interval { lo, hi });
            }
        }
    }
    FuzzyNumber::reconstruct(levels).map_err(|err| FuzzyEvalError {
        alpha: 1.0,
        source: EvalError::Domain {
            what: err.to_string(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::fuzzy::AlphaGrid;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval { lo, hi }
    }

    #[test]
    fn add_matches_endpoint_enumeration() {
        assert_eq!(iv_add(&iv(1.0, 2.0), &iv(3.0, 4.0)), iv(4.0, 6.0));
        assert_eq!(iv_add(&iv(0.0, 0.0), &iv(-3.0, 7.0)), iv(-3.0, 7.0));
        assert_eq!(iv_add(&iv(-1.0, 1.0), &iv(-1.0, 1.0)), iv(-2.0, 2.0));
    }

    #[test]
    fn mul_matches_endpoint_enumeration() {
        assert_eq!(iv_mul(&iv(1.0, 2.0), &iv(-3.0, 4.0)), iv(-6.0, 8.0));
        assert_eq!(iv_mul(&iv(1.0, 1.0), &iv(-5.0, 9.0)), iv(-5.0, 9.0));
        assert_eq!(iv_mul(&iv(-2.0, -1.0), &iv(-2.0, -1.0)), iv(1.0, 4.0));
    }

    #[test]
    fn div_shows_dependency_effect() {
        let q = iv_div(&iv(1.0, 2.0), &iv(1.0, 2.0)).unwrap();
        assert_eq!(q, iv(0.5, 2.0));
        assert_eq!(iv_div(&iv(4.0, 6.0), &iv(2.0, 2.0)).unwrap(), iv(2.0, 3.0));
        assert!(matches!(
            iv_div(&iv(1.0, 2.0), &iv(-1.0, 1.0)),
            Err(EvalError::DivisionByZero { .. })
        ));
        // near-zero divisors count as zero
        assert!(iv_div(&iv(1.0, 2.0), &iv(1e-13, 1.0)).is_err());
    }

    #[test]
    fn pow_semantics_differ_by_mode() {
        let a = iv(-1.0, 2.0);
        assert_eq!(iv_pow_int(&a, 2, EvalMode::PaperVertex), iv(-2.0, 4.0));
        assert_eq!(iv_pow_int(&a, 2, EvalMode::RigorousSubdivide(1)), iv(0.0, 4.0));
        assert_eq!(iv_pow_int(&iv(2.0, 3.0), 0, EvalMode::PaperVertex), iv(1.0, 1.0));

        // dense-sampling oracle for the true range
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..=10_000 {
            let x = -1.0 + 3.0 * i as f64 / 10_000.0;
            lo = lo.min(x * x);
            hi = hi.max(x * x);
        }
        let r = iv_pow_int(&a, 2, EvalMode::NaturalInterval);
        assert!(r.lo <= lo + 1e-12 && r.hi >= hi - 1e-12);
    }

    #[test]
    fn monotone_unary_images() {
        let e = iv_monotone_unary(UnaryFn::Exp, &iv(0.0, 1.0)).unwrap();
        assert_eq!(e, iv(1.0, std::f64::consts::E));
        let d = iv_monotone_unary(UnaryFn::Exp, &iv(-1.0, -1.0)).unwrap();
        assert_eq!(d.lo, d.hi);
        assert!((d.lo - (-1f64).exp()).abs() < 1e-15);
        assert!(matches!(
            iv_monotone_unary(UnaryFn::Sqrt, &iv(-1.0, 4.0)),
            Err(EvalError::Domain { .. })
        ));
    }

    #[test]
    fn sin_range_handles_extrema() {
        use std::f64::consts::PI;
        let r = iv_sin(&iv(0.0, PI));
        assert_eq!(r.hi, 1.0);
        assert!(r.lo.abs() < 1e-15);
        let r = iv_sin(&iv(0.0, 1.5 * PI));
        assert_eq!(r, iv(-1.0, 1.0));
        let r = iv_sin(&iv(PI / 6.0, PI / 3.0));
        assert!((r.lo - 0.5).abs() < 1e-15);
        assert!((r.hi - (PI / 3.0).sin()).abs() < 1e-15);
    }

    #[test]
    fn paper_vertex_matches_eight_case_enumeration() {
        // independent oracle: (ci*cj*ck - 4)/(ci*cj + 1) over all eight
        // corner assignments of [0, 1]
        let e = parse("(x^3 - 4)/(x^2 + 1)").unwrap();
        let r = vertex_eval(&e, iv(0.0, 1.0), EvalMode::PaperVertex).unwrap();

        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for ci in [0.0, 1.0] {
            for cj in [0.0, 1.0] {
                for ck in [0.0, 1.0] {
                    let v = (ci * cj * ck - 4.0) / (ci * cj + 1.0);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
        }
        assert_eq!(r.result.lo, lo);
        assert_eq!(r.result.hi, hi);
        assert_eq!(r.result, iv(-4.0, -1.5));
    }

    #[test]
    fn paper_vertex_square_keeps_cross_term() {
        let e = parse("x^2").unwrap();
        let r = vertex_eval(&e, iv(-1.0, 2.0), EvalMode::PaperVertex).unwrap();
        assert_eq!(r.result, iv(-2.0, 4.0));
    }

    #[test]
    fn affine_expression_same_in_every_mode() {
        let e = parse("x + 1").unwrap();
        for mode in [
            EvalMode::PaperVertex,
            EvalMode::NaturalInterval,
            EvalMode::RigorousSubdivide(3),
        ] {
            let r = vertex_eval(&e, iv(0.0, 1.0), mode).unwrap();
            assert!((r.result.lo - 1.0).abs() < 1e-12, "{mode:?}");
            assert!((r.result.hi - 2.0).abs() < 1e-12, "{mode:?}");
        }
    }

    #[test]
    fn degenerate_box_evaluates_to_a_point() {
        let e = parse("(x^3 - 4)/(x^2 + 1)").unwrap();
        for mode in [
            EvalMode::PaperVertex,
            EvalMode::NaturalInterval,
            EvalMode::RigorousSubdivide(2),
        ] {
            let r = vertex_eval(&e, iv(0.5, 0.5), mode).unwrap();
            let v = e.eval_scalar(0.5).unwrap();
            assert!((r.result.lo - v).abs() < 1e-12);
            assert!((r.result.hi - v).abs() < 1e-12);
        }
    }

    #[test]
    fn attained_assignments_reproduce_bounds() {
        let e = parse("(x^3 - 4)/(x^2 + 1)").unwrap();
        let domain = iv(0.0, 1.0);
        let r = vertex_eval(&e, domain, EvalMode::PaperVertex).unwrap();
        for (ends, expect) in r.attained_at.iter().zip([r.result.lo, r.result.hi]) {
            let copies: Vec<f64> = ends
                .iter()
                .map(|e| match e {
                    Endpoint::Lo => domain.lo,
                    Endpoint::Hi => domain.hi,
                })
                .collect();
            let mut asg = Assignment {
                copies: &copies,
                consts: &[],
                cursor: 0,
                alpha: 1.0,
            };
            let resolved = resolve_branches(&e, &domain, 1.0).unwrap();
            let v = eval_assignment(&resolved, &mut asg).unwrap();
            assert_eq!(v, expect);
        }
    }

    #[test]
    fn occurrence_cap_enforced() {
        let e = parse("x^21").unwrap();
        assert!(matches!(
            vertex_eval(&e, iv(0.0, 1.0), EvalMode::PaperVertex),
            Err(EvalError::TooManyOccurrences { count: 21, cap: 20 })
        ));
    }

    #[test]
    fn eval_fuzzy_crisp_arithmetic() {
        let grid = AlphaGrid::default();
        let e = parse("x + 2").unwrap();
        let x = FuzzyNumber::singleton(1.0, &grid).unwrap();
        let r = eval_fuzzy(&e, &x, EvalMode::PaperVertex).unwrap();
        let want = FuzzyNumber::singleton(3.0, &grid).unwrap();
        assert!(r.approx_eq(&want, 1e-12));
    }

    #[test]
    fn eval_fuzzy_linear_scaling() {
        // oracle: endpoint arithmetic per α gives tri(0, 1, 2)
        let grid = AlphaGrid::default();
        let e = parse("2*x").unwrap();
        let x = FuzzyNumber::triangular(0.0, 0.5, 1.0, &grid).unwrap();
        let r = eval_fuzzy(&e, &x, EvalMode::PaperVertex).unwrap();
        let want = FuzzyNumber::triangular(0.0, 1.0, 2.0, &grid).unwrap();
        assert!(r.approx_eq(&want, 1e-12));
    }

    #[test]
    fn eval_fuzzy_polynomial_at_crisp_point() {
        let grid = AlphaGrid::default();
        let e = parse("x^2 + x - 3").unwrap();
        let x = FuzzyNumber::singleton(1.0, &grid).unwrap();
        let r = eval_fuzzy(&e, &x, EvalMode::PaperVertex).unwrap();
        let want = FuzzyNumber::singleton(-1.0, &grid).unwrap();
        assert!(r.approx_eq(&want, 1e-12));
    }

    #[test]
    fn eval_fuzzy_reports_failing_alpha_on_error() {
        let grid = AlphaGrid::default();
        let e = parse("1/x").unwrap();
        let x = FuzzyNumber::triangular(-1.0, 0.0, 1.0, &grid).unwrap();
        let err = eval_fuzzy(&e, &x, EvalMode::NaturalInterval).unwrap_err();
        assert!(matches!(err.source, EvalError::DivisionByZero { .. }));
    }

    #[test]
    fn piecewise_straddling_box_is_a_domain_error() {
        let e = parse("{ x^2 if x < 1 ; x if x > 1 }").unwrap();
        assert!(matches!(
            vertex_eval(&e, iv(0.5, 1.5), EvalMode::PaperVertex),
            Err(EvalError::StraddlesBranch { .. })
        ));
        let r = vertex_eval(&e, iv(1.5, 2.0), EvalMode::PaperVertex).unwrap();
        assert_eq!(r.result, iv(1.5, 2.0));
    }

    #[test]
    fn scalar_rule_enumerates_constant_endpoints() {
        // A * x with A = tri(1,2,3): four products of the two endpoint pairs
        let grid = AlphaGrid::default();
        let a = FuzzyNumber::triangular(1.0, 2.0, 3.0, &grid).unwrap();
        let e = Expr::Const(a.clone()).mul(Expr::Var);
        let report = vertex_eval_at(&e, iv(2.0, 5.0), 0.5, EvalMode::PaperVertex).unwrap();
        let cut = a.alpha_cut(0.5).unwrap();
        let want = iv_mul(&cut, &iv(2.0, 5.0));
        assert_eq!(report.result, want);
    }
}
