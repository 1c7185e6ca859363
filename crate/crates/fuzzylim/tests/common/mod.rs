//! Shared generators and oracles for the integration suites.

use fuzzylim::expr::Expr;
use fuzzylim::fuzzy::{AlphaGrid, FuzzyNumber, Interval};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn interval(rng: &mut ChaCha8Rng, span: f64) -> Interval {
    let a: f64 = rng.gen_range(-span..span);
    let b: f64 = rng.gen_range(-span..span);
    Interval::new(a.min(b), a.max(b)).unwrap()
}

/// A random interval containing `inner`.
pub fn superset_of(rng: &mut ChaCha8Rng, inner: &Interval, pad: f64) -> Interval {
    Interval::new(
        inner.lo - rng.gen_range(0.0..pad),
        inner.hi + rng.gen_range(0.0..pad),
    )
    .unwrap()
}

pub fn triangular(rng: &mut ChaCha8Rng, grid: &AlphaGrid) -> FuzzyNumber {
    let mid: f64 = rng.gen_range(-3.0..3.0);
    let lo = mid - rng.gen_range(0.0..1.5);
    let hi = mid + rng.gen_range(0.0..1.5);
    FuzzyNumber::triangular(lo, mid, hi, grid).unwrap()
}

/// A random valid general α-cut stack built by outward accretion.
pub fn general_stack(rng: &mut ChaCha8Rng, grid: &AlphaGrid) -> FuzzyNumber {
    let core_mid: f64 = rng.gen_range(-3.0..3.0);
    let mut lo = core_mid - rng.gen_range(0.0..0.2);
    let mut hi = core_mid + rng.gen_range(0.0..0.2);
    let mut levels = Vec::new();
    for alpha in grid.alphas().into_iter().rev() {
        levels.push((alpha, Interval::new(lo, hi).unwrap()));
        lo -= rng.gen_range(0.0..0.05);
        hi += rng.gen_range(0.0..0.05);
    }
    levels.reverse();
    FuzzyNumber::reconstruct(levels).unwrap()
}

/// Power-basis polynomial with triangular fuzzy coefficients; every
/// variable power appears as a `PowInt(Var, n)` node.
pub fn power_basis_polynomial(rng: &mut ChaCha8Rng, grid: &AlphaGrid, max_degree: u32) -> Expr {
    let degree = rng.gen_range(1..=max_degree);
    let mut expr: Option<Expr> = None;
    for i in 0..=degree {
        if i != degree && rng.gen_bool(0.4) {
            continue;
        }
        let mid: f64 = rng.gen_range(-2.0..2.0);
        let w: f64 = rng.gen_range(0.0..0.5);
        let coeff = Expr::Const(FuzzyNumber::triangular(mid - w, mid, mid + w, grid).unwrap());
        let term = match i {
            0 => coeff,
            1 => coeff.mul(Expr::Var),
            n => coeff.mul(Expr::Var.pow(n)),
        };
        expr = Some(match expr {
            Some(acc) => acc.add(term),
            None => term,
        });
    }
    expr.unwrap()
}

/// Polynomial with crisp (singleton) coefficients.
pub fn crisp_polynomial(rng: &mut ChaCha8Rng, grid: &AlphaGrid, max_degree: u32) -> Expr {
    let degree = rng.gen_range(1..=max_degree);
    let mut expr: Option<Expr> = None;
    for i in 0..=degree {
        if i != degree && rng.gen_bool(0.4) {
            continue;
        }
        let coeff = Expr::Const(
            FuzzyNumber::singleton(rng.gen_range(-2.0..2.0), grid).unwrap(),
        );
        let term = match i {
            0 => coeff,
            1 => coeff.mul(Expr::Var),
            n => coeff.mul(Expr::Var.pow(n)),
        };
        expr = Some(match expr {
            Some(acc) => acc.add(term),
            None => term,
        });
    }
    expr.unwrap()
}

/// Random expression over the full grammar, bounded depth; used where an
/// enclosure property is being tested (natural and subdivided modes).
pub fn any_expression(rng: &mut ChaCha8Rng, grid: &AlphaGrid, depth: u32) -> Expr {
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => Expr::Var,
            1 => Expr::Const(
                FuzzyNumber::singleton(rng.gen_range(-3.0..3.0), grid).unwrap(),
            ),
            _ => triangular_const(rng, grid),
        };
    }
    match rng.gen_range(0..8) {
        0 => any_expression(rng, grid, depth - 1).add(any_expression(rng, grid, depth - 1)),
        1 => any_expression(rng, grid, depth - 1).sub(any_expression(rng, grid, depth - 1)),
        2 => any_expression(rng, grid, depth - 1).mul(any_expression(rng, grid, depth - 1)),
        3 => Expr::Neg(Box::new(any_expression(rng, grid, depth - 1))),
        4 => Expr::Var.pow(rng.gen_range(0..=4)),
        5 => Expr::Unary(
            fuzzylim::expr::UnaryFn::Sin,
            Box::new(any_expression(rng, grid, depth - 1)),
        ),
        6 => Expr::Unary(
            fuzzylim::expr::UnaryFn::Abs,
            Box::new(any_expression(rng, grid, depth - 1)),
        ),
        _ => any_expression(rng, grid, depth - 1),
    }
}

fn triangular_const(rng: &mut ChaCha8Rng, grid: &AlphaGrid) -> Expr {
    let mid: f64 = rng.gen_range(-3.0..3.0);
    let w: f64 = rng.gen_range(0.0..1.0);
    Expr::Const(FuzzyNumber::triangular(mid - w, mid, mid + w, grid).unwrap())
}

/// Random tree over the full printable grammar, for print/parse round
/// trips. Constants are restricted to parser-reachable shapes and direct
/// negation of a nonnegative singleton is avoided (the parser folds that
/// spelling into a negative constant).
pub fn printable_expression(rng: &mut ChaCha8Rng, grid: &AlphaGrid, depth: u32) -> Expr {
    use fuzzylim::expr::{Guard, GuardOp, UnaryFn};
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => Expr::Var,
            1 => Expr::Const(
                FuzzyNumber::singleton((rng.gen_range(-40..40) as f64) / 8.0, grid).unwrap(),
            ),
            _ => {
                let a: f64 = (rng.gen_range(-24..24) as f64) / 8.0;
                let b = a + (rng.gen_range(0..16) as f64) / 8.0;
                let c = b + (rng.gen_range(0..16) as f64) / 8.0;
                Expr::Const(FuzzyNumber::triangular(a, b, c, grid).unwrap())
            }
        };
    }
    let sub = |rng: &mut ChaCha8Rng| printable_expression(rng, grid, depth - 1);
    match rng.gen_range(0..10) {
        0 => sub(rng).add(sub(rng)),
        1 => sub(rng).sub(sub(rng)),
        2 => sub(rng).mul(sub(rng)),
        3 => sub(rng).div(sub(rng)),
        4 => {
            let child = sub(rng);
            // the parser folds a minus sign on a bare number into the
            // constant itself, so mirror that here
            if let Expr::Const(c) = &child {
                if let fuzzylim::fuzzy::Kind::Singleton(r) = c.kind() {
                    return Expr::Const(FuzzyNumber::singleton(-r, grid).unwrap());
                }
            }
            Expr::Neg(Box::new(child))
        }
        5 => sub(rng).pow(rng.gen_range(0..=5)),
        6 => {
            let f = match rng.gen_range(0..4) {
                0 => UnaryFn::Exp,
                1 => UnaryFn::Sin,
                2 => UnaryFn::Abs,
                _ => UnaryFn::Sqrt,
            };
            Expr::Unary(f, Box::new(sub(rng)))
        }
        7 => {
            let bound = FuzzyNumber::singleton((rng.gen_range(-16..16) as f64) / 4.0, grid).unwrap();
            let bound2 = FuzzyNumber::singleton((rng.gen_range(-16..16) as f64) / 4.0, grid).unwrap();
            Expr::Piecewise(vec![
                (
                    Guard {
                        op: GuardOp::Lt,
                        bound,
                    },
                    sub(rng),
                ),
                (
                    Guard {
                        op: GuardOp::Gt,
                        bound: bound2,
                    },
                    sub(rng),
                ),
            ])
        }
        _ => sub(rng),
    }
}

/// Dense-sample range of the crisp function over a box (the united
/// extension oracle at grid resolution).
pub fn sampled_range(e: &Expr, domain: &Interval, points: usize) -> Option<Interval> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let width = domain.width();
    for i in 0..=points {
        let x = domain.lo + width * i as f64 / points as f64;
        match e.eval_scalar(x) {
            Ok(v) if v.is_finite() => {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            _ => return None,
        }
    }
    Some(Interval::new(lo, hi).unwrap())
}
