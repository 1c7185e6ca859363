//! Executable checks of the limit theorems over expression pairs.
//!
//! Each check computes both sides of an identity with the limit engine and
//! compares them per α-cut. `Inapplicable` is a first-class status: a
//! failed precondition (non-convergent input, zero-straddling denominator,
//! hypothesis violated on a probe box) never masquerades as a theorem
//! violation. The suite tolerance is `2 * cfg.tol` since both sides carry
//! independent truncation error.

use crate::eval::{
    enumeration_width, eval_fuzzy, iv_add, iv_div, iv_mul, EvalError, EvalMode, NestPolicy,
    OCCURRENCE_CAP,
};
use crate::expr::Expr;
use crate::fuzzy::{FuzzyNumber, Interval};
use crate::limit::{
    fuzzy_limit, ApproachSpec, LimitConfig, NoLimitReason, Outcome, Side, Target,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    Uniqueness,
    SumRule,
    ScalarRule,
    ProductRule,
    QuotientRule,
    Composition,
    Agreement,
    Comparison,
    Squeeze,
    OneSidedEquiv,
}

impl Theorem {
    pub fn name(self) -> &'static str {
        match self {
            Theorem::Uniqueness => "Uniqueness",
            Theorem::SumRule => "SumRule",
            Theorem::ScalarRule => "ScalarRule",
            Theorem::ProductRule => "ProductRule",
            Theorem::QuotientRule => "QuotientRule",
            Theorem::Composition => "Composition",
            Theorem::Agreement => "Agreement",
            Theorem::Comparison => "Comparison",
            Theorem::Squeeze => "Squeeze",
            Theorem::OneSidedEquiv => "OneSidedEquiv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Holds,
    Fails,
    Inapplicable,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Holds => "Holds",
            Status::Fails => "Fails",
            Status::Inapplicable => "Inapplicable",
        }
    }
}

/// Outcome of one theorem check.
#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub theorem: Theorem,
    pub status: Status,
    pub lhs: Option<FuzzyNumber>,
    pub rhs: Option<FuzzyNumber>,
    pub max_alpha_gap: f64,
    pub notes: String,
}

impl TheoremReport {
    fn inapplicable(theorem: Theorem, notes: String) -> Self {
        TheoremReport {
            theorem,
            status: Status::Inapplicable,
            lhs: None,
            rhs: None,
            max_alpha_gap: 0.0,
            notes,
        }
    }

    fn compared(theorem: Theorem, lhs: FuzzyNumber, rhs: FuzzyNumber, tol: f64, notes: String) -> Self {
        let gap = lhs.endpoint_gap(&rhs);
        TheoremReport {
            theorem,
            status: if gap <= tol { Status::Holds } else { Status::Fails },
            lhs: Some(lhs),
            rhs: Some(rhs),
            max_alpha_gap: gap,
            notes,
        }
    }

    fn failed(theorem: Theorem, notes: String) -> Self {
        TheoremReport {
            theorem,
            status: Status::Fails,
            lhs: None,
            rhs: None,
            max_alpha_gap: f64::INFINITY,
            notes,
        }
    }
}

// wire format: the four published fields only
impl Serialize for TheoremReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TheoremReport", 4)?;
        st.serialize_field("theorem", self.theorem.name())?;
        st.serialize_field("status", self.status.name())?;
        let gap = if self.max_alpha_gap.is_finite() {
            self.max_alpha_gap
        } else {
            -1.0
        };
        st.serialize_field("max_alpha_gap", &gap)?;
        st.serialize_field("notes", &self.notes)?;
        st.end()
    }
}

fn suite_tol(cfg: &LimitConfig) -> f64 {
    2.0 * cfg.tol
}

fn both(p: &FuzzyNumber) -> ApproachSpec {
    ApproachSpec::point(p.clone(), Side::Both)
}

fn converged(
    e: &Expr,
    approach: &ApproachSpec,
    mode: EvalMode,
    cfg: &LimitConfig,
) -> Result<FuzzyNumber, String> {
    match fuzzy_limit(e, approach, mode, cfg) {
        Ok(r) => match r.outcome {
            Outcome::Converged(n) => Ok(n),
            other => Err(format!("{other:?}")),
        },
        Err(err) => Err(err.to_string()),
    }
}

fn per_alpha_binary(
    a: &FuzzyNumber,
    b: &FuzzyNumber,
    cfg: &LimitConfig,
    op: impl Fn(&Interval, &Interval) -> Result<Interval, EvalError>,
) -> Result<FuzzyNumber, String> {
    let mut levels = Vec::new();
    for alpha in cfg.grid.alphas() {
        let ca = a.alpha_cut(alpha).map_err(|e| e.to_string())?;
        let cb = b.alpha_cut(alpha).map_err(|e| e.to_string())?;
        levels.push((alpha, op(&ca, &cb).map_err(|e| e.to_string())?));
    }
    crate::eval::assemble_levels(levels, NestPolicy::HullRepair).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// Limit algebra (sum, scalar, product, quotient)
// ---------------------------------------------------------------------------

/// Checks the four algebraic limit rules for `f` and `g` at `p`, with `a`
/// as the scalar multiplier of the scalar rule. Both sides of each rule
/// are computed in the same evaluation mode.
pub fn check_limit_algebra(
    f: &Expr,
    g: &Expr,
    a: &FuzzyNumber,
    p: &FuzzyNumber,
    mode: EvalMode,
    cfg: &LimitConfig,
) -> Vec<TheoremReport> {
    let approach = both(p);
    let tol = suite_tol(cfg);
    let theorems = [
        Theorem::SumRule,
        Theorem::ScalarRule,
        Theorem::ProductRule,
        Theorem::QuotientRule,
    ];

    let lim_f = match converged(f, &approach, mode, cfg) {
        Ok(l) => l,
        Err(why) => {
            return theorems
                .iter()
                .map(|&t| TheoremReport::inapplicable(t, format!("lim f did not converge: {why}")))
                .collect()
        }
    };
    let lim_g = match converged(g, &approach, mode, cfg) {
        Ok(l) => l,
        Err(why) => {
            return theorems
                .iter()
                .map(|&t| TheoremReport::inapplicable(t, format!("lim g did not converge: {why}")))
                .collect()
        }
    };

    let mut reports = Vec::with_capacity(4);

    let sum_expr = f.clone().add(g.clone());
    reports.push(rule_report(
        Theorem::SumRule,
        &sum_expr,
        &approach,
        per_alpha_binary(&lim_f, &lim_g, cfg, |x, y| Ok(iv_add(x, y))),
        mode,
        cfg,
        tol,
    ));

    let scaled_expr = Expr::Const(a.clone()).mul(f.clone());
    let a_resampled = a.resample(&cfg.grid).unwrap_or_else(|_| a.clone());
    reports.push(rule_report(
        Theorem::ScalarRule,
        &scaled_expr,
        &approach,
        per_alpha_binary(&a_resampled, &lim_f, cfg, |x, y| Ok(iv_mul(x, y))),
        mode,
        cfg,
        tol,
    ));

    let product_expr = f.clone().mul(g.clone());
    reports.push(rule_report(
        Theorem::ProductRule,
        &product_expr,
        &approach,
        per_alpha_binary(&lim_f, &lim_g, cfg, |x, y| Ok(iv_mul(x, y))),
        mode,
        cfg,
        tol,
    ));

    // quotient rule needs the denominator limit bounded away from zero;
    // near-zero cuts leave the schedule numerically hopeless
    let margin = cfg.tol.max(0.1);
    let g_near_zero = cfg.grid.alphas().iter().any(|&alpha| {
        let cut = lim_g.alpha_cut(alpha).unwrap();
        cut.lo <= margin && cut.hi >= -margin
    });
    if g_near_zero {
        reports.push(TheoremReport::inapplicable(
            Theorem::QuotientRule,
            "denominator limit touches zero within margin".to_string(),
        ));
    } else {
        let quotient_expr = f.clone().div(g.clone());
        reports.push(rule_report(
            Theorem::QuotientRule,
            &quotient_expr,
            &approach,
            per_alpha_binary(&lim_f, &lim_g, cfg, iv_div),
            mode,
            cfg,
            tol,
        ));
    }
    reports
}

#[allow(clippy::too_many_arguments)]
fn rule_report(
    theorem: Theorem,
    lhs_expr: &Expr,
    approach: &ApproachSpec,
    rhs: Result<FuzzyNumber, String>,
    mode: EvalMode,
    cfg: &LimitConfig,
    tol: f64,
) -> TheoremReport {
    let rhs = match rhs {
        Ok(r) => r,
        Err(why) => return TheoremReport::failed(theorem, format!("rhs assembly failed: {why}")),
    };
    match converged(lhs_expr, approach, mode, cfg) {
        Ok(lhs) => TheoremReport::compared(theorem, lhs, rhs, tol, String::new()),
        Err(why) => TheoremReport::failed(theorem, format!("lhs limit did not converge: {why}")),
    }
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

/// Checks `lim f(g(x)) = f(lim g(x))` under the hypothesis that `g`
/// converges at the target and `f` is continuous at that limit.
pub fn check_composition(
    outer: &Expr,
    inner: &Expr,
    approach: &ApproachSpec,
    mode: EvalMode,
    cfg: &LimitConfig,
) -> TheoremReport {
    let tol = suite_tol(cfg);
    let inner_limit = match fuzzy_limit(inner, approach, mode, cfg) {
        Ok(r) => match r.outcome {
            Outcome::Converged(l) => l,
            other => {
                return TheoremReport::inapplicable(
                    Theorem::Composition,
                    format!("inner limit did not converge: {other:?}"),
                )
            }
        },
        Err(err) => return TheoremReport::inapplicable(Theorem::Composition, err.to_string()),
    };

    let f_of_l = match eval_fuzzy(outer, &inner_limit.resample(&cfg.grid).unwrap_or(inner_limit.clone()), mode) {
        Ok(v) => v,
        Err(err) => {
            return TheoremReport::inapplicable(
                Theorem::Composition,
                format!("outer function undefined at the inner limit: {err}"),
            )
        }
    };
    match converged(outer, &both(&inner_limit), mode, cfg) {
        Ok(outer_limit) => {
            if outer_limit.endpoint_gap(&f_of_l) > tol {
                return TheoremReport::inapplicable(
                    Theorem::Composition,
                    "outer function is not continuous at the inner limit".to_string(),
                );
            }
        }
        Err(why) => {
            return TheoremReport::inapplicable(
                Theorem::Composition,
                format!("outer limit at the inner limit did not converge: {why}"),
            )
        }
    }

    let composed = outer.substitute(inner);
    let width = enumeration_width(&composed, cfg.grid.min_alpha()).unwrap_or(usize::MAX);
    if width > OCCURRENCE_CAP {
        return TheoremReport::inapplicable(
            Theorem::Composition,
            format!("substituted expression needs {width} endpoint indices (cap {OCCURRENCE_CAP})"),
        );
    }
    match converged(&composed, approach, mode, cfg) {
        Ok(lhs) => TheoremReport::compared(Theorem::Composition, lhs, f_of_l, tol, String::new()),
        Err(why) => {
            TheoremReport::failed(Theorem::Composition, format!("composed limit: {why}"))
        }
    }
}

// ---------------------------------------------------------------------------
// Agreement off the target point
// ---------------------------------------------------------------------------

/// Checks that functions agreeing pointwise off the target share their
/// fuzzy limit there. Pointwise agreement is probed with crisp samples on
/// the schedule boxes around the target (the target itself excluded).
pub fn check_agreement(
    f: &Expr,
    g: &Expr,
    p: &FuzzyNumber,
    mode: EvalMode,
    cfg: &LimitConfig,
) -> TheoremReport {
    let tol = suite_tol(cfg);
    let fraction = 0.5 * (1.0 + cfg.ratio);
    for cut in [p.core(), p.support()] {
        for k in 0..=cfg.max_steps.min(24) {
            let u = cfg.h0 * cfg.ratio.powi(k as i32);
            let xs = [
                cut.hi + u,
                cut.hi + u * fraction,
                cut.lo - u,
                cut.lo - u * fraction,
            ];
            for x in xs {
                match (f.eval_scalar(x), g.eval_scalar(x)) {
                    (Ok(fv), Ok(gv)) => {
                        let scale = fv.abs().max(gv.abs()).max(1.0);
                        // cancellation near the excluded point inflates the
                        // rounding error of either side by roughly eps / u
                        let threshold = scale * (1e-12 + 64.0 * f64::EPSILON / u);
                        if (fv - gv).abs() > threshold {
                            return TheoremReport::inapplicable(
                                Theorem::Agreement,
                                format!("functions differ at x = {x}: {fv} vs {gv}"),
                            );
                        }
                    }
                    (Err(_), Err(_)) => {}
                    (Err(err), Ok(_)) | (Ok(_), Err(err)) => {
                        return TheoremReport::inapplicable(
                            Theorem::Agreement,
                            format!("only one function is defined at x = {x}: {err}"),
                        )
                    }
                }
            }
        }
    }

    let approach = both(p);
    let lim_f = match converged(f, &approach, mode, cfg) {
        Ok(l) => l,
        Err(why) => {
            return TheoremReport::inapplicable(
                Theorem::Agreement,
                format!("hypothesis limit did not converge: {why}"),
            )
        }
    };
    match converged(g, &approach, mode, cfg) {
        Ok(lim_g) => TheoremReport::compared(Theorem::Agreement, lim_g, lim_f, tol, String::new()),
        Err(why) => TheoremReport::failed(
            Theorem::Agreement,
            format!("g has no limit although f converges: {why}"),
        ),
    }
}

// ---------------------------------------------------------------------------
// Order theorems (comparison, squeeze)
// ---------------------------------------------------------------------------

/// Checks the comparison theorem for `f <= g`, and the squeeze theorem for
/// `f <= h <= g` when `h` is given. Hypotheses are probed on shifted
/// copies of the target along the schedule.
pub fn check_order_theorems(
    f: &Expr,
    g: &Expr,
    h: Option<&Expr>,
    p: &FuzzyNumber,
    mode: EvalMode,
    cfg: &LimitConfig,
) -> Vec<TheoremReport> {
    let tol = suite_tol(cfg);
    let mut reports = Vec::new();

    let p_grid = match p.resample(&cfg.grid) {
        Ok(r) => r,
        Err(err) => {
            reports.push(TheoremReport::inapplicable(Theorem::Comparison, err.to_string()));
            return reports;
        }
    };
    let slack = 1e-9;
    for k in 0..=cfg.max_steps.min(16) {
        let t = cfg.h0 * cfg.ratio.powi(k as i32);
        for probe in [p_grid.shift(t), p_grid.shift(-t)] {
            let fv = eval_fuzzy(f, &probe, mode);
            let gv = eval_fuzzy(g, &probe, mode);
            let (fv, gv) = match (fv, gv) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(err), _) | (_, Err(err)) => {
                    reports.push(TheoremReport::inapplicable(
                        Theorem::Comparison,
                        format!("probe at offset {t} undefined: {err}"),
                    ));
                    if h.is_some() {
                        reports.push(TheoremReport::inapplicable(
                            Theorem::Squeeze,
                            format!("probe at offset {t} undefined"),
                        ));
                    }
                    return reports;
                }
            };
            if !fv.leq_within(&gv, slack) {
                reports.push(TheoremReport::inapplicable(
                    Theorem::Comparison,
                    format!("hypothesis f <= g fails on probe at offset {t}"),
                ));
                if h.is_some() {
                    reports.push(TheoremReport::inapplicable(
                        Theorem::Squeeze,
                        format!("hypothesis fails on probe at offset {t}"),
                    ));
                }
                return reports;
            }
            if let Some(h_expr) = h {
                match eval_fuzzy(h_expr, &probe, mode) {
                    Ok(hv) => {
                        if !(fv.leq_within(&hv, slack) && hv.leq_within(&gv, slack)) {
                            reports.push(comparison_from_limits(f, g, p, mode, cfg, tol));
                            reports.push(TheoremReport::inapplicable(
                                Theorem::Squeeze,
                                format!("hypothesis f <= h <= g fails on probe at offset {t}"),
                            ));
                            return reports;
                        }
                    }
                    Err(err) => {
                        reports.push(comparison_from_limits(f, g, p, mode, cfg, tol));
                        reports.push(TheoremReport::inapplicable(
                            Theorem::Squeeze,
                            format!("h undefined on probe at offset {t}: {err}"),
                        ));
                        return reports;
                    }
                }
            }
        }
    }

    reports.push(comparison_from_limits(f, g, p, mode, cfg, tol));

    if let Some(h_expr) = h {
        let approach = both(p);
        let lim_f = converged(f, &approach, mode, cfg);
        let lim_g = converged(g, &approach, mode, cfg);
        let (lim_f, lim_g) = match (lim_f, lim_g) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(why), _) | (_, Err(why)) => {
                reports.push(TheoremReport::inapplicable(
                    Theorem::Squeeze,
                    format!("bounding limit did not converge: {why}"),
                ));
                return reports;
            }
        };
        let bound_gap = lim_f.endpoint_gap(&lim_g);
        if bound_gap > tol {
            reports.push(TheoremReport::inapplicable(
                Theorem::Squeeze,
                format!("bounding limits differ by {bound_gap:.3e}"),
            ));
            return reports;
        }
        match converged(h_expr, &approach, mode, cfg) {
            Ok(lim_h) => {
                let gap = lim_h.endpoint_gap(&lim_f);
                reports.push(TheoremReport {
                    theorem: Theorem::Squeeze,
                    status: if gap <= tol + bound_gap {
                        Status::Holds
                    } else {
                        Status::Fails
                    },
                    lhs: Some(lim_h),
                    rhs: Some(lim_f),
                    max_alpha_gap: gap,
                    notes: String::new(),
                });
            }
            Err(why) => reports.push(TheoremReport::failed(
                Theorem::Squeeze,
                format!("squeezed limit did not converge: {why}"),
            )),
        }
    }
    reports
}

fn comparison_from_limits(
    f: &Expr,
    g: &Expr,
    p: &FuzzyNumber,
    mode: EvalMode,
    cfg: &LimitConfig,
    tol: f64,
) -> TheoremReport {
    let approach = both(p);
    let lim_f = match converged(f, &approach, mode, cfg) {
        Ok(l) => l,
        Err(why) => {
            return TheoremReport::inapplicable(
                Theorem::Comparison,
                format!("lim f did not converge: {why}"),
            )
        }
    };
    let lim_g = match converged(g, &approach, mode, cfg) {
        Ok(l) => l,
        Err(why) => {
            return TheoremReport::inapplicable(
                Theorem::Comparison,
                format!("lim g did not converge: {why}"),
            )
        }
    };
    // order violation magnitude over the grid
    let mut violation: f64 = 0.0;
    for alpha in cfg.grid.alphas() {
        let a = lim_f.alpha_cut(alpha).unwrap();
        let b = lim_g.alpha_cut(alpha).unwrap();
        violation = violation.max(a.lo - b.lo).max(a.hi - b.hi);
    }
    let violation = violation.max(0.0);
    TheoremReport {
        theorem: Theorem::Comparison,
        status: if violation <= tol { Status::Holds } else { Status::Fails },
        lhs: Some(lim_f),
        rhs: Some(lim_g),
        max_alpha_gap: violation,
        notes: String::new(),
    }
}

// ---------------------------------------------------------------------------
// Uniqueness and one-sided equivalence
// ---------------------------------------------------------------------------

fn outcome_class(o: &Outcome) -> &'static str {
    match o {
        Outcome::Converged(_) => "converged",
        Outcome::DivergesPlus => "diverges_plus",
        Outcome::DivergesMinus => "diverges_minus",
        Outcome::NoLimit(NoLimitReason::OneSidedMismatch) => "no_limit_mismatch",
        Outcome::NoLimit(NoLimitReason::Oscillation) => "no_limit_oscillation",
        Outcome::NoLimit(NoLimitReason::NonNested) => "no_limit_non_nested",
        Outcome::Undetermined => "undetermined",
    }
}

/// Checks schedule-independence of the computed limit (the testable form
/// of uniqueness) and the equivalence of two-sided with one-sided limits.
pub fn check_uniqueness_and_sides(
    e: &Expr,
    approach: &ApproachSpec,
    mode: EvalMode,
    cfg: &LimitConfig,
) -> Vec<TheoremReport> {
    let tol = suite_tol(cfg);
    let mut reports = Vec::new();

    // alternative schedule from the second entry of the schedule pair
    let mut alt = cfg.clone();
    if (alt.h0 - 0.05).abs() < 1e-12 && (alt.ratio - 0.7).abs() < 1e-12 {
        alt.h0 = 0.1;
        alt.ratio = 0.5;
    } else {
        alt.h0 = 0.05;
        alt.ratio = 0.7;
    }

    let run_a = fuzzy_limit(e, approach, mode, cfg);
    let run_b = fuzzy_limit(e, approach, mode, &alt);
    match (run_a, run_b) {
        (Ok(a), Ok(b)) => match (&a.outcome, &b.outcome) {
            (Outcome::Converged(la), Outcome::Converged(lb)) => {
                let gap = la.endpoint_gap(lb);
                reports.push(TheoremReport {
                    theorem: Theorem::Uniqueness,
                    status: if gap <= tol { Status::Holds } else { Status::Fails },
                    lhs: Some(la.clone()),
                    rhs: Some(lb.clone()),
                    max_alpha_gap: gap,
                    notes: "schedule-independence of the converged value".to_string(),
                });
            }
            (oa, ob) => {
                let (ca, cb) = (outcome_class(oa), outcome_class(ob));
                reports.push(TheoremReport {
                    theorem: Theorem::Uniqueness,
                    status: if ca == cb { Status::Holds } else { Status::Fails },
                    lhs: None,
                    rhs: None,
                    max_alpha_gap: 0.0,
                    notes: format!("classification under two schedules: {ca} vs {cb}"),
                });
            }
        },
        (Err(err), _) | (_, Err(err)) => {
            reports.push(TheoremReport::inapplicable(Theorem::Uniqueness, err.to_string()));
        }
    }

    reports.push(one_sided_equiv(e, approach, mode, cfg, tol));
    reports
}

fn one_sided_equiv(
    e: &Expr,
    approach: &ApproachSpec,
    mode: EvalMode,
    cfg: &LimitConfig,
    tol: f64,
) -> TheoremReport {
    let p = match &approach.target {
        Target::FuzzyPoint(p) => p.clone(),
        _ => {
            return TheoremReport::inapplicable(
                Theorem::OneSidedEquiv,
                "no one-sided notion at infinity".to_string(),
            )
        }
    };
    if p.support().width() > 1e-9 {
        return TheoremReport::inapplicable(
            Theorem::OneSidedEquiv,
            "one-sided approach at a wide fuzzy target collapses to its cut endpoints".to_string(),
        );
    }

    let run = |side: Side| fuzzy_limit(e, &ApproachSpec::point(p.clone(), side), mode, cfg);
    let (both_r, left_r, right_r) = match (run(Side::Both), run(Side::Left), run(Side::Right)) {
        (Ok(a), Ok(b), Ok(c)) => (a, b, c),
        _ => {
            return TheoremReport::inapplicable(
                Theorem::OneSidedEquiv,
                "engine configuration rejected".to_string(),
            )
        }
    };

    match &both_r.outcome {
        Outcome::Converged(l) => match (&left_r.outcome, &right_r.outcome) {
            (Outcome::Converged(ll), Outcome::Converged(lr)) => {
                let gap = ll.endpoint_gap(lr).max(ll.endpoint_gap(l)).max(lr.endpoint_gap(l));
                TheoremReport {
                    theorem: Theorem::OneSidedEquiv,
                    status: if gap <= tol { Status::Holds } else { Status::Fails },
                    lhs: Some(ll.clone()),
                    rhs: Some(lr.clone()),
                    max_alpha_gap: gap,
                    notes: "two-sided limit agrees with both one-sided limits".to_string(),
                }
            }
            (lo, ro) => TheoremReport::failed(
                Theorem::OneSidedEquiv,
                format!(
                    "two-sided limit converges but sides classify as {} / {}",
                    outcome_class(lo),
                    outcome_class(ro)
                ),
            ),
        },
        Outcome::NoLimit(NoLimitReason::OneSidedMismatch) => {
            let consistent = match (&left_r.outcome, &right_r.outcome) {
                (Outcome::Converged(ll), Outcome::Converged(lr)) => ll.endpoint_gap(lr) > cfg.tol,
                (lo, ro) => outcome_class(lo) != outcome_class(ro),
            };
            if consistent {
                TheoremReport {
                    theorem: Theorem::OneSidedEquiv,
                    status: Status::Holds,
                    lhs: left_r.outcome.converged().cloned(),
                    rhs: right_r.outcome.converged().cloned(),
                    max_alpha_gap: 0.0,
                    notes: "mismatch branch: one-sided limits disagree as required".to_string(),
                }
            } else {
                TheoremReport::failed(
                    Theorem::OneSidedEquiv,
                    "two-sided mismatch reported but one-sided limits agree".to_string(),
                )
            }
        }
        Outcome::DivergesPlus | Outcome::DivergesMinus => {
            let want = outcome_class(&both_r.outcome);
            let ok = outcome_class(&left_r.outcome) == want
                && outcome_class(&right_r.outcome) == want;
            if ok {
                TheoremReport {
                    theorem: Theorem::OneSidedEquiv,
                    status: Status::Holds,
                    lhs: None,
                    rhs: None,
                    max_alpha_gap: 0.0,
                    notes: format!("both sides classify as {want}"),
                }
            } else {
                TheoremReport::failed(
                    Theorem::OneSidedEquiv,
                    format!(
                        "two-sided {want} but sides classify as {} / {}",
                        outcome_class(&left_r.outcome),
                        outcome_class(&right_r.outcome)
                    ),
                )
            }
        }
        other => TheoremReport::inapplicable(
            Theorem::OneSidedEquiv,
            format!("two-sided outcome {} not covered", outcome_class(other)),
        ),
    }
}

// ---------------------------------------------------------------------------
// Fixture suite and randomized campaign
// ---------------------------------------------------------------------------

/// Which part of the built-in suite to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteSelection {
    All,
    Algebra,
    Order,
    Composition,
    Uniqueness,
}

impl std::str::FromStr for SuiteSelection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(SuiteSelection::All),
            "algebra" => Ok(SuiteSelection::Algebra),
            "order" => Ok(SuiteSelection::Order),
            "composition" => Ok(SuiteSelection::Composition),
            "uniqueness" => Ok(SuiteSelection::Uniqueness),
            other => Err(format!("unknown suite '{other}'")),
        }
    }
}

/// Demotes paper-vertex product/quotient failures to diagnostics: the
/// correlated-endpoint convention is known to break the product algebra
/// through the dependency effect, which is a property of the mode, not a
/// counterexample to the theorem.
fn demote_known_dependency(mut report: TheoremReport, mode: EvalMode) -> TheoremReport {
    if mode == EvalMode::PaperVertex
        && report.status == Status::Fails
        && matches!(report.theorem, Theorem::ProductRule | Theorem::QuotientRule)
    {
        report.status = Status::Inapplicable;
        report.notes = format!(
            "known dependency-effect case under paper vertex mode; {}",
            report.notes
        );
    }
    report
}

fn tag(mut report: TheoremReport, fixture: &str, mode: EvalMode) -> TheoremReport {
    let prefix = format!("[{fixture}, {} mode]", mode.label());
    report.notes = if report.notes.is_empty() {
        prefix
    } else {
        format!("{prefix} {}", report.notes)
    };
    report
}

/// Runs the built-in fixture set (the worked examples wired to each
/// theorem) for the selected suites.
pub fn run_fixture_suite(selection: SuiteSelection, cfg: &LimitConfig) -> Vec<TheoremReport> {
    use crate::expr::parse;
    let grid = &cfg.grid;
    let sing = |v: f64| FuzzyNumber::singleton(v, grid).unwrap();
    let tri = |a: f64, b: f64, c: f64| FuzzyNumber::triangular(a, b, c, grid).unwrap();
    let p = |src: &str| parse(src).unwrap();
    let mut out = Vec::new();
    let paper = EvalMode::PaperVertex;
    let rigorous = EvalMode::RigorousSubdivide(2);

    if matches!(selection, SuiteSelection::All | SuiteSelection::Uniqueness) {
        let cases = [
            ("x^2 + x - 3 at 1", "x^2 + x - 3", 1.0),
            ("abs(sin(x))/sin(x) at 0", "abs(sin(x))/sin(x)", 0.0),
            ("constant 5 at 2", "5", 2.0),
            ("exp(1/x) at 0", "exp(1/x)", 0.0),
        ];
        for (name, src, at) in cases {
            let approach = ApproachSpec::point(sing(at), Side::Both);
            for r in check_uniqueness_and_sides(&p(src), &approach, paper, cfg) {
                out.push(tag(r, name, paper));
            }
        }
    }

    if matches!(selection, SuiteSelection::All | SuiteSelection::Algebra) {
        for mode in [paper, rigorous] {
            for r in check_limit_algebra(&p("x^2"), &p("x"), &tri(1.0, 2.0, 3.0), &sing(1.0), mode, cfg)
            {
                out.push(tag(demote_known_dependency(r, mode), "f = x^2, g = x at 1", mode));
            }
        }
        for r in check_limit_algebra(
            &p("x^2"),
            &p("x - 1"),
            &tri(1.0, 2.0, 3.0),
            &sing(1.0),
            rigorous,
            cfg,
        ) {
            if r.theorem == Theorem::QuotientRule {
                out.push(tag(r, "zero denominator limit fixture", rigorous));
            }
        }
    }

    if matches!(selection, SuiteSelection::All | SuiteSelection::Composition) {
        let fixtures: [(&str, &str, &str, f64, Side); 3] = [
            ("square of x + 1 at 1", "x^2", "x + 1", 1.0, Side::Both),
            ("identity outer at 1", "x", "x^2 + x - 3", 1.0, Side::Both),
            ("exp of 1/x at 0 from the left", "exp(x)", "1/x", 0.0, Side::Left),
        ];
        for (name, outer, inner, at, side) in fixtures {
            let approach = ApproachSpec::point(sing(at), side);
            out.push(tag(
                check_composition(&p(outer), &p(inner), &approach, paper, cfg),
                name,
                paper,
            ));
        }
    }

    if matches!(selection, SuiteSelection::All | SuiteSelection::Order) {
        for r in check_order_theorems(&p("x"), &p("x + 1"), None, &sing(0.0), paper, cfg) {
            out.push(tag(r, "f = x, g = x + 1 at 0", paper));
        }
        for r in check_order_theorems(
            &p("-x^2"),
            &p("x^2"),
            Some(&p("1/2*x^2*sin(1/x)")),
            &sing(0.0),
            rigorous,
            cfg,
        ) {
            out.push(tag(r, "squeeze of scaled x^2 sin(1/x) at 0", rigorous));
        }
        for r in check_order_theorems(&p("x + 1"), &p("x + 1"), Some(&p("x + 1")), &sing(0.0), paper, cfg)
        {
            out.push(tag(r, "identical bounds fixture", paper));
        }
    }

    if matches!(selection, SuiteSelection::All) {
        out.push(tag(
            check_agreement(&p("(x^2 - 1)/(x - 1)"), &p("x + 1"), &sing(1.0), rigorous, cfg),
            "removable singularity at 1",
            rigorous,
        ));
        out.push(tag(
            check_agreement(&p("x^2 + 1"), &p("x^2 + 1"), &sing(0.0), paper, cfg),
            "syntactically identical pair",
            paper,
        ));
        out.push(tag(
            check_agreement(&p("x"), &p("x + 0.001"), &sing(0.0), paper, cfg),
            "functions differing off the target",
            paper,
        ));
    }

    out
}

/// Summary of the randomized polynomial campaign.
#[derive(Debug, Clone)]
pub struct CampaignSummary {
    pub cases: usize,
    pub reports: Vec<TheoremReport>,
    /// Paper-vertex product/quotient failures demoted to diagnostics.
    pub known_dependency_cases: usize,
}

impl CampaignSummary {
    pub fn failures(&self) -> impl Iterator<Item = &TheoremReport> {
        self.reports.iter().filter(|r| r.status == Status::Fails)
    }
}

fn random_triangular(rng: &mut ChaCha8Rng, grid: &crate::fuzzy::AlphaGrid) -> FuzzyNumber {
    let mid: f64 = rng.gen_range(-2.0..2.0);
    let spread_lo: f64 = rng.gen_range(0.0..0.5);
    let spread_hi: f64 = rng.gen_range(0.0..0.5);
    FuzzyNumber::triangular(mid - spread_lo, mid, mid + spread_hi, grid).unwrap()
}

fn random_polynomial(rng: &mut ChaCha8Rng, grid: &crate::fuzzy::AlphaGrid) -> Expr {
    let degree = rng.gen_range(1..=4u32);
    let mut expr: Option<Expr> = None;
    for i in 0..=degree {
        let include = i == degree || i == 0 || rng.gen_bool(0.5);
        if !include {
            continue;
        }
        let coeff = Expr::Const(random_triangular(rng, grid));
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

/// Runs seeded random polynomial pairs through the limit algebra in both
/// paper-vertex and subdivided modes. Sum and scalar rules must hold in
/// both; product and quotient rules must hold in the subdivided mode,
/// while their paper-mode failures are collected as dependency-effect
/// diagnostics.
pub fn run_random_campaign(seed: u64, cases: usize, cfg: &LimitConfig) -> CampaignSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();
    let mut known = 0usize;
    for case in 0..cases {
        let f = random_polynomial(&mut rng, &cfg.grid);
        let g = random_polynomial(&mut rng, &cfg.grid);
        let a = random_triangular(&mut rng, &cfg.grid);
        let p = FuzzyNumber::singleton(rng.gen_range(-1.5..1.5), &cfg.grid).unwrap();
        for mode in [EvalMode::PaperVertex, EvalMode::RigorousSubdivide(2)] {
            for report in check_limit_algebra(&f, &g, &a, &p, mode, cfg) {
                let demoted = demote_known_dependency(report, mode);
                if demoted.notes.starts_with("known dependency-effect") {
                    known += 1;
                }
                reports.push(tag(demoted, &format!("campaign case {case}"), mode));
            }
        }
    }
    CampaignSummary {
        cases,
        reports,
        known_dependency_cases: known,
    }
}
