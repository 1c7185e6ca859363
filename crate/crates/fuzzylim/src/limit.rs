//! Numerical computation and ε-δ certification of fuzzy limits.
//!
//! Per α-level the engine evaluates the expression on a geometrically
//! shrinking schedule of boxes approaching the target cut (from one side,
//! from both sides, or marching to ±∞), declares convergence when the
//! endpointwise residuals stay below tolerance with a nonincreasing trend
//! over three consecutive steps, and classifies divergence when both cut
//! bounds pass the blowup threshold monotonically with matching sign.
//!
//! Two-sided limits at a degenerate target cut are assembled from the two
//! one-sided runs: disagreement beyond tolerance is `NoLimit` with the
//! mismatch reason. At a non-degenerate (genuinely fuzzy) target cut the
//! schedule instead shrinks a symmetric margin around the whole cut, which
//! is the approach geometry the worked α-cut limits use.

use crate::eval::{vertex_eval_at, EvalMode};
use crate::expr::Expr;
use crate::fuzzy::{AlphaGrid, DistancePair, FuzzyNumber, Interval};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Consecutive below-tolerance residuals required to declare convergence.
const CONVERGE_WINDOW: usize = 3;
/// Consecutive monotone beyond-blowup steps required to declare divergence.
const DIVERGE_WINDOW: usize = 5;
/// Log-spaced probe boxes per certification witness.
const CERT_PROBES: usize = 32;

/// Which side a finite target is approached from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Both,
    Left,
    Right,
}

/// Limit target: a fuzzy point or one of the infinities.
#[derive(Debug, Clone)]
pub enum Target {
    FuzzyPoint(FuzzyNumber),
    PlusInfinity,
    MinusInfinity,
}

/// A validated approach description.
#[derive(Debug, Clone)]
pub struct ApproachSpec {
    pub target: Target,
    pub side: Side,
}

impl ApproachSpec {
    pub fn new(target: Target, side: Side) -> Result<Self, LimitError> {
        if !matches!(target, Target::FuzzyPoint(_)) && side != Side::Both {
            return Err(LimitError::Config(
                "one-sided approach is only defined for finite targets".to_string(),
            ));
        }
        Ok(ApproachSpec { target, side })
    }

    pub fn point(p: FuzzyNumber, side: Side) -> Self {
        ApproachSpec {
            target: Target::FuzzyPoint(p),
            side,
        }
    }
}

/// Schedule and tolerance parameters of the limit engine.
#[derive(Debug, Clone)]
pub struct LimitConfig {
    /// Initial box offset.
    pub h0: f64,
    /// Geometric shrink factor per step.
    pub ratio: f64,
    pub max_steps: usize,
    pub tol: f64,
    /// Magnitude threshold for classifying infinite limits.
    pub blowup: f64,
    pub grid: AlphaGrid,
}

impl Default for LimitConfig {
    fn default() -> Self {
        LimitConfig {
            h0: 0.1,
            ratio: 0.5,
            max_steps: 60,
            tol: 1e-6,
            blowup: 1e12,
            grid: AlphaGrid::default(),
        }
    }
}

impl LimitConfig {
    /// Checks parameter ranges; returns advisory warnings (e.g. a schedule
    /// that shrinks past the floating-point resolution at unit scale).
    pub fn validate(&self) -> Result<Vec<String>, LimitError> {
        if !(self.h0 > 0.0 && self.h0.is_finite()) {
            return Err(LimitError::Config(format!("h0 must be positive, got {}", self.h0)));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(LimitError::Config(format!(
                "ratio must lie in (0, 1), got {}",
                self.ratio
            )));
        }
        if self.max_steps == 0 {
            return Err(LimitError::Config("max_steps must be positive".to_string()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(LimitError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        let mut warnings = Vec::new();
        let final_offset = self.h0 * self.ratio.powi(self.max_steps as i32);
        if final_offset <= f64::EPSILON {
            warnings.push(format!(
                "schedule tail offset {final_offset:.3e} is below machine epsilon at unit scale; \
                 late steps will be skipped"
            ));
        }
        Ok(warnings)
    }

    fn offset(&self, k: usize) -> f64 {
        self.h0 * self.ratio.powi(k as i32)
    }

    /// Inner edge of a one-sided probe box as a fraction of its offset.
    /// Strictly above 1/2 so the box is thinner than its distance to the
    /// cut, which keeps one-sided sign configurations (and with them the
    /// infinite-limit classifications) stable.
    fn inner_fraction(&self) -> f64 {
        0.5 * (1.0 + self.ratio)
    }

    /// Width of the one-sided schedule box at step k. The width shrinks a
    /// ratio factor faster than the offset itself, so the box becomes
    /// relatively thinner as it approaches the cut: interval dependency
    /// inside the box (which scales with width over distance) then decays
    /// instead of staying a constant fraction, and limits of expressions
    /// with removable singularities converge to their pointwise values.
    /// A few-ulp floor keeps deep steps representable so blowup detection
    /// can reach the threshold before the schedule dies.
    fn side_width(&self, k: usize, offset: f64, scale: f64) -> f64 {
        let thinning = (1.0 - self.inner_fraction()) * self.ratio.powi(k as i32);
        (thinning * offset).max(4.0 * f64::EPSILON * scale)
    }

    fn infinity_mark(&self, k: usize) -> f64 {
        (1.0 / self.h0) * 2f64.powi(k as i32)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LimitError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("certification requires a converged limit")]
    NotConverged,
}

/// Reason a fuzzy limit fails to exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoLimitReason {
    OneSidedMismatch,
    Oscillation,
    NonNested,
}

/// Classified limit outcome.
#[derive(Debug, Clone)]
pub enum Outcome {
    Converged(FuzzyNumber),
    DivergesPlus,
    DivergesMinus,
    NoLimit(NoLimitReason),
    Undetermined,
}

impl Outcome {
    pub fn converged(&self) -> Option<&FuzzyNumber> {
        match self {
            Outcome::Converged(n) => Some(n),
            _ => None,
        }
    }
}

/// A recorded (ε, witness) pair; the witness is δ for finite targets and
/// K for targets at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessRecord {
    pub eps: f64,
    pub witness: f64,
}

/// Per-α certification record plus the residual trace of the run.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaCertificate {
    pub alpha: f64,
    pub witnesses: Vec<WitnessRecord>,
    /// ε values for which no witness exists within the schedule range.
    pub failed_eps: Vec<f64>,
    pub residual_trace: Vec<f64>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Certificate {
    pub entries: Vec<AlphaCertificate>,
}

impl Certificate {
    pub fn fully_certified(&self) -> bool {
        self.entries.iter().all(|e| e.failed_eps.is_empty())
    }
}

/// Limit outcome with per-α evidence and diagnostics.
#[derive(Debug, Clone)]
pub struct LimitResult {
    pub outcome: Outcome,
    pub certificate: Certificate,
    pub notes: Vec<String>,
}

// ---------------------------------------------------------------------------
// Schedule geometry
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
enum Geometry {
    RightOf(Interval),
    LeftOf(Interval),
    Around(Interval),
    TowardPlusInf,
    TowardMinusInf,
}

impl Geometry {
    /// The box at schedule step k, or None once offsets stop being
    /// representable at the target's scale.
    fn box_at(&self, cfg: &LimitConfig, k: usize) -> Option<Interval> {
        match *self {
            Geometry::RightOf(cut) => {
                let h = cfg.offset(k);
                let scale = cut.hi.abs().max(1.0);
                let w = cfg.side_width(k, h, scale);
                let hi = cut.hi + h;
                let lo = hi - w;
                (cut.hi < lo && lo < hi).then_some(Interval { lo, hi })
            }
            Geometry::LeftOf(cut) => {
                let h = cfg.offset(k);
                let scale = cut.lo.abs().max(1.0);
                let w = cfg.side_width(k, h, scale);
                let lo = cut.lo - h;
                let hi = lo + w;
                (lo < hi && hi < cut.lo).then_some(Interval { lo, hi })
            }
            Geometry::Around(cut) => {
                let h = cfg.offset(k);
                let lo = cut.lo - h;
                let hi = cut.hi + h;
                (lo < cut.lo && cut.hi < hi).then_some(Interval { lo, hi })
            }
            Geometry::TowardPlusInf => {
                let m = cfg.infinity_mark(k);
                (2.0 * m).is_finite().then_some(Interval { lo: m, hi: 2.0 * m })
            }
            Geometry::TowardMinusInf => {
                let m = cfg.infinity_mark(k);
                (2.0 * m).is_finite().then_some(Interval {
                    lo: -2.0 * m,
                    hi: -m,
                })
            }
        }
    }

    /// Extrapolation weight: both the finite schedule (error ∝ offset,
    /// offsets shrink by `ratio`) and the infinity schedule (error ∝ 1/M,
    /// marks double) have geometrically decaying endpoint errors; one
    /// Richardson step with the matching weight removes the leading term.
    fn extrapolation_weight(&self, cfg: &LimitConfig) -> f64 {
        match self {
            Geometry::TowardPlusInf | Geometry::TowardMinusInf => 1.0,
            _ => cfg.ratio / (1.0 - cfg.ratio),
        }
    }
}

// ---------------------------------------------------------------------------
// Per-α schedule runner
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum CutOutcome {
    Converged(Interval),
    DivergesPlus,
    DivergesMinus,
    NoLimit(NoLimitReason),
    Undetermined(Option<String>),
}

struct CutRun {
    outcome: CutOutcome,
    residuals: Vec<f64>,
}

fn run_schedule(
    e: &Expr,
    geom: Geometry,
    alpha: f64,
    mode: EvalMode,
    cfg: &LimitConfig,
) -> CutRun {
    let mut residuals = Vec::new();
    let mut streak: Vec<f64> = Vec::new();
    let mut window: Vec<Interval> = Vec::new();
    let mut last: Option<Interval> = None;
    let mut prev_of_last: Option<Interval> = None;
    let mut first_error: Option<String> = None;
    let mut any_success = false;

    for k in 0..=cfg.max_steps {
        let Some(bx) = geom.box_at(cfg, k) else { break };
        let cur = match vertex_eval_at(e, bx, alpha, mode) {
            Ok(report) => report.result,
            Err(err) => {
                if first_error.is_none() {
                    first_error = Some(err.to_string());
                }
                streak.clear();
                window.clear();
                prev_of_last = None;
                last = None;
                continue;
            }
        };
        if cur.lo.is_nan() || cur.hi.is_nan() {
            if first_error.is_none() {
                first_error = Some("evaluation produced NaN".to_string());
            }
            streak.clear();
            window.clear();
            prev_of_last = None;
            last = None;
            continue;
        }
        any_success = true;

        if let Some(prev) = last {
            let r = DistancePair::endpointwise(&prev, &cur).norm();
            residuals.push(r);
            streak.push(r);
            let n = streak.len();
            if n >= CONVERGE_WINDOW {
                let w = &streak[n - CONVERGE_WINDOW..];
                let below = w.iter().all(|r| *r < cfg.tol);
                let nonincreasing = w.windows(2).all(|p| p[0] >= p[1]);
                if below && nonincreasing {
                    let value = extrapolate(&prev, &cur, geom.extrapolation_weight(cfg));
                    return CutRun {
                        outcome: CutOutcome::Converged(value),
                        residuals,
                    };
                }
            }
        }

        window.push(cur);
        if window.len() > DIVERGE_WINDOW {
            window.remove(0);
        }
        if window.len() == DIVERGE_WINDOW {
            if let Some(out) = classify_blowup(&window, cfg.blowup) {
                return CutRun {
                    outcome: out,
                    residuals,
                };
            }
        }

        prev_of_last = last;
        last = Some(cur);
    }
    let _ = prev_of_last;

    // schedule exhausted without classification
    let outcome = if !any_success {
        CutOutcome::Undetermined(first_error)
    } else if looks_oscillatory(&residuals, cfg.tol) {
        CutOutcome::NoLimit(NoLimitReason::Oscillation)
    } else {
        CutOutcome::Undetermined(first_error)
    };
    CutRun { outcome, residuals }
}

fn extrapolate(prev: &Interval, cur: &Interval, weight: f64) -> Interval {
    let lo = cur.lo + weight * (cur.lo - prev.lo);
    let hi = cur.hi + weight * (cur.hi - prev.hi);
    if !(lo.is_finite() && hi.is_finite()) {
        return *cur;
    }
    // a degenerate limit collapses both endpoints to the same value; their
    // order after extrapolation is floating-point noise
    Interval {
        lo: lo.min(hi),
        hi: lo.max(hi),
    }
}

/// Sign-stable blowup classification over a full window of cuts: both
/// bounds past the threshold, monotone, same sign. Mixed signs report
/// oscillation, never a directed divergence.
fn classify_blowup(window: &[Interval], blowup: f64) -> Option<CutOutcome> {
    let plus = window.iter().all(|c| c.lo > blowup && c.hi > blowup)
        && window.windows(2).all(|p| p[1].lo >= p[0].lo && p[1].hi >= p[0].hi);
    if plus {
        return Some(CutOutcome::DivergesPlus);
    }
    let minus = window.iter().all(|c| c.lo < -blowup && c.hi < -blowup)
        && window.windows(2).all(|p| p[1].lo <= p[0].lo && p[1].hi <= p[0].hi);
    if minus {
        return Some(CutOutcome::DivergesMinus);
    }
    let mixed = window.iter().all(|c| c.lo < -blowup && c.hi > blowup);
    if mixed {
        return Some(CutOutcome::NoLimit(NoLimitReason::Oscillation));
    }
    None
}

/// Heuristic at exhaustion: residuals that repeatedly turn back upward
/// without ever settling read as oscillation.
fn looks_oscillatory(residuals: &[f64], tol: f64) -> bool {
    if residuals.len() < 6 {
        return false;
    }
    let tail = &residuals[residuals.len().saturating_sub(8)..];
    if tail.iter().all(|r| *r < tol) {
        return false;
    }
    let reversals = tail.windows(2).filter(|p| p[1] > p[0] * (1.0 + 1e-9)).count();
    reversals >= 2
}

// ---------------------------------------------------------------------------
// Per-α outcome for a full approach (sides handled)
// ---------------------------------------------------------------------------

fn degenerate_cut(cut: &Interval) -> bool {
    let scale = cut.lo.abs().max(cut.hi.abs()).max(1.0);
    cut.width() <= 1e-12 * scale
}

fn run_alpha(
    e: &Expr,
    approach: &ApproachSpec,
    cut: Option<Interval>,
    alpha: f64,
    mode: EvalMode,
    cfg: &LimitConfig,
) -> CutRun {
    match (&approach.target, approach.side) {
        (Target::PlusInfinity, _) => run_schedule(e, Geometry::TowardPlusInf, alpha, mode, cfg),
        (Target::MinusInfinity, _) => run_schedule(e, Geometry::TowardMinusInf, alpha, mode, cfg),
        (Target::FuzzyPoint(_), side) => {
            let cut = cut.expect("finite target carries a cut");
            match side {
                Side::Right => run_schedule(e, Geometry::RightOf(cut), alpha, mode, cfg),
                Side::Left => run_schedule(e, Geometry::LeftOf(cut), alpha, mode, cfg),
                Side::Both => {
                    if degenerate_cut(&cut) {
                        let right = run_schedule(e, Geometry::RightOf(cut), alpha, mode, cfg);
                        let left = run_schedule(e, Geometry::LeftOf(cut), alpha, mode, cfg);
                        merge_sides(left, right, cfg)
                    } else {
                        run_schedule(e, Geometry::Around(cut), alpha, mode, cfg)
                    }
                }
            }
        }
    }
}

/// Two-sided assembly at a degenerate cut: the limit exists iff both
/// one-sided limits exist and agree.
fn merge_sides(left: CutRun, right: CutRun, cfg: &LimitConfig) -> CutRun {
    let mut residuals = right.residuals;
    residuals.extend(left.residuals);
    let outcome = match (left.outcome, right.outcome) {
        (CutOutcome::Converged(l), CutOutcome::Converged(r)) => {
            let gap = DistancePair::endpointwise(&l, &r);
            if gap.d2 <= cfg.tol {
                CutOutcome::Converged(Interval {
                    lo: 0.5 * (l.lo + r.lo),
                    hi: 0.5 * (l.hi + r.hi),
                })
            } else {
                CutOutcome::NoLimit(NoLimitReason::OneSidedMismatch)
            }
        }
        (CutOutcome::DivergesPlus, CutOutcome::DivergesPlus) => CutOutcome::DivergesPlus,
        (CutOutcome::DivergesMinus, CutOutcome::DivergesMinus) => CutOutcome::DivergesMinus,
        (CutOutcome::NoLimit(r), _) | (_, CutOutcome::NoLimit(r)) => CutOutcome::NoLimit(r),
        (CutOutcome::Undetermined(n), _) | (_, CutOutcome::Undetermined(n)) => {
            CutOutcome::Undetermined(n)
        }
        // converged on one side, diverging on the other (or opposite signs)
        _ => CutOutcome::NoLimit(NoLimitReason::OneSidedMismatch),
    };
    CutRun { outcome, residuals }
}

// ---------------------------------------------------------------------------
// fuzzy_limit
// ---------------------------------------------------------------------------

/// Computes the fuzzy limit of `e` under the given approach.
///
/// Configuration errors are the only hard failures; evaluation problems
/// surface as [`Outcome::Undetermined`] with notes.
pub fn fuzzy_limit(
    e: &Expr,
    approach: &ApproachSpec,
    mode: EvalMode,
    cfg: &LimitConfig,
) -> Result<LimitResult, LimitError> {
    cfg.validate()?;
    if !matches!(approach.target, Target::FuzzyPoint(_)) && approach.side != Side::Both {
        return Err(LimitError::Config(
            "one-sided approach is only defined for finite targets".to_string(),
        ));
    }

    let alphas = cfg.grid.alphas();
    let mut runs: Vec<(f64, CutRun)> = Vec::with_capacity(alphas.len());
    let mut notes = Vec::new();

    for &alpha in &alphas {
        let cut = match &approach.target {
            Target::FuzzyPoint(p) => match p.alpha_cut(alpha) {
                Ok(c) => Some(c),
                Err(err) => {
                    return Err(LimitError::Config(format!(
                        "target cut unavailable at alpha {alpha}: {err}"
                    )))
                }
            },
            _ => None,
        };
        let run = run_alpha(e, approach, cut, alpha, mode, cfg);
        runs.push((alpha, run));
    }

    let outcome = aggregate(&runs, cfg, &mut notes);
    let certificate = Certificate {
        entries: runs
            .iter()
            .map(|(alpha, run)| AlphaCertificate {
                alpha: *alpha,
                witnesses: Vec::new(),
                failed_eps: Vec::new(),
                residual_trace: run.residuals.clone(),
            })
            .collect(),
    };
    Ok(LimitResult {
        outcome,
        certificate,
        notes,
    })
}

fn aggregate(runs: &[(f64, CutRun)], cfg: &LimitConfig, notes: &mut Vec<String>) -> Outcome {
    // a definite per-α refutation dominates
    for (alpha, run) in runs {
        if let CutOutcome::NoLimit(reason) = run.outcome {
            notes.push(format!("no limit at alpha = {alpha}: {reason:?}"));
            return Outcome::NoLimit(reason);
        }
    }
    for (alpha, run) in runs {
        if let CutOutcome::Undetermined(note) = &run.outcome {
            if let Some(n) = note {
                notes.push(format!("undetermined at alpha = {alpha}: {n}"));
            } else {
                notes.push(format!("undetermined at alpha = {alpha}: schedule exhausted"));
            }
            return Outcome::Undetermined;
        }
    }

    let all_plus = runs
        .iter()
        .all(|(_, r)| matches!(r.outcome, CutOutcome::DivergesPlus));
    if all_plus {
        return Outcome::DivergesPlus;
    }
    let all_minus = runs
        .iter()
        .all(|(_, r)| matches!(r.outcome, CutOutcome::DivergesMinus));
    if all_minus {
        return Outcome::DivergesMinus;
    }
    let all_converged = runs
        .iter()
        .all(|(_, r)| matches!(r.outcome, CutOutcome::Converged(_)));
    if !all_converged {
        notes.push("alpha levels disagree on classification".to_string());
        return Outcome::Undetermined;
    }

    // assemble cuts; tolerate nestedness slack up to tol, reject beyond
    let mut levels: Vec<(f64, Interval)> = runs
        .iter()
        .map(|(alpha, run)| match &run.outcome {
            CutOutcome::Converged(c) => (*alpha, *c),
            _ => unreachable!(),
        })
        .collect();
    for i in 1..levels.len() {
        let (alpha_prev, prev) = levels[i - 1];
        let (alpha_cur, cur) = levels[i];
        let gap = (prev.lo - cur.lo).max(cur.hi - prev.hi).max(0.0);
        if gap > cfg.tol {
            notes.push(format!(
                "cut at alpha {alpha_cur} escapes cut at alpha {alpha_prev} by {gap:.3e}"
            ));
            return Outcome::NoLimit(NoLimitReason::NonNested);
        }
        if gap > 0.0 {
            levels[i] = (
                alpha_cur,
                Interval {
                    lo: cur.lo.max(prev.lo),
                    hi: cur.hi.min(prev.hi),
                },
            );
        }
    }
    match FuzzyNumber::reconstruct(levels) {
        Ok(n) => Outcome::Converged(n),
        Err(err) => {
            notes.push(format!("assembled cuts rejected: {err}"));
            Outcome::NoLimit(NoLimitReason::NonNested)
        }
    }
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

/// Default ε grid for certificates.
pub fn default_eps_grid() -> Vec<f64> {
    vec![1e-1, 1e-2, 1e-3, 1e-4]
}

/// Searches the schedule for ε-witnesses (δ at finite targets, K at
/// infinite ones) verifying the converged limit on sampled boxes.
///
/// For each grid α and each ε the recorded witness is the strongest
/// schedule point — the largest δ (smallest K) — such that every one of
/// the ≥ 32 log-spaced probe boxes inside the witness region keeps
/// `pair_norm(distance_pair(f_cut, L_cut))` below ε. Missing witnesses
/// are flagged per (α, ε), not raised as errors.
pub fn certify(
    e: &Expr,
    approach: &ApproachSpec,
    result: &LimitResult,
    eps_grid: &[f64],
    mode: EvalMode,
    cfg: &LimitConfig,
) -> Result<Certificate, LimitError> {
    let limit = match &result.outcome {
        Outcome::Converged(l) => l,
        _ => return Err(LimitError::NotConverged),
    };
    if eps_grid.is_empty()
        || eps_grid.iter().any(|&e| !(e > 0.0))
        || eps_grid.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(LimitError::Config(
            "eps grid must be strictly decreasing positives".to_string(),
        ));
    }

    let mut entries = Vec::new();
    for (idx, &alpha) in cfg.grid.alphas().iter().enumerate() {
        let l_cut = limit
            .alpha_cut(alpha)
            .map_err(|err| LimitError::Config(err.to_string()))?;
        let target_cut = match &approach.target {
            Target::FuzzyPoint(p) => Some(
                p.alpha_cut(alpha)
                    .map_err(|err| LimitError::Config(err.to_string()))?,
            ),
            _ => None,
        };
        let mut witnesses = Vec::new();
        let mut failed = Vec::new();
        for &eps in eps_grid {
            match find_witness(e, approach, target_cut, &l_cut, alpha, eps, mode, cfg) {
                Some(w) => witnesses.push(WitnessRecord { eps, witness: w }),
                None => failed.push(eps),
            }
        }
        let residual_trace = result
            .certificate
            .entries
            .get(idx)
            .map(|e| e.residual_trace.clone())
            .unwrap_or_default();
        entries.push(AlphaCertificate {
            alpha,
            witnesses,
            failed_eps: failed,
            residual_trace,
        });
    }
    Ok(Certificate { entries })
}

#[allow(clippy::too_many_arguments)]
fn find_witness(
    e: &Expr,
    approach: &ApproachSpec,
    target_cut: Option<Interval>,
    l_cut: &Interval,
    alpha: f64,
    eps: f64,
    mode: EvalMode,
    cfg: &LimitConfig,
) -> Option<f64> {
    match &approach.target {
        Target::FuzzyPoint(_) => {
            let cut = target_cut.expect("finite target carries a cut");
            // largest passing offset wins; passing is monotone in δ
            for k in 0..=cfg.max_steps {
                let delta = cfg.offset(k);
                if delta <= 0.0 {
                    break;
                }
                if delta_region_passes(e, &cut, approach.side, l_cut, alpha, delta, eps, mode, cfg)
                {
                    return Some(delta);
                }
            }
            None
        }
        Target::PlusInfinity | Target::MinusInfinity => {
            let negative = matches!(approach.target, Target::MinusInfinity);
            for k in 0..=cfg.max_steps {
                let mark = cfg.infinity_mark(k);
                if !(2.0 * mark).is_finite() {
                    break;
                }
                if k_region_passes(e, negative, l_cut, alpha, mark, eps, mode) {
                    return Some(mark);
                }
            }
            None
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn delta_region_passes(
    e: &Expr,
    cut: &Interval,
    side: Side,
    l_cut: &Interval,
    alpha: f64,
    delta: f64,
    eps: f64,
    mode: EvalMode,
    cfg: &LimitConfig,
) -> bool {
    let f_in = cfg.inner_fraction();
    // log-spaced offsets over two decades below δ
    let offsets =
        (0..CERT_PROBES).map(|j| delta * 10f64.powf(-2.0 * j as f64 / (CERT_PROBES - 1) as f64));
    for u in offsets {
        let mut boxes: Vec<Interval> = Vec::with_capacity(2);
        let right_box = Interval {
            lo: cut.hi + u * f_in,
            hi: cut.hi + u,
        };
        let right_ok = cut.hi < right_box.lo && right_box.lo < right_box.hi;
        let left_box = Interval {
            lo: cut.lo - u,
            hi: cut.lo - u * f_in,
        };
        let left_ok = left_box.lo < left_box.hi && left_box.hi < cut.lo;
        let around_box = Interval {
            lo: cut.lo - u,
            hi: cut.hi + u,
        };
        let around_ok = around_box.lo < cut.lo && cut.hi < around_box.hi;
        // a probe offset the floating-point grid cannot resolve leaves the
        // punctured condition unverifiable at this δ
        match side {
            Side::Right => {
                if !right_ok {
                    return false;
                }
                boxes.push(right_box);
            }
            Side::Left => {
                if !left_ok {
                    return false;
                }
                boxes.push(left_box);
            }
            Side::Both => {
                if degenerate_cut(cut) {
                    if !right_ok || !left_ok {
                        return false;
                    }
                    boxes.push(right_box);
                    boxes.push(left_box);
                } else {
                    if !around_ok {
                        return false;
                    }
                    boxes.push(around_box);
                }
            }
        }
        for bx in boxes {
            match vertex_eval_at(e, bx, alpha, mode) {
                Ok(report) => {
                    if DistancePair::between(&report.result, l_cut).norm() >= eps {
                        return false;
                    }
                }
                Err(_) => return false,
            }
        }
    }
    true
}

fn k_region_passes(
    e: &Expr,
    negative: bool,
    l_cut: &Interval,
    alpha: f64,
    mark: f64,
    eps: f64,
    mode: EvalMode,
) -> bool {
    // probe boxes [M, 2M] with M log-spaced over [K, 64K]
    for j in 0..CERT_PROBES {
        let m = mark * 2f64.powf(6.0 * j as f64 / (CERT_PROBES - 1) as f64);
        if !(2.0 * m).is_finite() {
            break;
        }
        let bx = if negative {
            Interval {
                lo: -2.0 * m,
                hi: -m,
            }
        } else {
            Interval { lo: m, hi: 2.0 * m }
        };
        match vertex_eval_at(e, bx, alpha, mode) {
            Ok(report) => {
                if DistancePair::between(&report.result, l_cut).norm() >= eps {
                    return false;
                }
            }
            Err(_) => return false,
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Sequential criterion
// ---------------------------------------------------------------------------

/// One sequence that failed to converge to the claimed limit.
#[derive(Debug, Clone, Serialize)]
pub struct SequenceViolation {
    pub index: usize,
    pub offset: f64,
    pub gap: f64,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SequentialReport {
    pub sequences: usize,
    pub violations: Vec<SequenceViolation>,
}

impl SequentialReport {
    pub fn all_pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Probes the sequential criterion: seeded random fuzzy sequences
/// approaching the target must evaluate toward the claimed limit.
///
/// Sequence n is the target shifted by `±u · h0 · ratio^n` with u drawn
/// uniformly from [0.5, 1); the check evaluates at the deepest step whose
/// offset is still well above the floating-point resolution (the nominal
/// final offset of the default schedule underflows at unit scale).
pub fn sequential_check(
    e: &Expr,
    p: &FuzzyNumber,
    limit: &FuzzyNumber,
    n_seqs: usize,
    seed: u64,
    mode: EvalMode,
    cfg: &LimitConfig,
) -> SequentialReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = p.support().lo.abs().max(p.support().hi.abs()).max(1.0);
    let floor = (0.01 * cfg.tol).max(1e4 * f64::EPSILON * scale);
    let mut n_eval = 0usize;
    while n_eval < cfg.max_steps && cfg.offset(n_eval + 1) >= floor {
        n_eval += 1;
    }

    let p_resampled = match p.resample(&cfg.grid) {
        Ok(r) => r,
        Err(_) => p.clone(),
    };
    let mut violations = Vec::new();
    for index in 0..n_seqs {
        let direction = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let rate: f64 = rng.gen_range(0.5..1.0);
        let offset = direction * rate * cfg.offset(n_eval);
        let pn = p_resampled.shift(offset);
        match crate::eval::eval_fuzzy(e, &pn, mode) {
            Ok(value) => {
                let gap = value.endpoint_gap(limit);
                if gap > cfg.tol {
                    violations.push(SequenceViolation {
                        index,
                        offset,
                        gap,
                        note: None,
                    });
                }
            }
            Err(err) => violations.push(SequenceViolation {
                index,
                offset,
                gap: f64::INFINITY,
                note: Some(err.to_string()),
            }),
        }
    }
    SequentialReport {
        sequences: n_seqs,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn cfg() -> LimitConfig {
        LimitConfig::default()
    }

    fn sing(v: f64) -> FuzzyNumber {
        FuzzyNumber::singleton(v, &AlphaGrid::default()).unwrap()
    }

    fn limit_of(src: &str, approach: ApproachSpec) -> LimitResult {
        let e = parse(src).unwrap();
        fuzzy_limit(&e, &approach, EvalMode::PaperVertex, &cfg()).unwrap()
    }

    #[test]
    fn polynomial_two_sided_limit() {
        let r = limit_of("x^2 + x - 3", ApproachSpec::point(sing(1.0), Side::Both));
        let l = r.outcome.converged().expect("should converge");
        assert!(l.approx_eq(&sing(-1.0), 1e-6), "limit {l:?}");
    }

    #[test]
    fn piecewise_limit_assembles_across_branches() {
        let r = limit_of(
            "{ 2*x + 1 if x > 1 ; 5 if x == 1 ; 7*x^2 - 4 if x < 1 }",
            ApproachSpec::point(sing(1.0), Side::Both),
        );
        let l = r.outcome.converged().expect("should converge");
        assert!(l.approx_eq(&sing(3.0), 1e-6));
    }

    #[test]
    fn sign_function_has_one_sided_mismatch() {
        let r = limit_of(
            "abs(sin(x))/sin(x)",
            ApproachSpec::point(sing(0.0), Side::Both),
        );
        assert!(matches!(
            r.outcome,
            Outcome::NoLimit(NoLimitReason::OneSidedMismatch)
        ));
        let right = limit_of("abs(sin(x))/sin(x)", ApproachSpec::point(sing(0.0), Side::Right));
        assert!(right.outcome.converged().unwrap().approx_eq(&sing(1.0), 1e-6));
        let left = limit_of("abs(sin(x))/sin(x)", ApproachSpec::point(sing(0.0), Side::Left));
        assert!(left.outcome.converged().unwrap().approx_eq(&sing(-1.0), 1e-6));
    }

    #[test]
    fn exp_reciprocal_splits_by_side() {
        let right = limit_of("exp(1/x)", ApproachSpec::point(sing(0.0), Side::Right));
        assert!(matches!(right.outcome, Outcome::DivergesPlus), "{:?}", right.outcome);
        let left = limit_of("exp(1/x)", ApproachSpec::point(sing(0.0), Side::Left));
        assert!(left.outcome.converged().unwrap().approx_eq(&sing(0.0), 1e-6));
    }

    #[test]
    fn rational_limit_at_plus_infinity() {
        let e = parse("(2*x^2 - 1)/(1 - x^2)").unwrap();
        let approach = ApproachSpec {
            target: Target::PlusInfinity,
            side: Side::Both,
        };
        let r = fuzzy_limit(&e, &approach, EvalMode::PaperVertex, &cfg()).unwrap();
        assert!(r.outcome.converged().unwrap().approx_eq(&sing(-2.0), 1e-4));
    }

    #[test]
    fn reciprocal_limits_at_both_infinities() {
        let e = parse("1/x").unwrap();
        for target in [Target::PlusInfinity, Target::MinusInfinity] {
            let approach = ApproachSpec {
                target,
                side: Side::Both,
            };
            let r = fuzzy_limit(&e, &approach, EvalMode::PaperVertex, &cfg()).unwrap();
            assert!(r.outcome.converged().unwrap().approx_eq(&sing(0.0), 1e-4));
        }
    }

    #[test]
    fn inverse_square_diverges_plus() {
        let r = limit_of("1/x^2", ApproachSpec::point(sing(0.0), Side::Both));
        assert!(matches!(r.outcome, Outcome::DivergesPlus), "{:?}", r.outcome);
    }

    #[test]
    fn rational_pole_diverges_minus_from_left() {
        let r = limit_of(
            "(x + 2)/(2*x^2 - 3*x + 1)",
            ApproachSpec::point(sing(1.0), Side::Left),
        );
        assert!(matches!(r.outcome, Outcome::DivergesMinus), "{:?}", r.outcome);
    }

    #[test]
    fn wide_fuzzy_target_keeps_cut_structure() {
        let grid = AlphaGrid::default();
        let p = FuzzyNumber::triangular(0.0, 0.5, 1.0, &grid).unwrap();
        let r = limit_of("(x^3 - 4)/(x^2 + 1)", ApproachSpec::point(p, Side::Both));
        let l = r.outcome.converged().expect("should converge");
        // core from the scalar value at 0.5
        let core = l.alpha_cut(1.0).unwrap();
        assert!((core.lo - (-3.1)).abs() < 1e-6, "core {core}");
        assert!((core.hi - (-3.1)).abs() < 1e-6);
        // widest cut approaches the paper's eight-case enumeration on [0, 1]
        let low = l.alpha_cut(0.01).unwrap();
        assert!((low.lo - (-4.0)).abs() < 2e-2, "low {low}");
        assert!((low.hi - (-1.5)).abs() < 2e-2);
    }

    #[test]
    fn certify_affine_limit_matches_closed_form() {
        // |f(x) - 3| = |x - 1| for f = x + 2, so δ = ε certifies
        let e = parse("x + 2").unwrap();
        let approach = ApproachSpec::point(sing(1.0), Side::Both);
        let r = fuzzy_limit(&e, &approach, EvalMode::PaperVertex, &cfg()).unwrap();
        let cert = certify(
            &e,
            &approach,
            &r,
            &[0.1],
            EvalMode::PaperVertex,
            &cfg(),
        )
        .unwrap();
        assert!(cert.fully_certified());
        for entry in &cert.entries {
            let w = entry.witnesses[0].witness;
            // hypot(|f1-3|, |f2-3|) < ε needs |x-1| < ε/√2; the strongest
            // schedule offset is within one ratio step of that bound
            assert!(w <= 0.1 / 2f64.sqrt() + 1e-12, "witness {w}");
            assert!(w >= 0.1 / 2f64.sqrt() * cfg().ratio * 0.99, "witness {w}");
        }
    }

    #[test]
    fn certify_flags_unreachable_eps() {
        let e = parse("x + 2").unwrap();
        let approach = ApproachSpec::point(sing(1.0), Side::Both);
        let r = fuzzy_limit(&e, &approach, EvalMode::PaperVertex, &cfg()).unwrap();
        // tighter than the schedule floor h0·ratio^max_steps can support:
        // offsets underflow before |x-1| < ε/√2 is reachable
        let cert = certify(
            &e,
            &approach,
            &r,
            &[1e-30],
            EvalMode::PaperVertex,
            &cfg(),
        )
        .unwrap();
        assert!(!cert.fully_certified());
        assert!(cert.entries.iter().all(|e| e.failed_eps == vec![1e-30]));
    }

    #[test]
    fn certify_requires_convergence() {
        let e = parse("1/x^2").unwrap();
        let approach = ApproachSpec::point(sing(0.0), Side::Both);
        let r = fuzzy_limit(&e, &approach, EvalMode::PaperVertex, &cfg()).unwrap();
        assert!(matches!(
            certify(&e, &approach, &r, &[0.1], EvalMode::PaperVertex, &cfg()),
            Err(LimitError::NotConverged)
        ));
    }

    #[test]
    fn sequential_check_confirms_polynomial_limit() {
        let e = parse("x^2 + x - 3").unwrap();
        let report = sequential_check(
            &e,
            &sing(1.0),
            &sing(-1.0),
            20,
            42,
            EvalMode::PaperVertex,
            &cfg(),
        );
        assert!(report.all_pass(), "{:?}", report.violations);
    }

    #[test]
    fn sequential_check_exposes_wrong_limit() {
        let e = parse("abs(sin(x))/sin(x)").unwrap();
        let report = sequential_check(
            &e,
            &sing(0.0),
            &sing(1.0),
            40,
            7,
            EvalMode::PaperVertex,
            &cfg(),
        );
        assert!(!report.all_pass(), "left-approaching sequences give -1");
    }

    #[test]
    fn sequential_check_constant_expression() {
        let e = parse("5").unwrap();
        let report = sequential_check(
            &e,
            &sing(2.0),
            &sing(5.0),
            10,
            3,
            EvalMode::PaperVertex,
            &cfg(),
        );
        assert!(report.all_pass());
    }

    #[test]
    fn config_validation() {
        let mut c = cfg();
        c.ratio = 1.5;
        assert!(c.validate().is_err());
        c = cfg();
        c.h0 = -1.0;
        assert!(c.validate().is_err());
        c = cfg();
        assert!(!c.validate().unwrap().is_empty(), "default tail underflows at unit scale");
        c.max_steps = 40;
        assert!(c.validate().unwrap().is_empty());
    }

    #[test]
    fn one_sided_at_infinity_rejected() {
        assert!(ApproachSpec::new(Target::PlusInfinity, Side::Left).is_err());
        let e = parse("1/x").unwrap();
        let bad = ApproachSpec {
            target: Target::PlusInfinity,
            side: Side::Right,
        };
        assert!(fuzzy_limit(&e, &bad, EvalMode::PaperVertex, &cfg()).is_err());
    }

    #[test]
    fn schedule_independence_of_converged_value() {
        let e = parse("x^2 + x - 3").unwrap();
        let approach = ApproachSpec::point(sing(1.0), Side::Both);
        let a = fuzzy_limit(&e, &approach, EvalMode::PaperVertex, &cfg()).unwrap();
        let mut alt = cfg();
        alt.h0 = 0.05;
        alt.ratio = 0.7;
        let b = fuzzy_limit(&e, &approach, EvalMode::PaperVertex, &alt).unwrap();
        let (la, lb) = (a.outcome.converged().unwrap(), b.outcome.converged().unwrap());
        assert!(la.endpoint_gap(lb) <= 2.0 * cfg().tol);
    }
}
