//! Fuzzy numbers represented as stacks of nested α-cut intervals.
//!
//! A fuzzy number is stored as an ordered sequence of (α, interval) pairs
//! with α strictly increasing up to 1.0 (the core). Cuts at non-stored α
//! are linearly interpolated; for singleton and triangular shapes the
//! closed form is used, which the interpolation reproduces exactly.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Errors from constructing or querying fuzzy numbers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzyError {
    #[error("invalid triangular shape: need a <= b <= c, got ({a}, {b}, {c})")]
    InvalidShape { a: f64, b: f64, c: f64 },
    #[error("non-finite value {value}")]
    NonFinite { value: f64 },
    #[error("alpha level {alpha} outside (0, 1]")]
    InvalidAlpha { alpha: f64 },
    #[error("inconsistent cuts: level {alpha_high} is not contained in level {alpha_low}")]
    InconsistentCuts { alpha_low: f64, alpha_high: f64 },
    #[error("level stack is missing the core (alpha = 1)")]
    MissingCore,
    #[error("level stack is empty")]
    EmptyLevels,
    #[error("alpha grid needs at least 3 points (got {levels})")]
    GridTooSmall { levels: usize },
    #[error("interval bounds out of order: [{lo}, {hi}]")]
    BadInterval { lo: f64, hi: f64 },
}

/// A membership grade α in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AlphaLevel(f64);

impl AlphaLevel {
    pub fn new(alpha: f64) -> Result<Self, FuzzyError> {
        if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
            Ok(AlphaLevel(alpha))
        } else {
            Err(FuzzyError::InvalidAlpha { alpha })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Uniform α-grid configuration.
///
/// `levels` counts the points of the closed uniform partition of [0, 1];
/// the stored cuts are those points with α = 0 dropped. The default of 101
/// stores {0.01, 0.02, ..., 1.0}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaGrid {
    pub levels: usize,
}

impl Default for AlphaGrid {
    fn default() -> Self {
        AlphaGrid { levels: 101 }
    }
}

impl AlphaGrid {
    pub fn new(levels: usize) -> Result<Self, FuzzyError> {
        if levels < 3 {
            return Err(FuzzyError::GridTooSmall { levels });
        }
        Ok(AlphaGrid { levels })
    }

    /// Stored α values, ascending, ending at exactly 1.0.
    pub fn alphas(&self) -> Vec<f64> {
        let n = self.levels - 1;
        (1..=n).map(|i| i as f64 / n as f64).collect()
    }

    /// The smallest stored α; support bounds are reported at this level.
    pub fn min_alpha(&self) -> f64 {
        1.0 / (self.levels - 1) as f64
    }
}

/// A closed real interval [lo, hi]; degenerate lo == hi is permitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, FuzzyError> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(FuzzyError::NonFinite {
                value: if lo.is_finite() { hi } else { lo },
            });
        }
        if lo > hi {
            return Err(FuzzyError::BadInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// The min/max pair of endpoint distances between two intervals, together
/// with its Euclidean norm the convergence gauge of the limit engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistancePair {
    pub d1: f64,
    pub d2: f64,
}

impl DistancePair {
    /// Orders two nonnegative distances into a valid pair.
    pub fn ordered(a: f64, b: f64) -> Self {
        DistancePair {
            d1: a.min(b),
            d2: a.max(b),
        }
    }

    /// min/max over the four endpoint distances |a_i - b_j|.
    pub fn between(a: &Interval, b: &Interval) -> Self {
        let ds = [
            (a.lo - b.lo).abs(),
            (a.lo - b.hi).abs(),
            (a.hi - b.lo).abs(),
            (a.hi - b.hi).abs(),
        ];
        let d1 = ds.iter().cloned().fold(f64::INFINITY, f64::min);
        let d2 = ds.iter().cloned().fold(0.0, f64::max);
        DistancePair { d1, d2 }
    }

    /// Pair of the two like-endpoint distances (lo vs lo, hi vs hi).
    pub fn endpointwise(a: &Interval, b: &Interval) -> Self {
        DistancePair::ordered((a.lo - b.lo).abs(), (a.hi - b.hi).abs())
    }

    /// Euclidean norm sqrt(d1^2 + d2^2).
    pub fn norm(&self) -> f64 {
        self.d1.hypot(self.d2)
    }
}

/// min/max over the four endpoint distances between two intervals.
pub fn distance_pair(a: &Interval, b: &Interval) -> DistancePair {
    DistancePair::between(a, b)
}

/// Euclidean norm of a distance pair.
pub fn pair_norm(p: &DistancePair) -> f64 {
    p.norm()
}

/// A sampled membership grade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MembershipSample {
    pub x: f64,
    pub grade: f64,
}

/// Shape tag of a fuzzy number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Singleton(f64),
    Triangular(f64, f64, f64),
    General,
}

/// A fuzzy number as a nested stack of α-cuts.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyNumber {
    levels: Vec<(f64, Interval)>,
    kind: Kind,
}

impl FuzzyNumber {
    /// Builds a fuzzy number from raw levels, validating ordering,
    /// nestedness, and the presence of the core.
    pub fn from_levels(mut levels: Vec<(f64, Interval)>, kind: Kind) -> Result<Self, FuzzyError> {
        if levels.is_empty() {
            return Err(FuzzyError::EmptyLevels);
        }
        levels.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for &(alpha, iv) in &levels {
            if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
                return Err(FuzzyError::InvalidAlpha { alpha });
            }
            if iv.lo > iv.hi {
                return Err(FuzzyError::BadInterval {
                    lo: iv.lo,
                    hi: iv.hi,
                });
            }
        }
        if levels.last().unwrap().0 != 1.0 {
            return Err(FuzzyError::MissingCore);
        }
        for w in levels.windows(2) {
            let (a0, i0) = w[0];
            let (a1, i1) = w[1];
            if a0 == a1 || !i0.contains_interval(&i1) {
                return Err(FuzzyError::InconsistentCuts {
                    alpha_low: a0,
                    alpha_high: a1,
                });
            }
        }
        Ok(FuzzyNumber { levels, kind })
    }

    /// Triangular fuzzy number (a, b, c): cut(α) = [a + α(b−a), c − α(c−b)].
    pub fn triangular(a: f64, b: f64, c: f64, grid: &AlphaGrid) -> Result<Self, FuzzyError> {
        for v in [a, b, c] {
            if !v.is_finite() {
                return Err(FuzzyError::NonFinite { value: v });
            }
        }
        if a > b || b > c {
            return Err(FuzzyError::InvalidShape { a, b, c });
        }
        let levels = grid
            .alphas()
            .into_iter()
            .map(|alpha| (alpha, triangular_cut(a, b, c, alpha)))
            .collect();
        FuzzyNumber::from_levels(levels, Kind::Triangular(a, b, c))
    }

    /// Singleton (crisp) fuzzy number: every cut is [r, r].
    pub fn singleton(r: f64, grid: &AlphaGrid) -> Result<Self, FuzzyError> {
        if !r.is_finite() {
            return Err(FuzzyError::NonFinite { value: r });
        }
        let levels = grid
            .alphas()
            .into_iter()
            .map(|alpha| (alpha, Interval::point(r)))
            .collect();
        FuzzyNumber::from_levels(levels, Kind::Singleton(r))
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// The stored (α, cut) stack, ascending in α.
    pub fn decompose(&self) -> &[(f64, Interval)] {
        &self.levels
    }

    /// Stored α values.
    pub fn alphas(&self) -> impl Iterator<Item = f64> + '_ {
        self.levels.iter().map(|&(a, _)| a)
    }

    /// The core cut (α = 1).
    pub fn core(&self) -> Interval {
        self.levels.last().unwrap().1
    }

    /// The widest stored cut (lowest stored α), standing in for the support.
    pub fn support(&self) -> Interval {
        self.levels.first().unwrap().1
    }

    /// The α-cut at any α in (0, 1]. Singleton and triangular shapes use
    /// the closed form; general stacks interpolate endpoints linearly
    /// between bracketing stored levels (clamping below the lowest level).
    pub fn alpha_cut(&self, alpha: f64) -> Result<Interval, FuzzyError> {
        if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
            return Err(FuzzyError::InvalidAlpha { alpha });
        }
        match self.kind {
            Kind::Singleton(r) => Ok(Interval::point(r)),
            Kind::Triangular(a, b, c) => Ok(triangular_cut(a, b, c, alpha)),
            Kind::General => Ok(self.interpolated_cut(alpha)),
        }
    }

    fn interpolated_cut(&self, alpha: f64) -> Interval {
        let first = self.levels[0];
        if alpha <= first.0 {
            return first.1;
        }
        // index of the first stored level with alpha >= requested
        let idx = self.levels.partition_point(|&(a, _)| a < alpha);
        let (a1, i1) = self.levels[idx];
        if a1 == alpha {
            return i1;
        }
        let (a0, i0) = self.levels[idx - 1];
        let t = (alpha - a0) / (a1 - a0);
        Interval {
            lo: i0.lo + t * (i1.lo - i0.lo),
            hi: i0.hi + t * (i1.hi - i0.hi),
        }
    }

    /// Membership grade sup over the stored grid of α ∧ χ_cut(α)(x);
    /// 1 iff x lies in the core, 0 iff x lies outside every stored cut.
    pub fn membership(&self, x: f64) -> f64 {
        // containment is monotone in α by nestedness
        let idx = self.levels.partition_point(|&(_, iv)| iv.contains(x));
        if idx == 0 {
            0.0
        } else {
            self.levels[idx - 1].0
        }
    }

    /// Equally spaced membership samples over [from, to].
    pub fn sample_membership(&self, from: f64, to: f64, points: usize) -> Vec<MembershipSample> {
        let step = (to - from) / points as f64;
        (0..=points)
            .map(|i| {
                let x = from + step * i as f64;
                MembershipSample {
                    x,
                    grade: self.membership(x),
                }
            })
            .collect()
    }

    /// Rebuilds a fuzzy number from (α, cut) samples; the inverse of
    /// [`FuzzyNumber::decompose`]. Detects a singleton stack.
    pub fn reconstruct(samples: Vec<(f64, Interval)>) -> Result<Self, FuzzyError> {
        let n = FuzzyNumber::from_levels(samples, Kind::General)?;
        let first = n.levels[0].1;
        let all_same_point = first.is_degenerate()
            && n.levels.iter().all(|&(_, iv)| iv == first);
        if all_same_point {
            Ok(FuzzyNumber {
                kind: Kind::Singleton(first.lo),
                ..n
            })
        } else {
            Ok(n)
        }
    }

    /// Resamples onto a grid; exact for singleton/triangular shapes.
    pub fn resample(&self, grid: &AlphaGrid) -> Result<Self, FuzzyError> {
        let levels = grid
            .alphas()
            .into_iter()
            .map(|alpha| Ok((alpha, self.alpha_cut(alpha)?)))
            .collect::<Result<Vec<_>, FuzzyError>>()?;
        FuzzyNumber::from_levels(levels, self.kind)
    }

    /// Translates every cut by t.
    pub fn shift(&self, t: f64) -> Self {
        let kind = match self.kind {
            Kind::Singleton(r) => Kind::Singleton(r + t),
            Kind::Triangular(a, b, c) => Kind::Triangular(a + t, b + t, c + t),
            Kind::General => Kind::General,
        };
        FuzzyNumber {
            levels: self
                .levels
                .iter()
                .map(|&(a, iv)| (a, Interval { lo: iv.lo + t, hi: iv.hi + t }))
                .collect(),
            kind,
        }
    }

    /// Componentwise α-cut order: self ≤ other iff at every α both the
    /// lower and upper cut bounds are ≤ the other's. Numbers on different
    /// grids are compared over the union of their stored levels.
    pub fn fuzzy_leq(&self, other: &FuzzyNumber) -> bool {
        self.leq_within(other, 0.0)
    }

    /// Like [`FuzzyNumber::fuzzy_leq`] with slack for numerical noise.
    pub fn leq_within(&self, other: &FuzzyNumber, slack: f64) -> bool {
        for alpha in union_alphas(self, other) {
            let a = self.alpha_cut(alpha).unwrap();
            let b = other.alpha_cut(alpha).unwrap();
            if a.lo > b.lo + slack || a.hi > b.hi + slack {
                return false;
            }
        }
        true
    }

    /// Largest endpointwise cut distance over the union of stored levels.
    pub fn endpoint_gap(&self, other: &FuzzyNumber) -> f64 {
        let mut gap: f64 = 0.0;
        for alpha in union_alphas(self, other) {
            let a = self.alpha_cut(alpha).unwrap();
            let b = other.alpha_cut(alpha).unwrap();
            gap = gap.max((a.lo - b.lo).abs()).max((a.hi - b.hi).abs());
        }
        gap
    }

    /// Equality within tolerance: sup over grid α of endpointwise distance ≤ tau.
    pub fn approx_eq(&self, other: &FuzzyNumber, tau: f64) -> bool {
        self.endpoint_gap(other) <= tau
    }
}

fn triangular_cut(a: f64, b: f64, c: f64, alpha: f64) -> Interval {
    // the exact cut always contains the peak; clamping absorbs the last-ulp
    // rounding of the endpoint formulas at α near 1
    Interval {
        lo: (a + alpha * (b - a)).min(b),
        hi: (c - alpha * (c - b)).max(b),
    }
}

fn union_alphas(a: &FuzzyNumber, b: &FuzzyNumber) -> Vec<f64> {
    let mut alphas: Vec<f64> = a.alphas().chain(b.alphas()).collect();
    alphas.sort_by(|x, y| x.partial_cmp(y).unwrap());
    alphas.dedup();
    alphas
}

/// Serde-facing representation; the JSON wire format of fuzzy numbers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FuzzyNumberRepr {
    Singleton { value: f64 },
    Triangular { a: f64, b: f64, c: f64 },
    General { levels: Vec<(f64, (f64, f64))> },
}

impl FuzzyNumberRepr {
    /// Materializes the wire form on a grid. A general stack keeps its own
    /// levels and ignores the grid.
    pub fn into_number(self, grid: &AlphaGrid) -> Result<FuzzyNumber, FuzzyError> {
        match self {
            FuzzyNumberRepr::Singleton { value } => FuzzyNumber::singleton(value, grid),
            FuzzyNumberRepr::Triangular { a, b, c } => FuzzyNumber::triangular(a, b, c, grid),
            FuzzyNumberRepr::General { levels } => {
                let levels = levels
                    .into_iter()
                    .map(|(alpha, (lo, hi))| Ok((alpha, Interval::new(lo, hi)?)))
                    .collect::<Result<Vec<_>, FuzzyError>>()?;
                FuzzyNumber::reconstruct(levels)
            }
        }
    }
}

impl From<&FuzzyNumber> for FuzzyNumberRepr {
    fn from(n: &FuzzyNumber) -> Self {
        match n.kind() {
            Kind::Singleton(r) => FuzzyNumberRepr::Singleton { value: r },
            Kind::Triangular(a, b, c) => FuzzyNumberRepr::Triangular { a, b, c },
            Kind::General => FuzzyNumberRepr::General {
                levels: n
                    .decompose()
                    .iter()
                    .map(|&(a, iv)| (a, (iv.lo, iv.hi)))
                    .collect(),
            },
        }
    }
}

impl Serialize for FuzzyNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FuzzyNumberRepr::from(self).serialize(s)
    }
}
