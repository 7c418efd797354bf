//! Fuzzy measures on finite unions of subintervals of a base interval.
//!
//! Two measures are provided: Lebesgue measure (total length) and
//! distortion measures `A ↦ φ(length(A))` for a non-decreasing `φ` with
//! `φ(0) = 0`. Distortions are monotone and continuous but in general not
//! additive.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{EvalError, FunctionExpr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("invalid interval [{a}, {b}]: {reason}")]
    InvalidInterval { a: f64, b: f64, reason: &'static str },
    #[error("invalid interval union: {0}")]
    InvalidUnion(String),
    #[error("distortion map rejected: {0}")]
    InvalidDistortion(String),
    #[error("set is not contained in the base interval")]
    OutsideBase,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Closed interval `[a, b]` with `0 ≤ a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, MeasureError> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(MeasureError::InvalidInterval { a, b, reason: "endpoints must be finite" });
        }
        if a < 0.0 {
            return Err(MeasureError::InvalidInterval { a, b, reason: "a must be non-negative" });
        }
        if !(a < b) {
            return Err(MeasureError::InvalidInterval { a, b, reason: "a must be less than b" });
        }
        Ok(Interval { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    /// `n ≥ 2` equally spaced points from `a` to `b`, both ends included.
    pub fn grid_point(&self, i: usize, n: usize) -> f64 {
        if i + 1 == n {
            self.b
        } else {
            self.a + (self.b - self.a) * (i as f64 / (n - 1) as f64)
        }
    }
}

/// Ordered, pairwise-disjoint closed pieces. Degenerate pieces (`lo == hi`)
/// are allowed and carry zero length.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalUnion {
    parts: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion { parts: Vec::new() }
    }

    pub fn single(lo: f64, hi: f64) -> Result<Self, MeasureError> {
        Self::new(vec![(lo, hi)])
    }

    pub fn new(parts: Vec<(f64, f64)>) -> Result<Self, MeasureError> {
        for (i, &(lo, hi)) in parts.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(MeasureError::InvalidUnion(format!("piece {i} = [{lo}, {hi}]")));
            }
            if i > 0 && parts[i - 1].1 >= lo {
                return Err(MeasureError::InvalidUnion(format!(
                    "pieces {} and {i} overlap or are unsorted",
                    i - 1
                )));
            }
        }
        Ok(IntervalUnion { parts })
    }

    /// Builds a union from arbitrary pieces, sorting and merging overlaps.
    pub fn from_unsorted(mut parts: Vec<(f64, f64)>) -> Result<Self, MeasureError> {
        parts.retain(|&(lo, hi)| lo <= hi);
        parts.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(parts.len());
        for (lo, hi) in parts {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Self::new(merged)
    }

    pub fn parts(&self) -> &[(f64, f64)] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.parts.iter().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn within(&self, base: &Interval) -> bool {
        self.parts.iter().all(|&(lo, hi)| base.contains(lo) && base.contains(hi))
    }

    pub fn is_subset_of(&self, other: &IntervalUnion) -> bool {
        self.parts
            .iter()
            .all(|&(lo, hi)| other.parts.iter().any(|&(olo, ohi)| olo <= lo && hi <= ohi))
    }
}

/// Which fuzzy measure to use, bound to a base interval.
#[derive(Debug, Clone)]
pub enum MeasureSpec {
    Lebesgue { base: Interval },
    Distortion { base: Interval, phi: FunctionExpr },
}

const DISTORTION_CHECK_POINTS: usize = 1001;

impl MeasureSpec {
    pub fn lebesgue(base: Interval) -> Self {
        MeasureSpec::Lebesgue { base }
    }

    /// Validates `φ(0) = 0` and that `φ` is non-decreasing on a 1001-point
    /// grid over `[0, length(base)]`.
    pub fn distortion(phi: FunctionExpr, base: Interval) -> Result<Self, MeasureError> {
        let at_zero = phi.evaluate(0.0)?;
        if at_zero != 0.0 {
            return Err(MeasureError::InvalidDistortion(format!("φ(0) = {at_zero}, expected 0")));
        }
        let len = base.length();
        let mut prev = at_zero;
        for i in 1..DISTORTION_CHECK_POINTS {
            let t = len * i as f64 / (DISTORTION_CHECK_POINTS - 1) as f64;
            let v = phi.evaluate(t)?;
            if v < prev {
                return Err(MeasureError::InvalidDistortion(format!(
                    "φ decreases near t = {t} ({prev} -> {v})"
                )));
            }
            prev = v;
        }
        Ok(MeasureSpec::Distortion { base, phi })
    }

    pub fn base(&self) -> Interval {
        match self {
            MeasureSpec::Lebesgue { base } | MeasureSpec::Distortion { base, .. } => *base,
        }
    }

    pub fn with_base(&self, base: Interval) -> Result<Self, MeasureError> {
        match self {
            MeasureSpec::Lebesgue { .. } => Ok(MeasureSpec::Lebesgue { base }),
            MeasureSpec::Distortion { phi, .. } => MeasureSpec::distortion(phi.clone(), base),
        }
    }

    pub fn is_lebesgue(&self) -> bool {
        matches!(self, MeasureSpec::Lebesgue { .. })
    }

    /// Measure of a set given only its Lebesgue length.
    pub fn of_length(&self, length: f64) -> Result<f64, EvalError> {
        let length = length.max(0.0);
        match self {
            MeasureSpec::Lebesgue { .. } => Ok(length),
            MeasureSpec::Distortion { phi, .. } => phi.evaluate(length),
        }
    }

    pub fn measure_of(&self, set: &IntervalUnion) -> Result<f64, MeasureError> {
        if !set.within(&self.base()) {
            return Err(MeasureError::OutsideBase);
        }
        Ok(self.of_length(set.total_length())?)
    }

    /// Measure of the whole base interval.
    pub fn total(&self) -> Result<f64, EvalError> {
        self.of_length(self.base().length())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomVerdict {
    pub holds: bool,
    pub checks: usize,
    pub worst_violation: f64,
    pub detail: Option<String>,
}

impl AxiomVerdict {
    fn new() -> Self {
        AxiomVerdict { holds: true, checks: 0, worst_violation: 0.0, detail: None }
    }

    fn record(&mut self, violation: f64, tol: f64, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if violation > tol {
            if violation > self.worst_violation {
                self.worst_violation = violation;
                self.detail = Some(detail());
            }
            self.holds = false;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub empty_set: AxiomVerdict,
    pub monotonicity: AxiomVerdict,
    pub continuity_from_below: AxiomVerdict,
    pub continuity_from_above: AxiomVerdict,
}

impl AxiomReport {
    pub fn all_hold(&self) -> bool {
        self.empty_set.holds
            && self.monotonicity.holds
            && self.continuity_from_below.holds
            && self.continuity_from_above.holds
    }
}

pub const CONTINUITY_TOL: f64 = 1e-9;
const AXIOM_SEED: u64 = 0x5ae7_0f00_d1ce;

/// Empirical check of the four fuzzy-measure axioms.
///
/// Monotonicity is tested on `n_samples` random nested pairs `A ⊆ B`.
/// Continuity is tested on `n_samples` increasing (resp. decreasing)
/// chains of length `n_samples` whose gap to the limit set shrinks
/// geometrically; the last chain element is compared to the limit at
/// tolerance 1e-9, and every step is checked for monotone measures.
pub fn verify_fuzzy_measure_axioms(
    spec: &MeasureSpec,
    base: &Interval,
    n_samples: usize,
) -> Result<AxiomReport, MeasureError> {
    if n_samples < 2 {
        return Err(MeasureError::InvalidUnion("n_samples must be at least 2".into()));
    }
    let spec = if spec.base() == *base { spec.clone() } else { spec.with_base(*base)? };
    let mut rng = ChaCha8Rng::seed_from_u64(AXIOM_SEED);

    let mut empty_set = AxiomVerdict::new();
    let empty = spec.measure_of(&IntervalUnion::empty())?;
    empty_set.record(empty.abs(), 0.0, || format!("μ(∅) = {empty}"));

    let mut monotonicity = AxiomVerdict::new();
    for _ in 0..n_samples {
        let outer = random_union(&mut rng, base, 4);
        let inner = random_subset(&mut rng, &outer);
        debug_assert!(inner.is_subset_of(&outer));
        let (mi, mo) = (spec.measure_of(&inner)?, spec.measure_of(&outer)?);
        monotonicity.record(mi - mo, 0.0, || {
            format!("μ(A) = {mi} > μ(B) = {mo} for A = {:?} ⊆ B = {:?}", inner.parts(), outer.parts())
        });
    }

    let mut below = AxiomVerdict::new();
    let mut above = AxiomVerdict::new();
    for _ in 0..n_samples {
        let limit = random_union(&mut rng, base, 3);
        if limit.is_empty() {
            continue;
        }
        let mu_limit = spec.measure_of(&limit)?;

        // Increasing chain: every piece shortened from the right, gap → 0.
        let mut prev = f64::NEG_INFINITY;
        let mut last = 0.0;
        for k in 0..n_samples {
            let shrink = geometric_gap(k, n_samples);
            let set = IntervalUnion::new(
                limit.parts().iter().map(|&(lo, hi)| (lo, hi - (hi - lo) * shrink)).collect(),
            )?;
            let m = spec.measure_of(&set)?;
            below.record(prev - m, 0.0, || format!("chain measure decreased: {prev} -> {m}"));
            prev = m;
            last = m;
        }
        below.record((last - mu_limit).abs(), CONTINUITY_TOL, || {
            format!("lim μ(E_n) = {last}, μ(∪E_n) = {mu_limit}")
        });

        // Decreasing chain: last piece extended to the right (or the first
        // to the left when the last touches b), gap → 0.
        let parts = limit.parts();
        let (room_right, room_left) = {
            let last_hi = parts[parts.len() - 1].1;
            let next_lo = base.b();
            let first_lo = parts[0].0;
            (next_lo - last_hi, first_lo - base.a())
        };
        let mut prev = f64::INFINITY;
        let mut last = 0.0;
        for k in 0..n_samples {
            let grow = geometric_gap(k, n_samples);
            let mut extended = parts.to_vec();
            if room_right > 0.0 {
                let n = extended.len();
                extended[n - 1].1 += room_right * grow;
            } else if room_left > 0.0 {
                extended[0].0 -= room_left * grow;
            }
            let set = IntervalUnion::new(extended)?;
            let m = spec.measure_of(&set)?;
            above.record(m - prev, 0.0, || format!("chain measure increased: {prev} -> {m}"));
            prev = m;
            last = m;
        }
        above.record((last - mu_limit).abs(), CONTINUITY_TOL, || {
            format!("lim μ(E_n) = {last}, μ(∩E_n) = {mu_limit}")
        });
    }

    Ok(AxiomReport {
        empty_set,
        monotonicity,
        continuity_from_below: below,
        continuity_from_above: above,
    })
}

// Relative gap for chain element k of n: 1/2 at k = 0 shrinking
// geometrically to 1e-40 at k = n - 1.
fn geometric_gap(k: usize, n: usize) -> f64 {
    let t = k as f64 / (n - 1) as f64;
    0.5 * (2e-40_f64).powf(t)
}

fn random_union(rng: &mut ChaCha8Rng, base: &Interval, max_parts: usize) -> IntervalUnion {
    let n = rng.gen_range(1..=max_parts);
    let mut cuts: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(base.a()..=base.b())).collect();
    cuts.sort_by(f64::total_cmp);
    let parts: Vec<(f64, f64)> = cuts.chunks(2).map(|c| (c[0], c[1])).collect();
    IntervalUnion::from_unsorted(parts).unwrap_or_default()
}

fn random_subset(rng: &mut ChaCha8Rng, outer: &IntervalUnion) -> IntervalUnion {
    let mut parts = Vec::new();
    for &(lo, hi) in outer.parts() {
        if rng.gen_bool(0.3) {
            continue;
        }
        let u = rng.gen_range(lo..=hi);
        let v = rng.gen_range(lo..=hi);
        parts.push((u.min(v), u.max(v)));
    }
    IntervalUnion::new(parts).unwrap_or_default()
}
