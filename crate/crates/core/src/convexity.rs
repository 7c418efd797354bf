//! (s,m)-convexity in the second sense.
//!
//! `f` is (s,m)-convex on `I ⊆ ℝ₊` when
//! `f(λx + m(1-λ)y) ≤ λ^s f(x) + m(1-λ)^s f(y)` for all `x, y ∈ I` and
//! `λ ∈ [0, 1]`. This module checks that inequality on a lattice, evaluates
//! the power-mean gap `2^{1-s} - x^s - (1-x)^s`, and builds the envelopes
//! `p(x) = m·2^{1-s}·f(a) + ((x - ma)/(b - ma))^s·(f(b) - m·f(a))` that
//! dominate an (s,m)-convex `f` on `[a, b]`.

use serde::Serialize;
use thiserror::Error;

use crate::expr::{EvalError, RealFn};
use crate::measure::Interval;

pub const DEFAULT_CONVEXITY_GRID: usize = 41;
pub const MIN_CONVEXITY_GRID: usize = 11;
pub const CONVEXITY_SLACK: f64 = 1e-12;
pub const ENVELOPE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvexityError {
    #[error("(s, m) = ({s}, {m}) must lie in (0, 1]²")]
    InvalidParams { s: f64, m: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("grid of {got} points is too small (minimum {min})")]
    GridTooSmall { got: usize, min: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SMParams {
    s: f64,
    m: f64,
}

impl SMParams {
    pub fn new(s: f64, m: f64) -> Result<Self, ConvexityError> {
        let ok = |v: f64| v > 0.0 && v <= 1.0;
        if !(ok(s) && ok(m)) {
            return Err(ConvexityError::InvalidParams { s, m });
        }
        Ok(SMParams { s, m })
    }

    /// Ordinary convexity, `s = m = 1`.
    pub fn convex() -> Self {
        SMParams { s: 1.0, m: 1.0 }
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn m(&self) -> f64 {
        self.m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub x: f64,
    pub y: f64,
    pub lambda: f64,
    /// `lhs - rhs`, positive for a violation.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityVerdict {
    pub holds_on_grid: bool,
    /// Largest violation found; present iff `holds_on_grid` is false.
    pub witness: Option<Witness>,
    pub grid: usize,
    pub checked: usize,
    /// Triples whose probe point (or endpoint values) could not be evaluated.
    pub skipped: usize,
    pub violations: usize,
}

/// Checks the (s,m)-convexity inequality on the `grid³` lattice over
/// `base × base × [0, 1]`.
pub fn check_sm_convex<F: RealFn + ?Sized>(
    f: &F,
    base: &Interval,
    p: &SMParams,
    grid: usize,
) -> Result<ConvexityVerdict, ConvexityError> {
    if grid < MIN_CONVEXITY_GRID {
        return Err(ConvexityError::GridTooSmall { got: grid, min: MIN_CONVEXITY_GRID });
    }
    let (s, m) = (p.s, p.m);
    let points: Vec<(f64, Option<f64>)> = (0..grid)
        .map(|i| {
            let x = base.grid_point(i, grid);
            (x, f.eval(x).ok())
        })
        .collect();
    let lambdas: Vec<(f64, f64, f64)> = (0..grid)
        .map(|k| {
            let l = if k + 1 == grid { 1.0 } else { k as f64 / (grid - 1) as f64 };
            (l, l.powf(s), m * (1.0 - l).powf(s))
        })
        .collect();

    let mut verdict = ConvexityVerdict {
        holds_on_grid: true,
        witness: None,
        grid,
        checked: 0,
        skipped: 0,
        violations: 0,
    };
    for &(x, fx) in &points {
        for &(y, fy) in &points {
            for &(l, ls, ms) in &lambdas {
                let (Some(fx), Some(fy)) = (fx, fy) else {
                    verdict.skipped += 1;
                    continue;
                };
                let z = l * x + m * (1.0 - l) * y;
                let Ok(fz) = f.eval(z) else {
                    verdict.skipped += 1;
                    continue;
                };
                verdict.checked += 1;
                let rhs = ls * fx + ms * fy;
                let gap = fz - rhs;
                if gap > CONVEXITY_SLACK * rhs.abs().max(1.0) {
                    verdict.violations += 1;
                    verdict.holds_on_grid = false;
                    if verdict.witness.is_none_or(|w| gap > w.gap) {
                        verdict.witness = Some(Witness { x, y, lambda: l, gap });
                    }
                }
            }
        }
    }
    Ok(verdict)
}

/// `2^{1-s} - x^s - (1-x)^s`, non-negative for `x ∈ [0,1]`, `s ∈ (0,1]`.
pub fn lemma_gap(x: f64, s: f64) -> Result<f64, ConvexityError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(ConvexityError::Domain(format!("x = {x} outside [0, 1]")));
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(ConvexityError::Domain(format!("s = {s} outside (0, 1]")));
    }
    Ok(2f64.powf(1.0 - s) - x.powf(s) - (1.0 - x).powf(s))
}

/// Upper envelope built from endpoint values of an (s,m)-convex function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    fa: f64,
    fb: f64,
    a: f64,
    b: f64,
    s: f64,
    m: f64,
}

impl Envelope {
    pub fn new(fa: f64, fb: f64, base: &Interval, p: &SMParams) -> Result<Self, ConvexityError> {
        if !(fa.is_finite() && fb.is_finite()) {
            return Err(ConvexityError::Domain("endpoint values must be finite".into()));
        }
        let env = Envelope { fa, fb, a: base.a(), b: base.b(), s: p.s, m: p.m };
        if !(env.span() > 0.0) {
            return Err(ConvexityError::Domain("b - m·a must be positive".into()));
        }
        Ok(env)
    }

    /// `b - m·a`
    pub fn span(&self) -> f64 {
        self.b - self.m * self.a
    }

    /// `m·2^{1-s}·f(a)`, the value at `x = m·a`.
    pub fn floor(&self) -> f64 {
        self.m * 2f64.powf(1.0 - self.s) * self.fa
    }

    /// `f(b) - m·f(a)`
    pub fn rise(&self) -> f64 {
        self.fb - self.m * self.fa
    }

    pub fn value(&self, x: f64) -> Result<f64, ConvexityError> {
        if !(self.a <= x && x <= self.b) {
            return Err(ConvexityError::Domain(format!(
                "x = {x} outside [{}, {}]",
                self.a, self.b
            )));
        }
        let t = (x - self.m * self.a) / self.span();
        Ok(self.floor() + t.powf(self.s) * self.rise())
    }
}

impl RealFn for Envelope {
    fn eval(&self, x: f64) -> Result<f64, EvalError> {
        self.value(x).map_err(|e| EvalError::Domain(e.to_string()))
    }
}

pub fn envelope(
    fa: f64,
    fb: f64,
    base: &Interval,
    p: &SMParams,
) -> Result<Envelope, ConvexityError> {
    Envelope::new(fa, fb, base, p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeCheck {
    pub dominates: bool,
    /// `(x, f(x), p(x))` at the largest excess of `f` over the envelope.
    pub witness: Option<(f64, f64, f64)>,
    pub checked: usize,
}

/// Checks `f(x) ≤ p(x) + 1e-9` on `grid` points of `base`.
pub fn check_envelope_dominates<F: RealFn + ?Sized>(
    f: &F,
    fa: f64,
    fb: f64,
    base: &Interval,
    p: &SMParams,
    grid: usize,
) -> Result<EnvelopeCheck, ConvexityError> {
    if grid < 2 {
        return Err(ConvexityError::GridTooSmall { got: grid, min: 2 });
    }
    let env = Envelope::new(fa, fb, base, p)?;
    let mut check = EnvelopeCheck { dominates: true, witness: None, checked: 0 };
    let mut worst = 0.0;
    for i in 0..grid {
        let x = base.grid_point(i, grid);
        let Ok(fx) = f.eval(x) else { continue };
        let px = env.value(x)?;
        check.checked += 1;
        let excess = fx - px;
        if excess > ENVELOPE_SLACK && excess > worst {
            worst = excess;
            check.dominates = false;
            check.witness = Some((x, fx, px));
        }
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::FunctionExpr;

    fn f(text: &str) -> FunctionExpr {
        FunctionExpr::parse(text).unwrap()
    }

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(SMParams::new(0.0, 1.0).is_err());
        assert!(SMParams::new(1.0, 1.5).is_err());
        assert!(SMParams::new(1.0 / 3.0, 1.0).is_ok());
    }

    #[test]
    fn convexity_examples() {
        let p = SMParams::new(1.0 / 3.0, 1.0).unwrap();
        let v = check_sm_convex(&f("x^3/2"), &iv(0.0, 1.0), &p, 21).unwrap();
        assert!(v.holds_on_grid && v.witness.is_none());
        assert_eq!(v.checked, 21 * 21 * 21);

        let v = check_sm_convex(&f("0"), &iv(0.0, 1.0), &SMParams::new(0.2, 0.4).unwrap(), 11)
            .unwrap();
        assert!(v.holds_on_grid);

        let v = check_sm_convex(&f("x"), &iv(0.0, 1.0), &SMParams::convex(), 21).unwrap();
        assert!(v.holds_on_grid);
    }

    #[test]
    fn tent_violation_witness() {
        let v = check_sm_convex(&f("1/2 - abs(x - 1/2)"), &iv(0.0, 1.0), &SMParams::convex(), 21)
            .unwrap();
        assert!(!v.holds_on_grid);
        let w = v.witness.unwrap();
        assert_eq!((w.x, w.y, w.lambda), (0.0, 1.0, 0.5));
        assert!((w.gap - 0.5).abs() < 1e-12);
    }

    #[test]
    fn square_root_is_not_convex() {
        let v = check_sm_convex(&f("x^(1/2)"), &iv(1.0, 4.0), &SMParams::convex(), 41).unwrap();
        assert!(!v.holds_on_grid);
        let w = v.witness.unwrap();
        // chord below the curve: √(λx + (1-λ)y) > λ√x + (1-λ)√y
        let lhs = (w.lambda * w.x + (1.0 - w.lambda) * w.y).sqrt();
        let rhs = w.lambda * w.x.sqrt() + (1.0 - w.lambda) * w.y.sqrt();
        assert!((lhs - rhs - w.gap).abs() < 1e-12 && w.gap > 0.08);

        let v = check_sm_convex(&f("-x^(1/2)"), &iv(1.0, 4.0), &SMParams::convex(), 41).unwrap();
        assert!(v.holds_on_grid);
    }

    #[test]
    fn probe_outside_domain_is_skipped() {
        // m < 1 pulls the probe point below a = 1 where ln(x - 0.5) fails
        let p = SMParams::new(1.0, 0.1).unwrap();
        let v = check_sm_convex(&f("ln(x - 0.5) + 10"), &iv(1.0, 2.0), &p, 11).unwrap();
        assert!(v.skipped > 0);
        assert_eq!(v.checked + v.skipped, 11 * 11 * 11);
    }

    #[test]
    fn lemma_examples() {
        assert!(lemma_gap(0.5, 1.0).unwrap().abs() < 1e-15);
        assert!((lemma_gap(0.0, 0.5).unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!((lemma_gap(0.0, 0.5).unwrap() - 0.414214).abs() < 1e-6);
        assert!(lemma_gap(1.0, 1.0).unwrap().abs() < 1e-15);
        assert!(lemma_gap(1.5, 0.5).is_err());
        assert!(lemma_gap(0.5, 0.0).is_err());
    }

    #[test]
    fn envelope_examples() {
        let e = envelope(1.0, 3.0, &iv(0.0, 1.0), &SMParams::convex()).unwrap();
        assert_eq!(e.value(0.5).unwrap(), 2.0);
        let e = envelope(1.0, 3.0, &iv(0.0, 1.0), &SMParams::new(0.5, 1.0).unwrap()).unwrap();
        assert!((e.value(0.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(e.value(1.5).is_err());
        // f(b) = m·f(a): constant envelope
        let p = SMParams::new(0.5, 0.5).unwrap();
        let e = envelope(2.0, 1.0, &iv(1.0, 2.0), &p).unwrap();
        let c = 0.5 * 2f64.sqrt() * 2.0;
        for x in [1.0, 1.3, 2.0] {
            assert!((e.value(x).unwrap() - c).abs() < 1e-15);
        }
    }

    #[test]
    fn envelope_domination_examples() {
        let check = |text: &str, a: f64, b: f64, p: SMParams, grid: usize| {
            let func = f(text);
            let fa = func.evaluate(a).unwrap();
            let fb = func.evaluate(b).unwrap();
            check_envelope_dominates(&func, fa, fb, &iv(a, b), &p, grid).unwrap()
        };
        assert!(check("x^2", 0.0, 1.0, SMParams::convex(), 1001).dominates);
        assert!(check("x^5/4", 0.0, 1.0, SMParams::new(1.0 / 3.0, 1.0).unwrap(), 10_000).dominates);
        assert!(check("x^(3/2)", 1.0, 4.0, SMParams::convex(), 1001).dominates);
        // concave function sits above its chord
        let c = check("sqrt(x)", 1.0, 4.0, SMParams::convex(), 1001);
        assert!(!c.dominates);
        let (x, fx, px) = c.witness.unwrap();
        assert!(fx > px && (1.0..=4.0).contains(&x));
    }
}
