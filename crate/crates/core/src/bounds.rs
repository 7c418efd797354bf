//! Endpoint-based upper bounds for the Sugeno integral of a product `f·g`.
//!
//! For (s,m)-convex `f, g ≥ 0` on `[a, b]` each factor is dominated by its
//! envelope `p(x) = m·2^{1-s}·f(a) + ((x - ma)/(b - ma))^s·(f(b) - m·f(a))`.
//! The bound is `min(β, b - a)`, where `β` solves `F(β) = β` for
//! `F(β) = ℓ_f(β)·ℓ_g(β)`, the product of the level-set lengths of the
//! two envelopes:
//!
//! * increasing case (`f(b) > m·f(a)`, `g(b) > m·g(a)`):
//!   `ℓ(β) = (b - ma)·(1 - Q(β)^{1/s})`
//! * decreasing case (`f(b) < m·f(a)`, `g(b) < m·g(a)`):
//!   `ℓ(β) = (b - ma)·Q(β)^{1/s} + (ma - a)`
//!
//! with `Q(β) = (β - m·2^{1-s}·f(a)) / (f(b) - m·f(a))` clamped to `[0, 1]`.
//! When both differences vanish the envelopes are constant and the bound is
//! `min(m²·2^{2-2s}·f(a)·g(a), b - a)`.
//!
//! Literal mode solves these equations exactly as written. Measure-consistent
//! mode additionally clamps each length to `[0, b - a]`; the two agree when
//! `m = 1`.

use serde::Serialize;
use thiserror::Error;

use crate::convexity::{ConvexityError, Envelope, SMParams};
use crate::expr::{EvalError, RealFn};
use crate::measure::{Interval, MeasureSpec};
use crate::rootfind::{solve_sup_threshold, RootError, SolverConfig};
use crate::sugeno::{sugeno_integral, sugeno_integral_oracle, IntegralResult, SugenoError};

pub const TIE_TOL: f64 = 1e-9;
pub const HOLDS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("endpoint case is {got}, but this bound requires {expected}")]
    Case { expected: CaseTag, got: CaseTag },
    #[error("unsupported endpoint case {0}: no bound is available when f and g move in opposite directions")]
    UnsupportedCase(CaseTag),
    #[error("{name} is negative at x = {x} (value {value})")]
    NegativeFunction { name: &'static str, x: f64, value: f64 },
    #[error("endpoint values must be finite")]
    NonFiniteEndpoint,
    #[error("cannot evaluate {name} at endpoint {x}: {source}")]
    Endpoint { name: &'static str, x: f64, source: EvalError },
    #[error(transparent)]
    Convexity(#[from] ConvexityError),
    #[error(transparent)]
    Sugeno(#[from] SugenoError),
    #[error(transparent)]
    Root(#[from] RootError),
}

/// `f(a), f(b), g(a), g(b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndpointData {
    pub fa: f64,
    pub fb: f64,
    pub ga: f64,
    pub gb: f64,
}

impl EndpointData {
    pub fn new(fa: f64, fb: f64, ga: f64, gb: f64) -> Result<Self, BoundsError> {
        if [fa, fb, ga, gb].iter().all(|v| v.is_finite()) {
            Ok(EndpointData { fa, fb, ga, gb })
        } else {
            Err(BoundsError::NonFiniteEndpoint)
        }
    }

    pub fn from_functions<F, G>(f: &F, g: &G, base: &Interval) -> Result<Self, BoundsError>
    where
        F: RealFn + ?Sized,
        G: RealFn + ?Sized,
    {
        let at = |name: &'static str, h: &dyn Fn(f64) -> Result<f64, EvalError>, x: f64| {
            h(x).map_err(|source| BoundsError::Endpoint { name, x, source })
        };
        let fe = |x| f.eval(x);
        let ge = |x| g.eval(x);
        Self::new(
            at("f", &fe, base.a())?,
            at("f", &fe, base.b())?,
            at("g", &ge, base.a())?,
            at("g", &ge, base.b())?,
        )
    }

    /// The same data with the roles of f and g exchanged.
    pub fn swapped(&self) -> Self {
        EndpointData { fa: self.ga, fb: self.gb, ga: self.fa, gb: self.fb }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseTag {
    Increasing,
    Decreasing,
    Degenerate,
    Mixed,
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CaseTag::Increasing => "increasing",
            CaseTag::Decreasing => "decreasing",
            CaseTag::Degenerate => "degenerate",
            CaseTag::Mixed => "mixed",
        })
    }
}

/// Classifies by the signs of `f(b) - m·f(a)` and `g(b) - m·g(a)`, treating
/// differences within 1e-9 of zero as ties.
pub fn classify_case(e: &EndpointData, p: &SMParams) -> CaseTag {
    let sign = |d: f64| {
        if d > TIE_TOL {
            1
        } else if d < -TIE_TOL {
            -1
        } else {
            0
        }
    };
    let m = p.m();
    match (sign(e.fb - m * e.fa), sign(e.gb - m * e.ga)) {
        (1, 1) => CaseTag::Increasing,
        (-1, -1) => CaseTag::Decreasing,
        (0, 0) => CaseTag::Degenerate,
        _ => CaseTag::Mixed,
    }
}

/// Classical bound `M/(s+2) + N/((s+1)(s+2))` with
/// `M = f(a)g(a) + f(b)g(b)` and `N = f(a)g(b) + f(b)g(a)`.
pub fn kirmaci_bound(e: &EndpointData, s: f64) -> f64 {
    let m = e.fa * e.ga + e.fb * e.gb;
    let n = e.fa * e.gb + e.fb * e.ga;
    m / (s + 2.0) + n / ((s + 1.0) * (s + 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaResult {
    pub beta: f64,
    /// `|F(β) - β|` for the equation that produced `β`.
    pub residual: f64,
    /// `min(β, b - a)`
    pub bound: f64,
    pub case: CaseTag,
    pub literal_mode: bool,
}

/// The fixed-point equation `F(β) = β` of the increasing or decreasing case.
#[derive(Debug, Clone, Copy)]
pub struct BetaEquation {
    case: CaseTag,
    f_env: Envelope,
    g_env: Envelope,
    a: f64,
    b: f64,
    s: f64,
    m: f64,
    literal: bool,
}

impl BetaEquation {
    pub fn new(
        e: &EndpointData,
        base: &Interval,
        p: &SMParams,
        literal: bool,
    ) -> Result<Self, BoundsError> {
        let case = classify_case(e, p);
        if !matches!(case, CaseTag::Increasing | CaseTag::Decreasing) {
            return Err(BoundsError::UnsupportedCase(case));
        }
        Ok(BetaEquation {
            case,
            f_env: Envelope::new(e.fa, e.fb, base, p)?,
            g_env: Envelope::new(e.ga, e.gb, base, p)?,
            a: base.a(),
            b: base.b(),
            s: p.s(),
            m: p.m(),
            literal,
        })
    }

    pub fn case(&self) -> CaseTag {
        self.case
    }

    fn length(&self, env: &Envelope, beta: f64) -> f64 {
        let q = ((beta - env.floor()) / env.rise()).clamp(0.0, 1.0);
        let span = env.span();
        let len = match self.case {
            CaseTag::Increasing => span * (1.0 - q.powf(1.0 / self.s)),
            _ => span * q.powf(1.0 / self.s) + (self.m * self.a - self.a),
        };
        if self.literal {
            len
        } else {
            len.clamp(0.0, self.b - self.a)
        }
    }

    /// `F(β) = ℓ_f(β)·ℓ_g(β)`
    pub fn distribution(&self, beta: f64) -> f64 {
        self.length(&self.f_env, beta) * self.length(&self.g_env, beta)
    }

    /// Upper end of the β bracket, `max((b - ma)², b - a)`.
    pub fn bracket_hi(&self) -> f64 {
        let span = self.b - self.m * self.a;
        (span * span).max(self.b - self.a)
    }

    pub fn solve(&self, cfg: &SolverConfig) -> Result<BetaResult, BoundsError> {
        let fp = solve_sup_threshold(|beta| self.distribution(beta), 0.0, self.bracket_hi(), cfg)?;
        Ok(BetaResult {
            beta: fp.value,
            residual: (self.distribution(fp.value) - fp.value).abs(),
            bound: fp.value.min(self.b - self.a),
            case: self.case,
            literal_mode: self.literal,
        })
    }
}

fn require_case(e: &EndpointData, p: &SMParams, expected: CaseTag) -> Result<(), BoundsError> {
    let got = classify_case(e, p);
    if got != expected {
        return Err(BoundsError::Case { expected, got });
    }
    Ok(())
}

/// β for `f(b) > m·f(a)` and `g(b) > m·g(a)`.
pub fn theorem1_beta(
    e: &EndpointData,
    base: &Interval,
    p: &SMParams,
    cfg: &SolverConfig,
    literal: bool,
) -> Result<BetaResult, BoundsError> {
    require_case(e, p, CaseTag::Increasing)?;
    BetaEquation::new(e, base, p, literal)?.solve(cfg)
}

/// β for `f(b) < m·f(a)` and `g(b) < m·g(a)`.
pub fn theorem2_beta(
    e: &EndpointData,
    base: &Interval,
    p: &SMParams,
    cfg: &SolverConfig,
    literal: bool,
) -> Result<BetaResult, BoundsError> {
    require_case(e, p, CaseTag::Decreasing)?;
    BetaEquation::new(e, base, p, literal)?.solve(cfg)
}

/// Bound for `f(b) = m·f(a)` and `g(b) = m·g(a)`:
/// `min(m²·2^{2-2s}·f(a)·g(a), b - a)`.
pub fn degenerate_bound(
    e: &EndpointData,
    base: &Interval,
    p: &SMParams,
) -> Result<BetaResult, BoundsError> {
    require_case(e, p, CaseTag::Degenerate)?;
    let (s, m) = (p.s(), p.m());
    let beta = e.fa * e.ga * (m * m) * 2f64.powf(2.0 - 2.0 * s);
    Ok(BetaResult {
        beta,
        residual: 0.0,
        bound: beta.min(base.length()),
        case: CaseTag::Degenerate,
        literal_mode: true,
    })
}

/// Closed-form β for convex `f, g` (`s = m = 1`) with `f(b) > f(a)`,
/// `g(b) > g(a)`: the root of
/// `(b-a)(1 - (β-f(a))/(f(b)-f(a))) · (b-a)(1 - (β-g(a))/(g(b)-g(a))) = β`.
pub fn convex_increasing_beta(e: &EndpointData, base: &Interval) -> Result<f64, BoundsError> {
    require_case(e, &SMParams::convex(), CaseTag::Increasing)?;
    let l = base.length();
    // 1 - (β - fa)/(fb - fa) = (fb - β)/(fb - fa), clamped
    let uf = ClampedAffine::new(e.fb / (e.fb - e.fa), -1.0 / (e.fb - e.fa));
    let ug = ClampedAffine::new(e.gb / (e.gb - e.ga), -1.0 / (e.gb - e.ga));
    Ok(piecewise_quadratic_fixed_point(l * l, uf, ug, &[e.fa, e.fb, e.ga, e.gb]))
}

/// Closed-form β for convex `f, g` with `f(b) < f(a)`, `g(b) < g(a)`: the root
/// of `(b-a)²·((β-f(a))/(f(b)-f(a)))·((β-g(a))/(g(b)-g(a))) = β`.
pub fn convex_decreasing_beta(e: &EndpointData, base: &Interval) -> Result<f64, BoundsError> {
    require_case(e, &SMParams::convex(), CaseTag::Decreasing)?;
    let l = base.length();
    let qf = ClampedAffine::new(-e.fa / (e.fb - e.fa), 1.0 / (e.fb - e.fa));
    let qg = ClampedAffine::new(-e.ga / (e.gb - e.ga), 1.0 / (e.gb - e.ga));
    Ok(piecewise_quadratic_fixed_point(l * l, qf, qg, &[e.fa, e.fb, e.ga, e.gb]))
}

// clamp(c0 + c1·β, 0, 1)
#[derive(Debug, Clone, Copy)]
struct ClampedAffine {
    c0: f64,
    c1: f64,
}

impl ClampedAffine {
    fn new(c0: f64, c1: f64) -> Self {
        ClampedAffine { c0, c1 }
    }

    fn eval(&self, beta: f64) -> f64 {
        (self.c0 + self.c1 * beta).clamp(0.0, 1.0)
    }

    // Affine form valid on a piece containing `at` (inside the clamp or on a
    // constant plateau).
    fn piece(&self, at: f64) -> (f64, f64) {
        let raw = self.c0 + self.c1 * at;
        if raw <= 0.0 {
            (0.0, 0.0)
        } else if raw >= 1.0 {
            (1.0, 0.0)
        } else {
            (self.c0, self.c1)
        }
    }
}

// Solves scale·u(β)·v(β) = β for the unique crossing of the strictly
// decreasing h(β) = scale·u·v - β, piece by piece between breakpoints.
fn piecewise_quadratic_fixed_point(
    scale: f64,
    u: ClampedAffine,
    v: ClampedAffine,
    breakpoints: &[f64],
) -> f64 {
    let h = |beta: f64| scale * u.eval(beta) * v.eval(beta) - beta;
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&t| t > 0.0).collect();
    cuts.push(0.0);
    cuts.push(scale.max(1.0) + breakpoints.iter().fold(0.0_f64, |acc, &t| acc.max(t)));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if !(h(lo) >= 0.0 && h(hi) < 0.0) {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (u0, u1) = u.piece(mid);
        let (v0, v1) = v.piece(mid);
        // scale(u0 + u1 β)(v0 + v1 β) - β = qa β² + qb β + qc
        let qa = scale * u1 * v1;
        let qb = scale * (u0 * v1 + u1 * v0) - 1.0;
        let qc = scale * u0 * v0;
        let roots = quadratic_roots(qa, qb, qc);
        let slack = 1e-9 * (1.0 + hi.abs());
        if let Some(r) = roots
            .into_iter()
            .flatten()
            .filter(|r| *r >= lo - slack && *r <= hi + slack)
            .min_by(|x, y| (x - mid).abs().total_cmp(&(y - mid).abs()))
        {
            return r.clamp(lo, hi);
        }
    }
    f64::NAN
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> [Option<f64>; 2] {
    if a == 0.0 {
        return [if b != 0.0 { Some(-c / b) } else { None }, None];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return [None, None];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let r1 = q / a;
    let r2 = if q != 0.0 { c / q } else { r1 };
    [Some(r1), Some(r2)]
}

/// Evaluates the endpoints, classifies and dispatches to the matching bound.
pub fn hadamard_bound<F, G>(
    f: &F,
    g: &G,
    base: &Interval,
    p: &SMParams,
    cfg: &SolverConfig,
    literal: bool,
) -> Result<BetaResult, BoundsError>
where
    F: RealFn + ?Sized,
    G: RealFn + ?Sized,
{
    let e = EndpointData::from_functions(f, g, base)?;
    bound_from_endpoints(&e, base, p, cfg, literal)
}

pub fn bound_from_endpoints(
    e: &EndpointData,
    base: &Interval,
    p: &SMParams,
    cfg: &SolverConfig,
    literal: bool,
) -> Result<BetaResult, BoundsError> {
    match classify_case(e, p) {
        CaseTag::Increasing => theorem1_beta(e, base, p, cfg, literal),
        CaseTag::Decreasing => theorem2_beta(e, base, p, cfg, literal),
        CaseTag::Degenerate => degenerate_bound(e, base, p),
        CaseTag::Mixed => Err(BoundsError::UnsupportedCase(CaseTag::Mixed)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    /// Sugeno integral of `f·g` with respect to Lebesgue measure.
    pub integral: IntegralResult,
    pub hadamard_bound: BetaResult,
    pub kirmaci: f64,
    pub holds: bool,
    /// `bound - integral`
    pub margin: f64,
}

/// Flat record with the fixed external field names.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub integral: f64,
    pub beta: f64,
    pub bound: f64,
    pub kirmaci: f64,
    pub case: CaseTag,
    pub holds: bool,
    pub margin: f64,
    pub literal_mode: bool,
    pub residual: f64,
}

impl VerificationReport {
    pub fn record(&self) -> VerificationRecord {
        VerificationRecord {
            integral: self.integral.value,
            beta: self.hadamard_bound.beta,
            bound: self.hadamard_bound.bound,
            kirmaci: self.kirmaci,
            case: self.hadamard_bound.case,
            holds: self.holds,
            margin: self.margin,
            literal_mode: self.hadamard_bound.literal_mode,
            residual: self.hadamard_bound.residual,
        }
    }
}

fn require_non_negative<F: RealFn + ?Sized>(
    name: &'static str,
    f: &F,
    base: &Interval,
    grid: usize,
) -> Result<(), BoundsError> {
    for i in 0..grid {
        let x = base.grid_point(i, grid);
        if let Ok(value) = f.eval(x) {
            if value < 0.0 {
                return Err(BoundsError::NegativeFunction { name, x, value });
            }
        }
    }
    Ok(())
}

/// Computes the Sugeno integral of `f·g`, the endpoint bound and the
/// classical bound, and reports whether the integral stays below the bound.
pub fn verify_hadamard<F, G>(
    f: &F,
    g: &G,
    base: &Interval,
    p: &SMParams,
    cfg: &SolverConfig,
    grid: usize,
    literal: bool,
) -> Result<VerificationReport, BoundsError>
where
    F: RealFn + ?Sized,
    G: RealFn + ?Sized,
{
    require_non_negative("f", f, base, grid)?;
    require_non_negative("g", g, base, grid)?;
    let e = EndpointData::from_functions(f, g, base)?;
    let bound = bound_from_endpoints(&e, base, p, cfg, literal)?;
    let product = |x: f64| -> Result<f64, EvalError> {
        let v = f.eval(x)? * g.eval(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    };
    let integral = sugeno_integral(&product, &MeasureSpec::lebesgue(*base), cfg, grid)?;
    let margin = bound.bound - integral.value;
    Ok(VerificationReport {
        integral,
        hadamard_bound: bound,
        kirmaci: kirmaci_bound(&e, p.s()),
        holds: margin >= -HOLDS_TOL,
        margin,
    })
}

/// Grid-scan Sugeno integral of the envelope product `p₁·p₂` itself, i.e.
/// the fixed point of its true distribution function.
pub fn envelope_product_integral(
    e: &EndpointData,
    base: &Interval,
    p: &SMParams,
    n_alpha: usize,
    grid: usize,
) -> Result<IntegralResult, BoundsError> {
    let pf = Envelope::new(e.fa, e.fb, base, p)?;
    let pg = Envelope::new(e.ga, e.gb, base, p)?;
    let product = |x: f64| -> Result<f64, EvalError> { Ok(pf.eval(x)? * pg.eval(x)?) };
    Ok(sugeno_integral_oracle(&product, &MeasureSpec::lebesgue(*base), n_alpha, grid)?)
}
