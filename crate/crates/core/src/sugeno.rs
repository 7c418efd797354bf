//! Distribution functions and Sugeno integrals over an interval.
//!
//! For a non-negative `f` on `[a, b]` and a fuzzy measure `μ`, the
//! distribution function is `F(α) = μ({x : f(x) ≥ α})` and the Sugeno
//! integral is `sup_α min(α, F(α))`. Since `F` is non-increasing, the
//! integral is the sup-threshold `sup{α : F(α) ≥ α}`, which
//! [`sugeno_integral`] finds by predicate bisection. [`sugeno_integral_oracle`]
//! computes the same quantity by brute force over an α grid and is kept
//! independent of the bisection path.

use serde::Serialize;
use thiserror::Error;

use crate::expr::{EvalError, RealFn};
use crate::measure::{Interval, MeasureError, MeasureSpec};
use crate::rootfind::{solve_sign_change, solve_sup_threshold, RootError, SolverConfig};

pub const DEFAULT_GRID: usize = 100_001;
pub const DEFAULT_N_ALPHA: usize = 100_001;
pub const MIN_GRID: usize = 101;
pub const MIN_N_ALPHA: usize = 1000;
/// Integration proceeds only while fewer than this fraction of grid points
/// fail to evaluate.
pub const MAX_EXCLUDED_FRACTION: f64 = 1e-3;
pub const PROPERTY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SugenoError {
    #[error("function is negative at x = {x} (value {value})")]
    NegativeFunction { x: f64, value: f64 },
    #[error("{excluded} of {grid} grid points could not be evaluated")]
    TooManyExclusions { excluded: usize, grid: usize },
    #[error("grid of {got} points is too small (minimum {min})")]
    GridTooSmall { got: usize, min: usize },
    #[error("precondition failed at x = {x}: {message}")]
    Precondition { x: f64, message: String },
    #[error("invalid α list: {0}")]
    InvalidAlphas(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Root(#[from] RootError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    FixedPoint,
    GridScan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    pub method: Method,
    pub residual: f64,
    pub alpha_bracket: (f64, f64),
    pub grid_points: usize,
    pub excluded_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Monotonicity {
    NonDecreasing,
    NonIncreasing,
    Neither,
}

/// A function sampled once on an equally spaced grid over the base
/// interval, answering level-set queries.
pub struct SampledFunction<'a, F: RealFn + ?Sized> {
    f: &'a F,
    base: Interval,
    grid: usize,
    /// (grid index, value) for every evaluable grid point, in x order.
    valid: Vec<(usize, f64)>,
    /// Evaluable values sorted ascending, for grid counting.
    sorted: Vec<f64>,
    monotonicity: Monotonicity,
    cfg: SolverConfig,
}

impl<'a, F: RealFn + ?Sized> SampledFunction<'a, F> {
    pub fn new(f: &'a F, base: Interval, grid: usize) -> Result<Self, SugenoError> {
        if grid < MIN_GRID {
            return Err(SugenoError::GridTooSmall { got: grid, min: MIN_GRID });
        }
        let valid: Vec<(usize, f64)> = (0..grid)
            .filter_map(|i| f.eval(base.grid_point(i, grid)).ok().map(|v| (i, v)))
            .collect();
        let monotonicity = detect_monotonicity(valid.iter().map(|&(_, v)| v));
        let mut sorted: Vec<f64> = valid.iter().map(|&(_, v)| v).collect();
        sorted.sort_by(f64::total_cmp);
        Ok(SampledFunction {
            f,
            base,
            grid,
            valid,
            sorted,
            monotonicity,
            cfg: SolverConfig::default(),
        })
    }

    pub fn excluded(&self) -> usize {
        self.grid - self.valid.len()
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// The common value when every evaluable sample is equal.
    pub fn constant_value(&self) -> Option<f64> {
        match (self.sorted.first(), self.sorted.last()) {
            (Some(&lo), Some(&hi)) if lo == hi => Some(lo),
            _ => None,
        }
    }

    fn x(&self, i: usize) -> f64 {
        self.base.grid_point(i, self.grid)
    }

    /// Fails with a witness at the most negative grid value.
    pub fn require_non_negative(&self) -> Result<(), SugenoError> {
        let worst = self
            .valid
            .iter()
            .filter(|&&(_, v)| v < 0.0)
            .min_by(|x, y| x.1.total_cmp(&y.1));
        match worst {
            Some(&(i, value)) => Err(SugenoError::NegativeFunction { x: self.x(i), value }),
            None => Ok(()),
        }
    }

    pub fn require_evaluable(&self) -> Result<(), SugenoError> {
        let excluded = self.excluded();
        if excluded as f64 >= MAX_EXCLUDED_FRACTION * self.grid as f64 {
            return Err(SugenoError::TooManyExclusions { excluded, grid: self.grid });
        }
        Ok(())
    }

    /// Lebesgue length of `{x ∈ base : f(x) ≥ α}`.
    ///
    /// Monotone samples get an exact interval whose inner boundary is
    /// refined by bisection; otherwise the grid fraction is used.
    pub fn level_set_length(&self, alpha: f64) -> f64 {
        let len = self.base.length();
        if self.valid.is_empty() {
            return 0.0;
        }
        match self.monotonicity {
            Monotonicity::NonDecreasing => {
                let p = self.valid.partition_point(|&(_, v)| v < alpha);
                if p == self.valid.len() {
                    return 0.0;
                }
                if p == 0 {
                    return len;
                }
                let lo = self.x(self.valid[p - 1].0);
                let hi = self.x(self.valid[p].0);
                (self.base.b() - self.refine(alpha, lo, hi)).clamp(0.0, len)
            }
            Monotonicity::NonIncreasing => {
                let p = self.valid.partition_point(|&(_, v)| v >= alpha);
                if p == 0 {
                    return 0.0;
                }
                if p == self.valid.len() {
                    return len;
                }
                let lo = self.x(self.valid[p - 1].0);
                let hi = self.x(self.valid[p].0);
                (self.refine(alpha, lo, hi) - self.base.a()).clamp(0.0, len)
            }
            Monotonicity::Neither => {
                let count = self.sorted.len() - self.sorted.partition_point(|&v| v < alpha);
                len * count as f64 / self.grid as f64
            }
        }
    }

    // Boundary of {f ≥ α} inside a grid cell where the predicate flips.
    fn refine(&self, alpha: f64, lo: f64, hi: f64) -> f64 {
        let g = |x: f64| match self.f.eval(x) {
            Ok(v) => v - alpha,
            Err(_) => f64::NAN,
        };
        let (g_lo, g_hi) = (g(lo), g(hi));
        if g_lo.is_nan() || g_hi.is_nan() {
            return 0.5 * (lo + hi);
        }
        // Interior evaluation failures are lumped with the right end.
        solve_sign_change(
            |x| {
                let v = g(x);
                if v.is_nan() {
                    g_hi
                } else {
                    v
                }
            },
            lo,
            hi,
            &self.cfg,
        )
        .unwrap_or(0.5 * (lo + hi))
    }

    /// `F(α) = μ({f ≥ α})` under `spec`.
    pub fn distribution(&self, spec: &MeasureSpec, alpha: f64) -> f64 {
        spec.of_length(self.level_set_length(alpha)).unwrap_or(f64::NAN)
    }
}

fn detect_monotonicity(values: impl Iterator<Item = f64>) -> Monotonicity {
    let mut up = false;
    let mut down = false;
    let mut prev: Option<f64> = None;
    for v in values {
        if let Some(p) = prev {
            if v > p {
                up = true;
            } else if v < p {
                down = true;
            }
            if up && down {
                return Monotonicity::Neither;
            }
        }
        prev = Some(v);
    }
    if down {
        Monotonicity::NonIncreasing
    } else {
        Monotonicity::NonDecreasing
    }
}

/// `μ({x ∈ base : f(x) ≥ α})` for the base interval carried by `spec`.
pub fn level_set_measure<F: RealFn + ?Sized>(
    f: &F,
    spec: &MeasureSpec,
    alpha: f64,
    grid: usize,
) -> Result<f64, SugenoError> {
    let sampled = SampledFunction::new(f, spec.base(), grid)?;
    Ok(spec.of_length(sampled.level_set_length(alpha))?)
}

/// Sugeno integral of `f` over the base interval of `spec` by sup-threshold
/// bisection on `[0, μ(base)]`.
pub fn sugeno_integral<F: RealFn + ?Sized>(
    f: &F,
    spec: &MeasureSpec,
    cfg: &SolverConfig,
    grid: usize,
) -> Result<IntegralResult, SugenoError> {
    let sampled = SampledFunction::new(f, spec.base(), grid)?;
    integrate_sampled(&sampled, spec, cfg)
}

pub fn integrate_sampled<F: RealFn + ?Sized>(
    sampled: &SampledFunction<'_, F>,
    spec: &MeasureSpec,
    cfg: &SolverConfig,
) -> Result<IntegralResult, SugenoError> {
    sampled.require_evaluable()?;
    sampled.require_non_negative()?;
    let total = spec.total()?;
    if let Some(c) = sampled.constant_value() {
        // F is total up to c and 0 beyond
        let value = c.min(total);
        return Ok(IntegralResult {
            value,
            method: Method::FixedPoint,
            residual: (sampled.distribution(spec, value) - value).abs(),
            alpha_bracket: (value, value),
            grid_points: sampled.grid(),
            excluded_points: sampled.excluded(),
        });
    }
    let fp = solve_sup_threshold(|alpha| sampled.distribution(spec, alpha), 0.0, total, cfg)?;
    Ok(IntegralResult {
        value: fp.value,
        method: Method::FixedPoint,
        residual: fp.residual,
        alpha_bracket: fp.bracket,
        grid_points: sampled.grid(),
        excluded_points: sampled.excluded(),
    })
}

/// Brute-force Sugeno integral: the maximum of `min(α, F̂(α))` over
/// `n_alpha` equally spaced α values in `[0, μ(base)]`, with `F̂` the grid
/// fraction of points where `f ≥ α`.
pub fn sugeno_integral_oracle<F: RealFn + ?Sized>(
    f: &F,
    spec: &MeasureSpec,
    n_alpha: usize,
    grid: usize,
) -> Result<IntegralResult, SugenoError> {
    if n_alpha < MIN_N_ALPHA {
        return Err(SugenoError::GridTooSmall { got: n_alpha, min: MIN_N_ALPHA });
    }
    if grid < MIN_GRID {
        return Err(SugenoError::GridTooSmall { got: grid, min: MIN_GRID });
    }
    let base = spec.base();
    let mut values = Vec::with_capacity(grid);
    for i in 0..grid {
        let x = base.grid_point(i, grid);
        match f.eval(x) {
            Ok(v) if v < 0.0 => return Err(SugenoError::NegativeFunction { x, value: v }),
            Ok(v) => values.push(v),
            Err(_) => {}
        }
    }
    let excluded = grid - values.len();
    if excluded as f64 >= MAX_EXCLUDED_FRACTION * grid as f64 {
        return Err(SugenoError::TooManyExclusions { excluded, grid });
    }
    values.sort_by(f64::total_cmp);

    let total = spec.total()?;
    let len = base.length();
    let mut best = 0.0_f64;
    let mut best_j = 0;
    for j in 0..n_alpha {
        let alpha = total * j as f64 / (n_alpha - 1) as f64;
        let count = values.len() - values.partition_point(|&v| v < alpha);
        let f_hat = spec.of_length(len * count as f64 / grid as f64)?;
        let m = alpha.min(f_hat);
        if m > best {
            best = m;
            best_j = j;
        }
    }
    let step = total / (n_alpha - 1) as f64;
    Ok(IntegralResult {
        value: best,
        method: Method::GridScan,
        residual: step,
        alpha_bracket: (best_j as f64 * step, ((best_j + 1) as f64 * step).min(total)),
        grid_points: grid,
        excluded_points: excluded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionProfile {
    pub samples: Vec<(f64, f64)>,
}

impl DistributionProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,F\n");
        for (a, v) in &self.samples {
            out.push_str(&format!("{a:?},{v:?}\n"));
        }
        out
    }
}

pub fn distribution_profile<F: RealFn + ?Sized>(
    f: &F,
    spec: &MeasureSpec,
    alphas: &[f64],
    grid: usize,
) -> Result<DistributionProfile, SugenoError> {
    if alphas.is_empty() {
        return Err(SugenoError::InvalidAlphas("no α values given".into()));
    }
    if alphas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(SugenoError::InvalidAlphas("α values must be strictly increasing".into()));
    }
    let sampled = SampledFunction::new(f, spec.base(), grid)?;
    let samples = alphas.iter().map(|&a| (a, sampled.distribution(spec, a))).collect();
    Ok(DistributionProfile { samples })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyVerdict {
    pub item: u8,
    pub statement: &'static str,
    pub holds: bool,
    /// True when the verdict comes from a finite probe of a statement that
    /// quantifies over all α or γ.
    pub sampled: bool,
    pub checks: usize,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub integral_f: f64,
    pub integral_g: f64,
    pub integral_k: f64,
    pub measure_of_base: f64,
    pub verdicts: Vec<PropertyVerdict>,
}

impl PropertyReport {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }
}

struct Tally {
    checks: usize,
    failure: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { checks: 0, failure: None }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(detail());
        }
    }

    fn verdict(self, item: u8, statement: &'static str, sampled: bool) -> PropertyVerdict {
        PropertyVerdict {
            item,
            statement,
            holds: self.failure.is_none(),
            sampled,
            checks: self.checks,
            detail: self.failure,
        }
    }
}

const GAMMA_PROBES: usize = 10;

/// Numerical check of the basic Sugeno-integral properties for `f ≤ g` and
/// a constant `k`, at tolerance 1e-6.
///
/// Items 1-3 compare computed integrals. Items 4-5 probe α values built
/// around the computed integral plus an even spread over `[0, μ(A)]`.
/// Items 6-7 are biconditionals over all γ; they are checked on a
/// 10-point γ probe and flagged as sampled.
pub fn check_proposition_properties<F, G>(
    f: &F,
    g: &G,
    k: f64,
    spec: &MeasureSpec,
    cfg: &SolverConfig,
    grid: usize,
) -> Result<PropertyReport, SugenoError>
where
    F: RealFn + ?Sized,
    G: RealFn + ?Sized,
{
    if !(k >= 0.0 && k.is_finite()) {
        return Err(SugenoError::Precondition { x: f64::NAN, message: format!("k = {k} must be non-negative") });
    }
    let base = spec.base();
    let sf = SampledFunction::new(f, base, grid)?;
    let sg = SampledFunction::new(g, base, grid)?;
    sf.require_non_negative()?;
    sg.require_non_negative()?;

    // f ≤ g on the grid; witness at the largest excess.
    let mut worst: Option<(f64, f64)> = None;
    for i in 0..grid {
        let x = base.grid_point(i, grid);
        if let (Ok(fv), Ok(gv)) = (f.eval(x), g.eval(x)) {
            let excess = fv - gv;
            if excess > 0.0 && worst.is_none_or(|(_, w)| excess > w) {
                worst = Some((x, excess));
            }
        }
    }
    if let Some((x, excess)) = worst {
        return Err(SugenoError::Precondition {
            x,
            message: format!("f exceeds g by {excess}"),
        });
    }

    let ifx = integrate_sampled(&sf, spec, cfg)?.value;
    let igx = integrate_sampled(&sg, spec, cfg)?.value;
    let constant = move |_x: f64| -> Result<f64, EvalError> { Ok(k) };
    let sk = SampledFunction::new(&constant, base, grid)?;
    let ik = integrate_sampled(&sk, spec, cfg)?.value;
    let mu = spec.total()?;
    let tol = PROPERTY_TOL;
    let mut verdicts = Vec::with_capacity(7);

    let mut t = Tally::new();
    for (name, v) in [("f", ifx), ("g", igx), ("k", ik)] {
        t.check(v <= mu + tol, || format!("∫{name} = {v} > μ(A) = {mu}"));
    }
    verdicts.push(t.verdict(1, "(s)∫_A f dμ ≤ μ(A)", false));

    let mut t = Tally::new();
    let expect = k.min(mu);
    t.check((ik - expect).abs() <= tol, || format!("∫k = {ik}, k ∧ μ(A) = {expect}"));
    verdicts.push(t.verdict(2, "(s)∫_A k dμ = k ∧ μ(A)", false));

    let mut t = Tally::new();
    t.check(ifx <= igx + tol, || format!("∫f = {ifx} > ∫g = {igx}"));
    verdicts.push(t.verdict(3, "f ≤ g ⇒ (s)∫_A f dμ ≤ (s)∫_A g dμ", false));

    let mut tallies = [Tally::new(), Tally::new(), Tally::new(), Tally::new()];
    probe_threshold_items("f", &|a| sf.distribution(spec, a), ifx, mu, &mut tallies);
    probe_threshold_items("g", &|a| sg.distribution(spec, a), igx, mu, &mut tallies);
    let [item4, item5, item6, item7] = tallies;

    verdicts.push(item4.verdict(4, "μ(A ∩ {f ≥ α}) ≥ α ⇒ (s)∫_A f dμ ≥ α", true));
    verdicts.push(item5.verdict(5, "μ(A ∩ {f ≥ α}) ≤ α ⇒ (s)∫_A f dμ ≤ α", true));
    verdicts.push(item6.verdict(6, "(s)∫_A f dμ > α ⇔ ∃γ > α: μ(A ∩ {f ≥ γ}) > α", true));
    verdicts.push(item7.verdict(7, "(s)∫_A f dμ < α ⇔ ∃γ < α: μ(A ∩ {f ≥ γ}) < α", true));

    Ok(PropertyReport {
        integral_f: ifx,
        integral_g: igx,
        integral_k: ik,
        measure_of_base: mu,
        verdicts,
    })
}

// Items 4-7 for one function, given its distribution function and integral.
fn probe_threshold_items(
    name: &str,
    dist: &dyn Fn(f64) -> f64,
    integral: f64,
    mu: f64,
    tallies: &mut [Tally; 4],
) {
    let tol = PROPERTY_TOL;
    let delta = 1e-3 * mu.max(1e-3);
    let mut alphas: Vec<f64> =
        (0..=GAMMA_PROBES).map(|j| mu * j as f64 / GAMMA_PROBES as f64).collect();
    alphas.extend([integral - delta, integral + delta, integral * 0.5, integral * 1.5]);
    alphas.retain(|&x| x >= 0.0);

    let [item4, item5, item6, item7] = tallies;
    for alpha in alphas {
        let fa = dist(alpha);
        if fa >= alpha {
            item4.check(integral >= alpha - tol, || {
                format!("{name}: F({alpha}) = {fa} ≥ α but ∫ = {integral}")
            });
        }
        if fa <= alpha {
            item5.check(integral <= alpha + tol, || {
                format!("{name}: F({alpha}) = {fa} ≤ α but ∫ = {integral}")
            });
        }
        if (alpha - integral).abs() < tol {
            continue;
        }
        // ∫ > α ⇔ ∃γ > α with F(γ) > α
        let upper = if integral > alpha { integral } else { alpha + mu.max(tol) };
        let exists = (1..=GAMMA_PROBES).any(|j| {
            let gamma = alpha + (upper - alpha) * j as f64 / (GAMMA_PROBES + 1) as f64;
            dist(gamma) > alpha
        });
        item6.check((integral > alpha) == exists, || {
            format!("{name}: α = {alpha}, ∫ = {integral}, probe found γ: {exists}")
        });
        // ∫ < α ⇔ ∃γ < α with F(γ) < α
        let lower = if integral < alpha { integral } else { 0.0 };
        let exists = (1..=GAMMA_PROBES).any(|j| {
            let gamma = lower + (alpha - lower) * j as f64 / (GAMMA_PROBES + 1) as f64;
            dist(gamma) < alpha
        });
        item7.check((integral < alpha) == exists, || {
            format!("{name}: α = {alpha}, ∫ = {integral}, probe found γ: {exists}")
        });
    }
}
