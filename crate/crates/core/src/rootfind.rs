//! Bracketed scalar solvers.
//!
//! Two bisection variants: a classic sign-change bisection, and a
//! predicate bisection that locates `sup{α : G(α) ≥ α}` for a
//! non-increasing `G`. The second is what turns a distribution function
//! into a Sugeno integral, and it stays correct across jumps of `G`.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("invalid bracket: {0}")]
    Bracket(String),
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("function evaluation failed at {at}: {message}")]
    Eval { at: f64, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-12,
            max_iter: 200,
        }
    }
}

impl SolverConfig {
    pub fn new(tol: f64, max_iter: usize) -> Result<Self, RootError> {
        let cfg = SolverConfig { tol, max_iter };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), RootError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(RootError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(RootError::Config("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointResult {
    pub value: f64,
    /// `|G(value) - value|`
    pub residual: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
    /// Number of interior spot checks where `G` was seen increasing.
    pub monotonicity_warnings: usize,
}

/// Returns `sup{α ∈ [lo, hi] : G(α) ≥ α}` for a non-increasing `G`.
///
/// Bisection keeps `lo` satisfying `G(lo) ≥ lo` and `hi` violating it. If
/// `hi` already satisfies the predicate it is returned as is.
pub fn solve_sup_threshold<G>(
    g: G,
    lo: f64,
    hi: f64,
    cfg: &SolverConfig,
) -> Result<FixedPointResult, RootError>
where
    G: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !(lo <= hi) {
        return Err(RootError::Bracket(format!("lo {lo} > hi {hi}")));
    }
    let g_lo = g(lo);
    if !(g_lo >= lo) {
        return Err(RootError::Bracket(format!("G(lo) = {g_lo} < lo = {lo}")));
    }

    let mut warnings = 0;
    let mut prev = g_lo;
    for k in 1..=8 {
        let t = lo + (hi - lo) * k as f64 / 9.0;
        let v = g(t);
        if v > prev + 1e-12 * (1.0 + prev.abs()) {
            warnings += 1;
        }
        prev = v;
    }
    if warnings > 0 {
        log_warning(&format!(
            "solve_sup_threshold: G increased at {warnings} of 8 spot checks on [{lo}, {hi}]"
        ));
    }

    let g_hi = g(hi);
    if g_hi >= hi {
        return Ok(FixedPointResult {
            value: hi,
            residual: (g_hi - hi).abs(),
            iterations: 0,
            bracket: (hi, hi),
            monotonicity_warnings: warnings,
        });
    }

    let (mut a, mut b) = (lo, hi);
    let mut iterations = 0;
    while b - a > cfg.tol && iterations < cfg.max_iter {
        let mid = a + 0.5 * (b - a);
        if mid <= a || mid >= b {
            break;
        }
        iterations += 1;
        let gm = g(mid);
        if gm == mid {
            // exact fixed point
            return Ok(FixedPointResult {
                value: mid,
                residual: 0.0,
                iterations,
                bracket: (a, b),
                monotonicity_warnings: warnings,
            });
        }
        if gm > mid {
            a = mid;
        } else {
            b = mid;
        }
    }
    let value = a + 0.5 * (b - a);
    Ok(FixedPointResult {
        value,
        residual: (g(value) - value).abs(),
        iterations,
        bracket: (a, b),
        monotonicity_warnings: warnings,
    })
}

/// Sign-change bisection on `[lo, hi]`; returns the midpoint of the final
/// bracket. Exact zeros at the ends or midpoints are returned directly.
pub fn solve_sign_change<G>(g: G, lo: f64, hi: f64, cfg: &SolverConfig) -> Result<f64, RootError>
where
    G: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !(lo <= hi) {
        return Err(RootError::Bracket(format!("lo {lo} > hi {hi}")));
    }
    let g_lo = g(lo);
    if g_lo == 0.0 {
        return Ok(lo);
    }
    let g_hi = g(hi);
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo.is_nan() || g_hi.is_nan() || g_lo.signum() == g_hi.signum() {
        return Err(RootError::Bracket(format!(
            "no sign change: g({lo}) = {g_lo}, g({hi}) = {g_hi}"
        )));
    }
    let lo_negative = g_lo < 0.0;
    let (mut a, mut b) = (lo, hi);
    let mut iterations = 0;
    while b - a > cfg.tol && iterations < cfg.max_iter {
        let mid = a + 0.5 * (b - a);
        if mid <= a || mid >= b {
            break;
        }
        iterations += 1;
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm < 0.0) == lo_negative {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(a + 0.5 * (b - a))
}

fn log_warning(msg: &str) {
    if std::env::var_os("SUGENO_QUIET").is_none() {
        eprintln!("warning: {msg}");
    }
}
