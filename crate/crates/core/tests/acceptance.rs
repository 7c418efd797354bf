//! Acceptance suite. Prints one PASS/FAIL line per criterion and a total
//! runtime line, and exits non-zero if anything fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sugeno_hadamard::bounds::{
    classify_case, convex_decreasing_beta, convex_increasing_beta, degenerate_bound,
    kirmaci_bound, theorem1_beta, theorem2_beta, verify_hadamard, CaseTag, EndpointData,
};
use sugeno_hadamard::cli::run_with;
use sugeno_hadamard::convexity::{check_sm_convex, lemma_gap, SMParams, DEFAULT_CONVEXITY_GRID};
use sugeno_hadamard::measure::verify_fuzzy_measure_axioms;
use sugeno_hadamard::reproduce::{reproduce, CaseSelector, Verdict};
use sugeno_hadamard::sugeno::{check_proposition_properties, level_set_measure, DEFAULT_N_ALPHA};
use sugeno_hadamard::{
    sugeno_integral, sugeno_integral_oracle, FunctionExpr, Interval, MeasureSpec, SolverConfig,
};

const GRID: usize = 100_001;
const GOLDEN_TOL: f64 = 5e-4;
const TOTAL_BUDGET: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;

struct Criterion {
    id: &'static str,
    title: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn expr(text: &str) -> FunctionExpr {
    FunctionExpr::parse(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

fn integral(text: &str, a: f64, b: f64) -> f64 {
    sugeno_integral(&expr(text), &MeasureSpec::lebesgue(iv(a, b)), &SolverConfig::default(), GRID)
        .unwrap()
        .value
}

fn cli_json(args: &[&str]) -> Result<serde_json::Value, String> {
    let argv: Vec<String> = std::iter::once("sugeno").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(&argv, None, &mut out, &mut err);
    if code != 0 {
        return Err(format!("exit {code}: {}", String::from_utf8_lossy(&err)));
    }
    serde_json::from_slice(&out).map_err(|e| e.to_string())
}

fn c1_example_3_2() -> Outcome {
    let v = cli_json(&["--format", "json", "integrate", "--f", "x^5/4", "--interval", "0,1"])?;
    let value = v["value"].as_f64().ok_or("no value field")?;
    ensure((value - 0.1269).abs() <= GOLDEN_TOL, || format!("integral {value}"))?;

    let e = EndpointData::new(0.0, 0.5, 0.0, 0.5).unwrap();
    let kirmaci = kirmaci_bound(&e, 1.0 / 3.0);
    ensure((kirmaci - 0.1071).abs() <= GOLDEN_TOL, || format!("kirmaci {kirmaci}"))?;

    let p = SMParams::new(1.0 / 3.0, 1.0).unwrap();
    let report = verify_hadamard(
        &expr("x^2/2"),
        &expr("x^3/2"),
        &iv(0.0, 1.0),
        &p,
        &SolverConfig::default(),
        GRID,
        true,
    )
    .map_err(|e| e.to_string())?;
    ensure(report.integral.value > report.kirmaci, || {
        format!("integral {} not above kirmaci {}", report.integral.value, report.kirmaci)
    })?;
    Ok(format!("integral {value:.6}, kirmaci {kirmaci:.6}, integral > kirmaci"))
}

fn c2_example_3_8() -> Outcome {
    let value = integral("x^2", 1.0, 4.0);
    ensure((value - 2.4384).abs() <= GOLDEN_TOL, || format!("integral {value}"))?;

    let e = EndpointData::new(1.0, 8.0, 1.0, 2.0).unwrap();
    let r = theorem1_beta(&e, &iv(1.0, 4.0), &SMParams::convex(), &SolverConfig::default(), true)
        .map_err(|e| e.to_string())?;
    ensure(r.residual <= 1e-9, || format!("residual {}", r.residual))?;
    // (9/7)(8 - β)(2 - β) = β  ⇔  9β² - 97β + 144 = 0, smaller root
    let (qa, qb, qc) = (9.0_f64, -97.0_f64, 144.0_f64);
    let oracle = (-qb - (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa);
    ensure((r.beta - oracle).abs() <= 1e-6, || format!("beta {} vs oracle {oracle}", r.beta))?;
    ensure((oracle - 16.0 / 9.0).abs() <= 1e-12, || format!("oracle {oracle}"))?;

    let rows = reproduce(CaseSelector::Ex38, GRID).map_err(|e| e.to_string())?;
    let beta_row = rows.iter().find(|r| r.quantity == "beta").ok_or("no beta row")?;
    ensure(beta_row.verdict == Verdict::PaperInternalInconsistency, || {
        format!("verdict {:?}", beta_row.verdict)
    })?;
    ensure((beta_row.computed_value - 16.0 / 9.0).abs() <= 1e-6, || {
        format!("computed {}", beta_row.computed_value)
    })?;
    let residual = beta_row.paper_value_residual.ok_or("no residual")?;
    let envelope = beta_row.envelope_fixed_point.ok_or("no envelope fixed point")?;
    ensure((envelope - 2.5063).abs() <= GOLDEN_TOL, || format!("envelope fixed point {envelope}"))?;
    Ok(format!(
        "integral {value:.6}, beta {:.9}, residual at 2.5302 {residual:.4}, envelope fixed point {envelope:.5}",
        r.beta
    ))
}

fn c3_example_3_9() -> Outcome {
    let value = integral("1/x^4", 1.0, 2.0);
    ensure((value - 0.3247).abs() <= GOLDEN_TOL, || format!("integral {value}"))?;

    let e = EndpointData::new(1.0, 0.25, 1.0, 0.25).unwrap();
    let r = theorem2_beta(&e, &iv(1.0, 2.0), &SMParams::convex(), &SolverConfig::default(), true)
        .map_err(|e| e.to_string())?;
    // (1 - β)²/0.5625 = β  ⇔  β² - 2.5625β + 1 = 0, admissible root ≤ 1
    let oracle = (2.5625 - (2.5625_f64 * 2.5625 - 4.0).sqrt()) / 2.0;
    ensure((r.beta - 0.4802).abs() <= GOLDEN_TOL, || format!("beta {}", r.beta))?;
    ensure((r.beta - oracle).abs() <= GOLDEN_TOL, || format!("beta {} vs oracle {oracle}", r.beta))?;

    let f = expr("1/x^2");
    let report = verify_hadamard(&f, &f, &iv(1.0, 2.0), &SMParams::convex(), &SolverConfig::default(), GRID, true)
        .map_err(|e| e.to_string())?;
    ensure(report.holds, || format!("holds=false, margin {}", report.margin))?;
    Ok(format!("integral {value:.6}, beta {:.6}, margin {:.4}", r.beta, report.margin))
}

// Random monotone or unimodal non-negative integrand on [a, b] ⊂ [0, 10].
fn random_integrand(rng: &mut ChaCha8Rng) -> (String, f64, f64) {
    let a = rng.gen_range(0.0..9.0);
    let b = rng.gen_range(a + 0.5..=10.0_f64.min(a + 10.0));
    let c = rng.gen_range(0.1..5.0);
    let text = match rng.gen_range(0..6) {
        0 => format!("{c} * x^{}", rng.gen_range(0.3..3.0)),
        1 => format!("{c} * exp(-{} * x)", rng.gen_range(0.05..2.0)),
        2 => format!("{c} * ln(1 + x) + {}", rng.gen_range(0.0..1.0)),
        3 => {
            let x0 = rng.gen_range(a..b);
            let w = rng.gen_range(0.2..3.0);
            format!("{c} * exp(-((x - {x0}) / {w})^2)")
        }
        4 => {
            let x0 = rng.gen_range(a..b);
            format!("{c} / (1 + (x - {x0})^2)")
        }
        _ => format!("{c} * sqrt(x) / (1 + x)"),
    };
    (text, a, b)
}

fn c4_engine_cross_validation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = SolverConfig::default();
    let mut worst = 0.0_f64;
    for case in 0..200 {
        let (text, a, b) = random_integrand(&mut rng);
        let f = expr(&text);
        let spec = MeasureSpec::lebesgue(iv(a, b));
        let fixed = sugeno_integral(&f, &spec, &cfg, GRID).map_err(|e| format!("{text}: {e}"))?;
        let scan = sugeno_integral_oracle(&f, &spec, DEFAULT_N_ALPHA, GRID).map_err(|e| format!("{text}: {e}"))?;
        let diff = (fixed.value - scan.value).abs();
        let tol = 1e-3_f64.max(2.0 * (b - a) / GRID as f64);
        ensure(diff <= tol, || {
            format!("case {case}: {text} on [{a}, {b}]: {} vs {} (diff {diff})", fixed.value, scan.value)
        })?;
        worst = worst.max(diff);
    }
    Ok(format!("200 integrands, worst |difference| {worst:.3e}"))
}

// μ({f ≥ α}) ≥ α just below the integral and < α just above it.
fn remark_certificate(f: &FunctionExpr, spec: &MeasureSpec, value: f64, grid: usize) -> Result<(), String> {
    const DELTA: f64 = 1e-9;
    if value > DELTA {
        let below = value - DELTA;
        let m = level_set_measure(f, spec, below, grid).map_err(|e| e.to_string())?;
        ensure(m >= below, || format!("F({below}) = {m} < α"))?;
    }
    let above = value + DELTA;
    let m = level_set_measure(f, spec, above, grid).map_err(|e| e.to_string())?;
    ensure(m < above, || format!("F({above}) = {m} ≥ α"))
}

fn c5_property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = SolverConfig::default();
    let grid = 20_001;
    for case in 0..100 {
        let (ftext, a, b) = random_integrand(&mut rng);
        let extra = match rng.gen_range(0..3) {
            0 => format!("{}", rng.gen_range(0.0..2.0)),
            1 => format!("{} * x", rng.gen_range(0.0..1.0)),
            _ => format!("{} * (x - {a})^2", rng.gen_range(0.0..0.5)),
        };
        let gtext = format!("({ftext}) + ({extra})");
        let k = rng.gen_range(0.0..12.0);
        let (f, g) = (expr(&ftext), expr(&gtext));
        let spec = MeasureSpec::lebesgue(iv(a, b));
        let report = check_proposition_properties(&f, &g, k, &spec, &cfg, grid)
            .map_err(|e| format!("case {case}: {e}"))?;
        for v in report.verdicts.iter().filter(|v| v.item <= 3) {
            ensure(v.holds, || format!("case {case} item {}: {:?}", v.item, v.detail))?;
        }
        remark_certificate(&f, &spec, report.integral_f, grid).map_err(|e| format!("case {case} f: {e}"))?;
        remark_certificate(&g, &spec, report.integral_g, grid).map_err(|e| format!("case {case} g: {e}"))?;
    }

    let spec = MeasureSpec::lebesgue(iv(0.0, 3.0));
    for j in 0..20 {
        let k = j as f64 * 0.25;
        let value = sugeno_integral(&FunctionExpr::constant(k), &spec, &cfg, GRID)
            .map_err(|e| e.to_string())?
            .value;
        ensure(value == k.min(3.0), || format!("constant {k}: {value}"))?;
    }
    Ok("100 triples (items 1-3, certificates), 20 constants exact".into())
}

fn c6_lemma_sweep() -> Outcome {
    let mut worst = f64::INFINITY;
    for i in 0..=1000 {
        let x = i as f64 / 1000.0;
        for j in 1..=100 {
            let s = j as f64 / 100.0;
            let gap = lemma_gap(x, s).map_err(|e| e.to_string())?;
            ensure(gap >= -1e-12, || format!("gap({x}, {s}) = {gap}"))?;
            worst = worst.min(gap);
        }
    }
    Ok(format!("1001×100 grid, minimum gap {worst:.3e}"))
}

fn c7_reduction_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = SolverConfig::default();
    let one = SMParams::convex();
    let mut worst = 0.0_f64;
    let interval = |rng: &mut ChaCha8Rng| {
        let a = rng.gen_range(0.0..5.0);
        iv(a, a + rng.gen_range(0.2..3.0))
    };
    for case in 0..100 {
        let increasing = case < 50;
        let base = interval(&mut rng);
        let (lo_f, lo_g) = (rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
        let (hi_f, hi_g) = (lo_f + rng.gen_range(0.1..5.0), lo_g + rng.gen_range(0.1..5.0));
        let e = if increasing {
            EndpointData::new(lo_f, hi_f, lo_g, hi_g)
        } else {
            EndpointData::new(hi_f, lo_f, hi_g, lo_g)
        }
        .unwrap();
        let (general, special) = if increasing {
            (theorem1_beta(&e, &base, &one, &cfg, true), convex_increasing_beta(&e, &base))
        } else {
            (theorem2_beta(&e, &base, &one, &cfg, true), convex_decreasing_beta(&e, &base))
        };
        let general = general.map_err(|e| e.to_string())?.beta;
        let special = special.map_err(|e| e.to_string())?;
        let diff = (general - special).abs();
        ensure(diff <= 1e-12, || format!("case {case} {e:?}: {general} vs {special}"))?;
        worst = worst.max(diff);
    }
    for case in 0..20 {
        let base = interval(&mut rng);
        let s = rng.gen_range(0.05..=1.0);
        let m = rng.gen_range(0.05..=1.0);
        let p = SMParams::new(s, m).unwrap();
        let (fa, ga) = (rng.gen_range(0.0..4.0), rng.gen_range(0.0..4.0));
        let e = EndpointData::new(fa, m * fa, ga, m * ga).unwrap();
        ensure(classify_case(&e, &p) == CaseTag::Degenerate, || format!("case {case}: not degenerate"))?;
        let r = degenerate_bound(&e, &base, &p).map_err(|e| e.to_string())?;
        let expect = (fa * ga * (m * m) * 2f64.powf(2.0 - 2.0 * s)).min(base.length());
        ensure(r.bound == expect, || format!("degenerate case {case}: {} vs {expect}", r.bound))?;
    }
    Ok(format!("100 solver/closed-form pairs (worst {worst:.2e}), 20 degenerate exact"))
}

fn c8_measure_axioms() -> Outcome {
    let base = iv(0.0, 2.0);
    let specs = [
        ("lebesgue", MeasureSpec::lebesgue(base)),
        ("t^2", MeasureSpec::distortion(expr("x^2"), base).unwrap()),
        ("sqrt(t)", MeasureSpec::distortion(expr("sqrt(x)"), base).unwrap()),
    ];
    for (name, spec) in &specs {
        let report = verify_fuzzy_measure_axioms(spec, &base, 1000).map_err(|e| e.to_string())?;
        ensure(report.all_hold(), || format!("{name}: {report:?}"))?;
    }
    Ok("lebesgue, t^2, sqrt(t): all axioms hold".into())
}

fn c9_convexity_checker() -> Outcome {
    let third = SMParams::new(1.0 / 3.0, 1.0).unwrap();
    let one = SMParams::convex();
    let claims = [
        ("x^2/2", 0.0, 1.0, third),
        ("x^3/2", 0.0, 1.0, third),
        ("x^(3/2)", 1.0, 4.0, one),
        ("x^(1/2)", 1.0, 4.0, one),
        ("1/x^2", 1.0, 2.0, one),
    ];
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for (text, a, b, p) in claims {
        let v = check_sm_convex(&expr(text), &iv(a, b), &p, DEFAULT_CONVEXITY_GRID).map_err(|e| e.to_string())?;
        if v.holds_on_grid {
            lines.push(format!("{text} in K(s={:.4},m={}) on [{a},{b}]", p.s(), p.m()));
        } else {
            failures.push(format!("{text} on [{a},{b}]: {} violations, witness {:?}", v.violations, v.witness));
        }
    }
    let tent = check_sm_convex(&expr("1 - abs(2*x - 1)"), &iv(0.0, 1.0), &one, DEFAULT_CONVEXITY_GRID)
        .map_err(|e| e.to_string())?;
    match tent.witness {
        Some(w) if !tent.holds_on_grid => lines.push(format!("tent witness x={} y={} λ={} gap={}", w.x, w.y, w.lambda, w.gap)),
        _ => failures.push("tent: no violation witness".into()),
    }
    if failures.is_empty() {
        Ok(lines.join("; "))
    } else {
        Err(failures.join("; "))
    }
}

fn main() {
    let criteria = [
        Criterion { id: "1", title: "example 3.2 reproduction", budget: Duration::from_secs(1), run: c1_example_3_2 },
        Criterion { id: "2", title: "example 3.8 reproduction", budget: Duration::from_secs(1), run: c2_example_3_8 },
        Criterion { id: "3", title: "example 3.9 reproduction", budget: Duration::from_secs(1), run: c3_example_3_9 },
        Criterion { id: "4", title: "engine cross-validation", budget: Duration::from_secs(30), run: c4_engine_cross_validation },
        Criterion { id: "5", title: "property suite", budget: Duration::from_secs(20), run: c5_property_suite },
        Criterion { id: "6", title: "lemma sweep", budget: Duration::from_secs(1), run: c6_lemma_sweep },
        Criterion { id: "7", title: "reduction identities", budget: Duration::from_secs(1), run: c7_reduction_identities },
        Criterion { id: "8", title: "fuzzy-measure axioms", budget: Duration::from_secs(5), run: c8_measure_axioms },
        Criterion { id: "9", title: "convexity checker", budget: Duration::from_secs(10), run: c9_convexity_checker },
    ];
    std::env::set_var("SUGENO_QUIET", "1");
    let start = Instant::now();
    let mut failed = 0;
    for c in &criteria {
        let t0 = Instant::now();
        let outcome = (c.run)();
        let elapsed = t0.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; exceeded budget {:?}", c.budget)),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<28} {} ({:.3}s) {detail}",
            c.id,
            c.title,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    let total = start.elapsed();
    let total_ok = total <= TOTAL_BUDGET;
    if !total_ok {
        failed += 1;
    }
    println!(
        "total runtime {:.3}s (budget {}s) {}",
        total.as_secs_f64(),
        TOTAL_BUDGET.as_secs(),
        if total_ok { "PASS" } else { "FAIL" }
    );
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
