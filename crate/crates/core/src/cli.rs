//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verified inequality fails under
//! `--fail-on-violation`, 2 usage or parse error, 3 unsupported endpoint
//! case or failed precondition.

use std::io::Write;

use clap::{Args, Parser, Subcommand};

use crate::bounds::{hadamard_bound, kirmaci_bound, verify_hadamard, BoundsError, EndpointData};
use crate::convexity::{check_sm_convex, ConvexityError, SMParams, DEFAULT_CONVEXITY_GRID};
use crate::expr::FunctionExpr;
use crate::measure::{Interval, MeasureError, MeasureSpec};
use crate::report::{emit_report, BoundOutput, Format};
use crate::reproduce::{reproduce, CaseSelector};
use crate::rootfind::SolverConfig;
use crate::sugeno::{distribution_profile, sugeno_integral, SugenoError, DEFAULT_GRID};

pub const GRID_ENV: &str = "SUGENO_GRID_N";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sugeno", version, about = "Sugeno integrals, (s,m)-convexity and Hadamard-type bounds")]
pub struct Cli {
    /// Output format: json, csv or text
    #[arg(long, global = true, default_value = "text")]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sugeno integral of f over an interval
    Integrate(IntegrateArgs),
    /// Distribution function F(α) = μ({f ≥ α}) at the given α values
    Profile(ProfileArgs),
    /// Hadamard-type bound for the Sugeno integral of f·g
    Bound(BoundArgs),
    /// Compare the Sugeno integral of f·g with its Hadamard-type bound
    Verify(VerifyArgs),
    /// Check (s,m)-convexity of f on a lattice
    Convexity(ConvexityArgs),
    /// Recompute the worked examples and compare with the published values
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct FunctionArg {
    /// Function of x, e.g. "x^5/4"
    #[arg(long = "f", value_parser = parse_expr)]
    pub f: FunctionExpr,

    /// Interval as `a,b` with 0 ≤ a < b
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    pub interval: Interval,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub func: FunctionArg,

    /// `lebesgue` or `distortion:<φ(x)>`
    #[arg(long, default_value = "lebesgue")]
    pub measure: String,

    /// Grid points over the interval (default 100001, or $SUGENO_GRID_N)
    #[arg(long)]
    pub grid: Option<usize>,

    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub func: FunctionArg,

    #[arg(long, default_value = "lebesgue")]
    pub measure: String,

    /// Comma-separated, strictly increasing α values
    #[arg(long, value_delimiter = ',', required = true)]
    pub alphas: Vec<f64>,

    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long = "f", value_parser = parse_expr)]
    pub f: FunctionExpr,

    #[arg(long = "g", value_parser = parse_expr)]
    pub g: FunctionExpr,

    #[arg(long, value_parser = parse_interval)]
    pub interval: Interval,

    #[arg(long)]
    pub s: f64,

    #[arg(long)]
    pub m: f64,

    /// Clamp each level-set length to [0, b - a] instead of solving the
    /// β equation as written
    #[arg(long)]
    pub measure_consistent: bool,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub pair: PairArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub pair: PairArgs,

    #[arg(long)]
    pub grid: Option<usize>,

    /// Exit with status 1 when the integral exceeds the bound
    #[arg(long)]
    pub fail_on_violation: bool,
}

#[derive(Debug, Args)]
pub struct ConvexityArgs {
    #[command(flatten)]
    pub func: FunctionArg,

    #[arg(long)]
    pub s: f64,

    #[arg(long)]
    pub m: f64,

    /// Points per lattice axis
    #[arg(long, default_value_t = DEFAULT_CONVEXITY_GRID)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// 3.2, 3.8, 3.9 or all
    #[arg(long, default_value = "all")]
    pub case: CaseSelector,

    #[arg(long)]
    pub grid: Option<usize>,
}

fn parse_expr(s: &str) -> Result<FunctionExpr, String> {
    FunctionExpr::parse(s).map_err(|e| format!("{e}\n  {s}\n  {:>w$}", "^", w = e.position + 1))
}

fn parse_interval(s: &str) -> Result<Interval, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `a,b`, got '{s}'"))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("'{}' is not a decimal number", t.trim()))
    };
    Interval::new(num(a)?, num(b)?).map_err(|e| e.to_string())
}

fn parse_measure(text: &str, base: Interval) -> Result<MeasureSpec, CliError> {
    if text == "lebesgue" {
        return Ok(MeasureSpec::lebesgue(base));
    }
    let Some(phi) = text.strip_prefix("distortion:") else {
        return Err(CliError::Usage(format!(
            "--measure: expected `lebesgue` or `distortion:<expr>`, got '{text}'"
        )));
    };
    let phi = FunctionExpr::parse(phi).map_err(|e| CliError::Usage(format!("--measure: {e}")))?;
    MeasureSpec::distortion(phi, base).map_err(|e| CliError::Usage(format!("--measure: {e}")))
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Unsupported(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Unsupported(_) => EXIT_UNSUPPORTED,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Unsupported(m) => m,
        }
    }
}

impl From<SugenoError> for CliError {
    fn from(e: SugenoError) -> Self {
        match e {
            SugenoError::GridTooSmall { .. } | SugenoError::InvalidAlphas(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Unsupported(e.to_string()),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::Convexity(ConvexityError::InvalidParams { .. }) => {
                CliError::Usage(e.to_string())
            }
            BoundsError::Sugeno(inner) => inner.into(),
            _ => CliError::Unsupported(e.to_string()),
        }
    }
}

impl From<ConvexityError> for CliError {
    fn from(e: ConvexityError) -> Self {
        match e {
            ConvexityError::InvalidParams { .. } | ConvexityError::GridTooSmall { .. } => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Unsupported(e.to_string()),
        }
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        CliError::Unsupported(e.to_string())
    }
}

fn grid_default(flag: Option<usize>, env_grid: Option<&str>) -> Result<usize, CliError> {
    if let Some(g) = flag {
        return Ok(g);
    }
    match env_grid {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{GRID_ENV}: '{v}' is not a positive integer"))),
        None => Ok(DEFAULT_GRID),
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the exit
/// code. Reports go to `out`, diagnostics to `err`.
pub fn run_with(
    argv: &[String],
    env_grid: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match dispatch(&cli, env_grid) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, env_grid: Option<&str>) -> Result<(String, i32), CliError> {
    let format = cli.format;
    match &cli.command {
        Command::Integrate(args) => {
            let cfg = SolverConfig::new(args.tol, 200).map_err(|e| CliError::Usage(e.to_string()))?;
            let grid = grid_default(args.grid, env_grid)?;
            let spec = parse_measure(&args.measure, args.func.interval)?;
            let result = sugeno_integral(&args.func.f, &spec, &cfg, grid)?;
            Ok((emit_report(&result, format), EXIT_OK))
        }
        Command::Profile(args) => {
            let grid = grid_default(args.grid, env_grid)?;
            let spec = parse_measure(&args.measure, args.func.interval)?;
            let profile = distribution_profile(&args.func.f, &spec, &args.alphas, grid)?;
            Ok((emit_report(&profile, format), EXIT_OK))
        }
        Command::Bound(args) => {
            let pair = &args.pair;
            let p = SMParams::new(pair.s, pair.m)?;
            let cfg = SolverConfig::default();
            let bound =
                hadamard_bound(&pair.f, &pair.g, &pair.interval, &p, &cfg, !pair.measure_consistent)?;
            let e = EndpointData::from_functions(&pair.f, &pair.g, &pair.interval)?;
            let output = BoundOutput::new(&bound, kirmaci_bound(&e, p.s()));
            Ok((emit_report(&output, format), EXIT_OK))
        }
        Command::Verify(args) => {
            let pair = &args.pair;
            let p = SMParams::new(pair.s, pair.m)?;
            let grid = grid_default(args.grid, env_grid)?;
            let report = verify_hadamard(
                &pair.f,
                &pair.g,
                &pair.interval,
                &p,
                &SolverConfig::default(),
                grid,
                !pair.measure_consistent,
            )?;
            let code = if args.fail_on_violation && !report.holds { EXIT_VIOLATION } else { EXIT_OK };
            Ok((emit_report(&report, format), code))
        }
        Command::Convexity(args) => {
            let p = SMParams::new(args.s, args.m)?;
            let verdict = check_sm_convex(&args.func.f, &args.func.interval, &p, args.grid)?;
            Ok((emit_report(&verdict, format), EXIT_OK))
        }
        Command::Reproduce(args) => {
            let grid = grid_default(args.grid, env_grid)?;
            let rows = reproduce(args.case, grid)?;
            Ok((emit_report(rows.as_slice(), format), EXIT_OK))
        }
    }
}

/// Entry point for the binary: real argv, stdout, stderr and environment.
pub fn run(argv: &[String]) -> i32 {
    let env_grid = std::env::var(GRID_ENV).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, env_grid.as_deref(), &mut stdout.lock(), &mut stderr.lock())
}

pub fn main_exit() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    run(&argv)
}
