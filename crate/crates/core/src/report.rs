//! JSON / CSV / text rendering of results.
//!
//! JSON is a single object (or array) on one line with full `f64`
//! precision. CSV has a header row and a constant column count. Text is
//! aligned columns with numbers at 6 significant digits.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::bounds::{BetaResult, VerificationReport};
use crate::convexity::ConvexityVerdict;
use crate::reproduce::ReproduceRow;
use crate::sugeno::{DistributionProfile, IntegralResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format '{other}' (expected json, csv or text)")),
        }
    }
}

/// One cell of a tabular rendering.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Bool(bool),
    Str(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Str(s) => csv_escape(s),
            Cell::Empty => String::new(),
        }
    }

    fn text(&self) -> String {
        match self {
            Cell::Num(v) => sig6(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Str(s) => s.clone(),
            Cell::Empty => "-".into(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Str(v)
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// A result that can be emitted in all three formats.
pub trait Report {
    type Json: Serialize;

    fn json_value(&self) -> Self::Json;
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<Cell>>;
}

pub fn emit_report<R: Report + ?Sized>(report: &R, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string(&report.json_value()).expect("serializable report");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut out = report.header().join(",");
            out.push('\n');
            for row in report.rows() {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        Format::Text => render_table(&report.header(), &report.rows()),
    }
}

fn render_table(header: &[&str], rows: &[Vec<Cell>]) -> String {
    let body: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(Cell::text).collect()).collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &body {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}", w = *w))
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(&mut out, &header.iter().map(|h| h.to_string()).collect::<Vec<_>>());
    for row in &body {
        line(&mut out, row);
    }
    out
}

/// `%.6g`-style formatting.
pub fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    // rounding can bump the exponent, e.g. 999999.7
    let rounded: f64 = format!("{v:.5e}").parse().unwrap_or(v);
    let exp = if rounded.abs() >= 10f64.powi(exp + 1) { exp + 1 } else { exp };
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{rounded:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{rounded:.5e}");
        let (mantissa, e) = s.split_once('e').unwrap_or((&s, "0"));
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        let e: i32 = e.parse().unwrap_or(0);
        format!("{mantissa}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
    }
}

impl Report for IntegralResult {
    type Json = IntegralResult;

    fn json_value(&self) -> IntegralResult {
        self.clone()
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["value", "method", "residual", "alpha_lo", "alpha_hi", "grid_points", "excluded_points"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        vec![vec![
            self.value.into(),
            format!("{:?}", self.method).into(),
            self.residual.into(),
            self.alpha_bracket.0.into(),
            self.alpha_bracket.1.into(),
            self.grid_points.into(),
            self.excluded_points.into(),
        ]]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundOutput {
    pub beta: f64,
    pub bound: f64,
    pub kirmaci: f64,
    pub case: crate::bounds::CaseTag,
    pub literal_mode: bool,
    pub residual: f64,
}

impl BoundOutput {
    pub fn new(b: &BetaResult, kirmaci: f64) -> Self {
        BoundOutput {
            beta: b.beta,
            bound: b.bound,
            kirmaci,
            case: b.case,
            literal_mode: b.literal_mode,
            residual: b.residual,
        }
    }
}

impl Report for BoundOutput {
    type Json = BoundOutput;

    fn json_value(&self) -> BoundOutput {
        self.clone()
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["beta", "bound", "kirmaci", "case", "literal_mode", "residual"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        vec![vec![
            self.beta.into(),
            self.bound.into(),
            self.kirmaci.into(),
            self.case.to_string().into(),
            self.literal_mode.into(),
            self.residual.into(),
        ]]
    }
}

impl Report for VerificationReport {
    type Json = crate::bounds::VerificationRecord;

    fn json_value(&self) -> Self::Json {
        self.record()
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["integral", "beta", "bound", "kirmaci", "case", "holds", "margin", "literal_mode", "residual"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        let r = self.record();
        vec![vec![
            r.integral.into(),
            r.beta.into(),
            r.bound.into(),
            r.kirmaci.into(),
            r.case.to_string().into(),
            r.holds.into(),
            r.margin.into(),
            r.literal_mode.into(),
            r.residual.into(),
        ]]
    }
}

impl Report for ConvexityVerdict {
    type Json = ConvexityVerdict;

    fn json_value(&self) -> ConvexityVerdict {
        self.clone()
    }

    fn header(&self) -> Vec<&'static str> {
        vec![
            "holds_on_grid",
            "grid",
            "checked",
            "skipped",
            "violations",
            "witness_x",
            "witness_y",
            "witness_lambda",
            "witness_gap",
        ]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        let w = self.witness;
        vec![vec![
            self.holds_on_grid.into(),
            self.grid.into(),
            self.checked.into(),
            self.skipped.into(),
            self.violations.into(),
            w.map(|w| w.x).into(),
            w.map(|w| w.y).into(),
            w.map(|w| w.lambda).into(),
            w.map(|w| w.gap).into(),
        ]]
    }
}

impl Report for DistributionProfile {
    type Json = DistributionProfile;

    fn json_value(&self) -> DistributionProfile {
        self.clone()
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["alpha", "F"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        self.samples.iter().map(|&(a, f)| vec![a.into(), f.into()]).collect()
    }
}

impl Report for [ReproduceRow] {
    type Json = Vec<ReproduceRow>;

    fn json_value(&self) -> Vec<ReproduceRow> {
        self.to_vec()
    }

    fn header(&self) -> Vec<&'static str> {
        vec![
            "case",
            "quantity",
            "paper_value",
            "computed_value",
            "abs_diff",
            "tolerance",
            "verdict",
            "paper_value_residual",
            "envelope_fixed_point",
        ]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        self.iter()
            .map(|r| {
                vec![
                    r.case_id.as_str().into(),
                    r.quantity.as_str().into(),
                    r.paper_value.into(),
                    r.computed_value.into(),
                    r.abs_diff.into(),
                    r.tolerance.into(),
                    r.verdict.to_string().into(),
                    r.paper_value_residual.into(),
                    r.envelope_fixed_point.into(),
                ]
            })
            .collect()
    }
}
