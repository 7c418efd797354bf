//! Sugeno integrals of real functions on intervals, (s,m)-convexity checks
//! in the second sense, and Hadamard-type upper bounds for Sugeno integrals
//! of products of (s,m)-convex functions.
//!
//! Functions are given as [`expr::FunctionExpr`] parsed from text. The
//! [`sugeno`] module integrates them against a [`measure::MeasureSpec`];
//! [`bounds`] computes the endpoint-based bounds and checks them against the
//! computed integral of the product.

pub mod bounds;
pub mod cli;
pub mod convexity;
pub mod expr;
pub mod measure;
pub mod report;
pub mod reproduce;
pub mod rootfind;
pub mod sugeno;

pub use expr::{EvalError, FunctionExpr, ParseError, RealFn};
pub use measure::{Interval, IntervalUnion, MeasureSpec};
pub use rootfind::SolverConfig;
pub use sugeno::{sugeno_integral, sugeno_integral_oracle, IntegralResult};
