//! Error metrics and table emission.
//!
//! `l2_error` is the integral of the squared error with no square root
//! taken, which is the convention the published benchmark tables use.

use std::io::{self, Write};

use crate::expr::{EvalError, Expr};
use crate::fracpoly::FracSeries;
use crate::poly::Polynomial;
use crate::quadrature::{CompositeRule, QuadError};

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("evaluating the exact solution at x = {x}: {source}")]
    Exact { x: f64, source: EvalError },
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("error table needs at least one column")]
    NoColumns,
}

/// Anything that can be sampled as a reference solution.
pub trait Evaluate {
    fn value(&self, x: f64) -> Result<f64, EvalError>;
}

impl Evaluate for Expr {
    fn value(&self, x: f64) -> Result<f64, EvalError> {
        self.eval(x)
    }
}

impl Evaluate for FracSeries {
    fn value(&self, x: f64) -> Result<f64, EvalError> {
        Ok(self.eval(x))
    }
}

impl Evaluate for Polynomial {
    fn value(&self, x: f64) -> Result<f64, EvalError> {
        Ok(self.eval(x))
    }
}

fn sample<E: Evaluate + ?Sized>(exact: &E, x: f64) -> Result<f64, MetricsError> {
    exact.value(x).map_err(|source| MetricsError::Exact { x, source })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grid {
    /// `a, a + h, ..., b` with `h = (b - a) / 10`.
    Table11,
    /// 1001 uniform points.
    Dense1001,
}

impl Grid {
    pub fn points(self, domain: (f64, f64)) -> Vec<f64> {
        let n = match self {
            Grid::Table11 => 10,
            Grid::Dense1001 => 1000,
        };
        let (a, b) = domain;
        // i / n first so that the unit grid is {0, 0.1, ..., 1} to the last bit
        (0..=n).map(|i| if i == n { b } else { a + (b - a) * (i as f64 / n as f64) }).collect()
    }
}

/// `int_a^b (u - u~)^2 dx` over the rule's interval.
pub fn l2_error<E: Evaluate + ?Sized>(exact: &E, approx: &Polynomial, rule: &CompositeRule) -> Result<f64, MetricsError> {
    let mut acc = 0.0;
    for (x, w) in rule.points() {
        let d = sample(exact, x)? - approx.eval(x);
        acc += w * d * d;
    }
    Ok(acc)
}

pub fn linf_error<E: Evaluate + ?Sized>(
    exact: &E,
    approx: &Polynomial,
    grid: Grid,
    domain: (f64, f64),
) -> Result<f64, MetricsError> {
    let mut m: f64 = 0.0;
    for x in grid.points(domain) {
        m = m.max((sample(exact, x)? - approx.eval(x)).abs());
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub sample_points: Vec<f64>,
    pub exact_values: Vec<f64>,
    pub approx_values: Vec<f64>,
    pub abs_errors: Vec<f64>,
    pub l2: f64,
    pub linf_table: f64,
    pub linf_dense: f64,
}

pub fn error_report<E: Evaluate + ?Sized>(
    exact: &E,
    approx: &Polynomial,
    rule: &CompositeRule,
) -> Result<ErrorReport, MetricsError> {
    let domain = rule.interval();
    let sample_points = Grid::Table11.points(domain);
    let exact_values = sample_points.iter().map(|&x| sample(exact, x)).collect::<Result<Vec<_>, _>>()?;
    let approx_values: Vec<f64> = sample_points.iter().map(|&x| approx.eval(x)).collect();
    let abs_errors: Vec<f64> = exact_values.iter().zip(&approx_values).map(|(u, v)| (u - v).abs()).collect();
    let linf_table = abs_errors.iter().copied().fold(0.0, f64::max);
    let linf_dense = linf_error(exact, approx, Grid::Dense1001, domain)?.max(linf_table);
    Ok(ErrorReport {
        l2: l2_error(exact, approx, rule)?,
        sample_points,
        exact_values,
        approx_values,
        abs_errors,
        linf_table,
        linf_dense,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorColumn {
    pub label: String,
    pub errors: Vec<f64>,
    pub linf: f64,
    pub l2: Option<f64>,
    /// Printed next to the values when set, e.g. for a run that did not converge.
    pub mark: Option<String>,
}

/// Absolute errors on the table grid, one column per solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub points: Vec<f64>,
    pub exact: Vec<f64>,
    pub columns: Vec<ErrorColumn>,
}

pub fn error_table<E: Evaluate + ?Sized>(
    solutions: &[(String, &Polynomial)],
    exact: &E,
    rule: &CompositeRule,
) -> Result<ErrorTable, MetricsError> {
    if solutions.is_empty() {
        return Err(MetricsError::NoColumns);
    }
    let points = Grid::Table11.points(rule.interval());
    let exact_values = points.iter().map(|&x| sample(exact, x)).collect::<Result<Vec<_>, _>>()?;
    let mut columns = Vec::with_capacity(solutions.len());
    for (label, approx) in solutions {
        let errors: Vec<f64> = points.iter().zip(&exact_values).map(|(&x, u)| (u - approx.eval(x)).abs()).collect();
        columns.push(ErrorColumn {
            label: label.clone(),
            linf: errors.iter().copied().fold(0.0, f64::max),
            l2: Some(l2_error(exact, approx, rule)?),
            errors,
            mark: None,
        });
    }
    Ok(ErrorTable { points, exact: exact_values, columns })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
    PlotData,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Markdown => "md",
            Format::PlotData => "dat",
        }
    }
}

/// `3.8412e-4` -> `3.84×10^-4`.
pub fn sci3(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.2e}");
    match s.split_once('e') {
        Some((m, e)) => format!("{m}×10^{e}"),
        None => s,
    }
}

/// Full precision, round-trips through `str::parse::<f64>`.
pub fn full(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn emit<W: Write>(table: &ErrorTable, format: Format, out: &mut W) -> io::Result<()> {
    match format {
        Format::Csv => emit_csv(table, out),
        Format::Markdown => emit_markdown(table, out),
        Format::PlotData => emit_plot(table, out),
    }
}

fn emit_csv<W: Write>(t: &ErrorTable, out: &mut W) -> io::Result<()> {
    write!(out, "x,exact")?;
    for c in &t.columns {
        write!(out, ",{}", c.label)?;
    }
    write!(out, "\r\n")?;
    for (i, x) in t.points.iter().enumerate() {
        write!(out, "{},{}", full(*x), full(t.exact[i]))?;
        for c in &t.columns {
            write!(out, ",{}", full(c.errors[i]))?;
        }
        write!(out, "\r\n")?;
    }
    Ok(())
}

fn emit_markdown<W: Write>(t: &ErrorTable, out: &mut W) -> io::Result<()> {
    write!(out, "| x | exact |")?;
    for c in &t.columns {
        match &c.mark {
            Some(m) => write!(out, " {} ({m}) |", c.label)?,
            None => write!(out, " {} |", c.label)?,
        }
    }
    writeln!(out)?;
    write!(out, "|---|---|")?;
    for _ in &t.columns {
        write!(out, "---|")?;
    }
    writeln!(out)?;
    for (i, x) in t.points.iter().enumerate() {
        write!(out, "| {x:.1} | {:.3} |", t.exact[i])?;
        for c in &t.columns {
            write!(out, " {} |", sci3(c.errors[i]))?;
        }
        writeln!(out)?;
    }
    write!(out, "| L∞ | |")?;
    for c in &t.columns {
        write!(out, " {} |", sci3(c.linf))?;
    }
    writeln!(out)?;
    if t.columns.iter().all(|c| c.l2.is_some()) {
        write!(out, "| L2 | |")?;
        for c in &t.columns {
            write!(out, " {} |", sci3(c.l2.unwrap_or(f64::NAN)))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn emit_plot<W: Write>(t: &ErrorTable, out: &mut W) -> io::Result<()> {
    for (k, c) in t.columns.iter().enumerate() {
        if k > 0 {
            writeln!(out)?;
        }
        writeln!(out, "# {}", c.label)?;
        for (x, e) in t.points.iter().zip(&c.errors) {
            writeln!(out, "{} {}", full(*x), full(*e))?;
        }
    }
    Ok(())
}
