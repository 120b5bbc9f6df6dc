//! Problem definitions in TOML.
//!
//! ```toml
//! name = "problem1"
//! rhs = "gamma(2.9)/gamma(1.4)*x^0.4 - (x^1.9 - 1)^3"
//! exact = "x^1.9 - 1"
//!
//! [domain]
//! a = 0
//! b = 1
//!
//! [[term]]
//! coefficient = "1"
//! order = 1.5
//!
//! [[term]]
//! coefficient = "-1"
//! order = 0
//! exponent = 3
//!
//! [[bc]]
//! location = "left"
//! order = 0
//! value = -1
//! ```
//!
//! `order` may also be a constant expression such as `"1/6"`.

use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use crate::basis::{BoundaryCondition, Side};
use crate::expr::{parse, Expr};
use crate::wrm::{OperatorTerm, ProblemSpec};

use super::HarnessError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    name: Option<String>,
    domain: RawDomain,
    #[serde(default)]
    term: Vec<Spanned<RawTerm>>,
    rhs: Spanned<String>,
    #[serde(default)]
    bc: Vec<Spanned<RawBc>>,
    exact: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    a: f64,
    b: f64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawOrder {
    Number(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    coefficient: Spanned<String>,
    order: Spanned<RawOrder>,
    #[serde(default = "one")]
    exponent: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBc {
    location: Spanned<String>,
    order: u32,
    value: f64,
}

struct Source<'a> {
    path: &'a str,
    text: &'a str,
}

impl Source<'_> {
    fn line(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())].bytes().filter(|&b| b == b'\n').count() + 1
    }

    fn error(&self, span: Range<usize>, message: impl Into<String>) -> HarnessError {
        HarnessError::Config { path: self.path.to_string(), line: Some(self.line(span.start)), message: message.into() }
    }

    /// Parses an expression stored in a TOML string; error offsets are
    /// reported relative to the expression text.
    fn expr(&self, field: &str, s: &Spanned<String>) -> Result<Expr, HarnessError> {
        parse(s.get_ref()).map_err(|e| self.error(s.span(), format!("{field}: {e}")))
    }
}

/// Parses a problem definition. `origin` is used in error messages.
pub fn parse_problem_config(text: &str, origin: &str) -> Result<ProblemSpec, HarnessError> {
    let src = Source { path: origin, text };
    let raw: RawProblem = toml::from_str(text).map_err(|e| HarnessError::Config {
        path: origin.to_string(),
        line: e.span().map(|s| src.line(s.start)),
        message: e.message().to_string(),
    })?;

    let mut terms = Vec::with_capacity(raw.term.len());
    for t in &raw.term {
        let t = t.get_ref();
        let coefficient = src.expr("term.coefficient", &t.coefficient)?;
        let order = match t.order.get_ref() {
            RawOrder::Number(v) => *v,
            RawOrder::Text(s) => {
                let e = parse(s).map_err(|e| src.error(t.order.span(), format!("term.order: {e}")))?;
                if !e.is_constant() {
                    return Err(src.error(t.order.span(), "term.order must be a constant"));
                }
                e.eval(0.0).map_err(|e| src.error(t.order.span(), format!("term.order: {e}")))?
            }
        };
        terms.push(OperatorTerm::new(coefficient, order, t.exponent));
    }

    let mut bcs = Vec::with_capacity(raw.bc.len());
    for b in &raw.bc {
        let r = b.get_ref();
        let location = match r.location.get_ref().as_str() {
            "left" => Side::Left,
            "right" => Side::Right,
            other => {
                return Err(src.error(r.location.span(), format!("bc.location must be \"left\" or \"right\", got {other:?}")))
            }
        };
        bcs.push(BoundaryCondition::new(location, r.order, r.value));
    }

    let spec = ProblemSpec {
        name: raw.name.unwrap_or_else(|| {
            Path::new(origin).file_stem().and_then(|s| s.to_str()).unwrap_or("problem").to_string()
        }),
        domain: (raw.domain.a, raw.domain.b),
        terms,
        rhs: src.expr("rhs", &raw.rhs)?,
        bcs,
        exact: raw.exact.as_ref().map(|e| src.expr("exact", e)).transpose()?,
    };
    spec.validate().map_err(|e| HarnessError::Config { path: origin.to_string(), line: None, message: e.to_string() })?;
    Ok(spec)
}

pub fn load_problem_config(path: &Path) -> Result<ProblemSpec, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| HarnessError::Io { path: path.display().to_string(), source })?;
    parse_problem_config(&text, &path.display().to_string())
}
