use crate::basis::{BoundaryCondition, Side};
use crate::expr::Expr;

use super::SolveError;

/// One operator term: `coefficient(x) * (D^order u)^exponent`. Order 0 is
/// `u` itself; non-integer orders are Caputo derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTerm {
    pub coefficient: Expr,
    pub order: f64,
    pub exponent: u32,
}

impl OperatorTerm {
    pub fn new(coefficient: Expr, order: f64, exponent: u32) -> Self {
        Self { coefficient, order, exponent }
    }

    pub fn linear(coefficient: Expr, order: f64) -> Self {
        Self::new(coefficient, order, 1)
    }
}

/// Boundary value problem `sum_t terms[t] = rhs(x)` on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub name: String,
    pub domain: (f64, f64),
    pub terms: Vec<OperatorTerm>,
    pub rhs: Expr,
    pub bcs: Vec<BoundaryCondition>,
    pub exact: Option<Expr>,
}

fn is_integer(v: f64) -> bool {
    (v - v.round()).abs() <= 1e-12
}

impl ProblemSpec {
    /// `ceil` of the highest derivative order.
    pub fn highest_order(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| if is_integer(t.order) { t.order.round() as u32 } else { t.order.ceil() as u32 })
            .max()
            .unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let (a, b) = self.domain;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(SolveError::InvalidProblem(format!("domain [{a}, {b}] is not a proper interval")));
        }
        if self.terms.is_empty() {
            return Err(SolveError::InvalidProblem("operator has no terms".into()));
        }
        for (i, t) in self.terms.iter().enumerate() {
            if !(t.order >= 0.0) || !t.order.is_finite() {
                return Err(SolveError::InvalidProblem(format!("term {i}: order {} must be >= 0", t.order)));
            }
            if t.exponent == 0 {
                return Err(SolveError::InvalidProblem(format!("term {i}: exponent must be >= 1")));
            }
            if t.exponent > 1 && !is_integer(t.order) {
                return Err(SolveError::InvalidProblem(format!(
                    "term {i}: a power of a fractional derivative (order {}) is not supported",
                    t.order
                )));
            }
        }
        let need = self.highest_order() as usize;
        if self.bcs.len() != need {
            return Err(SolveError::InvalidProblem(format!(
                "{} boundary conditions given, operator of order {} needs {need}",
                self.bcs.len(),
                self.terms.iter().map(|t| t.order).fold(0.0, f64::max)
            )));
        }
        for bc in &self.bcs {
            if bc.derivative_order as usize >= need {
                return Err(SolveError::InvalidProblem(format!(
                    "boundary condition on derivative {} at the {} end exceeds the operator order",
                    bc.derivative_order,
                    match bc.location {
                        Side::Left => "left",
                        Side::Right => "right",
                    }
                )));
            }
        }
        Ok(())
    }
}
