//! The four benchmark problems, plus a consistent transcription of the third.

use crate::basis::{BoundaryCondition, Side};
use crate::expr::parse;
use crate::wrm::{OperatorTerm, ProblemSpec};

use super::HarnessError;

/// Identifiers accepted by [`builtin_problem`].
pub const BUILTIN_IDS: [&str; 5] = ["1", "2", "3", "3c", "4"];

fn e(text: &str) -> crate::expr::Expr {
    parse(text).expect("builtin expression parses")
}

fn term(coef: &str, order: f64, exponent: u32) -> OperatorTerm {
    OperatorTerm::new(e(coef), order, exponent)
}

const P3_LHS_ORDER: f64 = 3.5;

fn p3_bcs() -> Vec<BoundaryCondition> {
    vec![
        BoundaryCondition::new(Side::Left, 0, 0.0),
        BoundaryCondition::new(Side::Left, 1, 0.0),
        BoundaryCondition::new(Side::Right, 0, 1.0),
        BoundaryCondition::new(Side::Right, 1, 1.0),
    ]
}

/// Returns a builtin problem.
///
/// * `1`: `D^1.5 u - u^3 = f`, `u(0) = -1`, `u(1) = 0`, exact `x^1.9 - 1`.
/// * `2`: `D^1.5 u + 2 (u')^2 + 8 u = 0`, `u(0) = 0`, `u'(1) = -1`, claimed
///   exact `x - x^2` (which does not satisfy the equation).
/// * `3`: `D^3.5 u - u^2 = f` with the rounded constants and the `x^-1.5`
///   term exactly as usually printed.
/// * `3c`: the same operator with `f` recomputed from the Caputo derivative
///   of `x^5 - 2x^4 + 2x^2`, so that the exact solution solves it.
/// * `4`: `u'' + G(4/5) x^1.2 D^1.2 u + (11/9) G(5/6) x^(1/6) D^(1/6) u - (u')^2
///   = 2 + x^2/10`, `u(0) = 1`, `u(1) = 2`, exact `1 + x^2`.
pub fn builtin_problem(id: &str) -> Result<ProblemSpec, HarnessError> {
    let spec = match id {
        "1" => ProblemSpec {
            name: "problem1".into(),
            domain: (0.0, 1.0),
            terms: vec![term("1", 1.5, 1), term("-1", 0.0, 3)],
            rhs: e("gamma(2.9)/gamma(1.4)*x^0.4 - (x^1.9 - 1)^3"),
            bcs: vec![BoundaryCondition::new(Side::Left, 0, -1.0), BoundaryCondition::new(Side::Right, 0, 0.0)],
            exact: Some(e("x^1.9 - 1")),
        },
        "2" => ProblemSpec {
            name: "problem2".into(),
            domain: (0.0, 1.0),
            terms: vec![term("1", 1.5, 1), term("2", 1.0, 2), term("8", 0.0, 1)],
            rhs: e("0"),
            bcs: vec![BoundaryCondition::new(Side::Left, 0, 0.0), BoundaryCondition::new(Side::Right, 1, -1.0)],
            exact: Some(e("x - x^2")),
        },
        "3" => ProblemSpec {
            name: "problem3".into(),
            domain: (0.0, 1.0),
            terms: vec![term("1", P3_LHS_ORDER, 1), term("-1", 0.0, 2)],
            rhs: e("90.27*x^1.5 - 2*27.08*x^0.5 - 2*0.56/x^1.5 - x^10 + 4*x^9 - 4*x^8 - 4*x^7 + 8*x^6 - 4*x^4"),
            bcs: p3_bcs(),
            exact: Some(e("x^5 - 2*x^4 + 2*x^2")),
        },
        "3c" => ProblemSpec {
            name: "problem3c".into(),
            domain: (0.0, 1.0),
            terms: vec![term("1", P3_LHS_ORDER, 1), term("-1", 0.0, 2)],
            rhs: e(
                "gamma(6)/gamma(2.5)*x^1.5 - 2*gamma(5)/gamma(1.5)*x^0.5 - x^10 + 4*x^9 - 4*x^8 - 4*x^7 + 8*x^6 - 4*x^4",
            ),
            bcs: p3_bcs(),
            exact: Some(e("x^5 - 2*x^4 + 2*x^2")),
        },
        "4" => ProblemSpec {
            name: "problem4".into(),
            domain: (0.0, 1.0),
            terms: vec![
                term("1", 2.0, 1),
                term("gamma(4/5)*x^(6/5)", 6.0 / 5.0, 1),
                term("11/9*gamma(5/6)*x^(1/6)", 1.0 / 6.0, 1),
                term("-1", 1.0, 2),
            ],
            rhs: e("2 + x^2/10"),
            bcs: vec![BoundaryCondition::new(Side::Left, 0, 1.0), BoundaryCondition::new(Side::Right, 0, 2.0)],
            exact: Some(e("1 + x^2")),
        },
        other => return Err(HarnessError::UnknownProblem(other.to_string())),
    };
    Ok(spec)
}
