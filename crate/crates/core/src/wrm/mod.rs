//! Weighted-residual solvers: Galerkin (strong and weak), least squares and
//! collocation, all driven by damped Newton.

mod newton;
mod problem;
mod system;

pub use newton::{newton_solve, Damping, NewtonConfig, NewtonResult, NonlinearSystem};
pub use problem::{OperatorTerm, ProblemSpec};
pub use system::{collocation_grid, collocation_points, ResidualSystem};

use std::fmt;

use crate::basis::{build_trial_space, BasisError, BasisFamily, DerivativeBcMode, TrialSpace};
use crate::expr::EvalError;
use crate::fracpoly::FracError;
use crate::linalg::LinalgError;
use crate::poly::Polynomial;
use crate::quadrature::{QuadConfig, QuadError};

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Frac(#[from] FracError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("evaluating {what}: {source}")]
    Evaluation { what: String, source: EvalError },
    #[error("Newton did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Galerkin,
    GalerkinWeak,
    LeastSquares,
    Collocation,
}

impl Method {
    pub fn all() -> [Method; 4] {
        [Method::Galerkin, Method::GalerkinWeak, Method::LeastSquares, Method::Collocation]
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Galerkin => "galerkin",
            Method::GalerkinWeak => "galerkin-weak",
            Method::LeastSquares => "least-squares",
            Method::Collocation => "collocation",
        }
    }

    /// Column prefix used in tables.
    pub fn short_name(self) -> &'static str {
        match self {
            Method::Galerkin => "gwr",
            Method::GalerkinWeak => "gwr_weak",
            Method::LeastSquares => "ls",
            Method::Collocation => "col",
        }
    }

    pub fn from_name(s: &str) -> Option<Method> {
        Method::all().into_iter().find(|m| m.name() == s || m.short_name() == s)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub converged: bool,
    pub iterations: usize,
    pub residual_norm: f64,
    pub residual_threshold: f64,
    pub dim: usize,
    pub active_constraints: usize,
    pub collocation_points: Option<Vec<f64>>,
    /// Operator terms assembled in weak form.
    pub weak_terms: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub method: Method,
    pub trial: TrialSpace,
    pub coeffs: Vec<f64>,
    /// `lift + sum a_j theta_j` as a dense polynomial in `x`.
    pub approx: Polynomial,
    pub diagnostics: Diagnostics,
}

/// Everything besides the problem that determines a run.
#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub quad: QuadConfig,
    pub newton: NewtonConfig,
    pub bc_mode: DerivativeBcMode,
}

/// Builds the system for one cell without solving it.
pub fn build_system(
    problem: &ProblemSpec,
    method: Method,
    family: BasisFamily,
    count: usize,
    opts: &SolveOptions,
) -> Result<ResidualSystem, SolveError> {
    problem.validate()?;
    let trial = build_trial_space(family, count, &problem.bcs, problem.domain, opts.bc_mode)?;
    let rule = opts.quad.build(problem.domain.0, problem.domain.1)?;
    ResidualSystem::new(method, trial, problem.clone(), &rule)
}

/// Solves one cell. A Newton run that misses its tolerance is returned
/// with `diagnostics.converged == false`; callers that need a converged
/// answer use [`Solution::require_converged`].
pub fn solve(
    problem: &ProblemSpec,
    method: Method,
    family: BasisFamily,
    count: usize,
    opts: &SolveOptions,
) -> Result<Solution, SolveError> {
    let sys = build_system(problem, method, family, count, opts)?;
    let result = newton_solve(&sys, &opts.newton)?;
    let trial = sys.trial().clone();
    let approx = trial.combine(&result.coeffs);
    Ok(Solution {
        method,
        diagnostics: Diagnostics {
            converged: result.converged,
            iterations: result.iterations,
            residual_norm: result.residual_norm,
            residual_threshold: result.residual_threshold,
            dim: trial.dim(),
            active_constraints: trial.active_constraints().len(),
            collocation_points: sys.collocation_points().map(<[f64]>::to_vec),
            weak_terms: sys.weak_terms().to_vec(),
        },
        trial,
        coeffs: result.coeffs,
        approx,
    })
}

impl Solution {
    pub fn require_converged(self) -> Result<Self, SolveError> {
        if self.diagnostics.converged {
            Ok(self)
        } else {
            Err(SolveError::NotConverged {
                iterations: self.diagnostics.iterations,
                residual: self.diagnostics.residual_norm,
            })
        }
    }
}
