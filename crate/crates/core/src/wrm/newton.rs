//! Damped Newton iteration over a dense analytic Jacobian.

use crate::linalg::{lu_solve, norm_inf, Matrix};

use super::SolveError;

/// A square nonlinear system `F(a) = 0` with Jacobian.
pub trait NonlinearSystem {
    fn dim(&self) -> usize;
    fn evaluate(&self, coeffs: &[f64]) -> Result<(Vec<f64>, Matrix), SolveError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Damping {
    None,
    #[default]
    Halving,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonConfig {
    pub max_iters: usize,
    pub step_tol: f64,
    pub residual_tol: f64,
    pub damping: Damping,
    /// Starting coefficients; empty means all zeros.
    pub initial_guess: Vec<f64>,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            max_iters: 50,
            step_tol: 1e-12,
            residual_tol: 1e-12,
            damping: Damping::Halving,
            initial_guess: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonResult {
    pub coeffs: Vec<f64>,
    pub iterations: usize,
    pub residual_norm: f64,
    /// Threshold the final residual was compared against.
    pub residual_threshold: f64,
    pub converged: bool,
}

const MAX_HALVINGS: u32 = 20;

/// Newton iteration `a <- a - lambda J^{-1} F`.
///
/// Stops when the step or the residual falls below its tolerance. The
/// residual tolerance is relative to `max(1, |F(a0)|_inf)` so that systems
/// assembled from large coefficients are judged on the same footing;
/// `converged` is set only when the final residual meets it.
pub fn newton_solve<S: NonlinearSystem + ?Sized>(sys: &S, cfg: &NewtonConfig) -> Result<NewtonResult, SolveError> {
    let n = sys.dim();
    if n == 0 {
        return Err(SolveError::InvalidProblem("system has no unknowns".into()));
    }
    let mut a = if cfg.initial_guess.is_empty() {
        vec![0.0; n]
    } else if cfg.initial_guess.len() == n {
        cfg.initial_guess.clone()
    } else {
        return Err(SolveError::InvalidProblem(format!(
            "initial guess has {} entries, system has {n}",
            cfg.initial_guess.len()
        )));
    };
    let (mut f, mut jac) = sys.evaluate(&a)?;
    let mut fnorm = norm_inf(&f);
    let threshold = cfg.residual_tol * fnorm.max(1.0);
    let mut iterations = 0;
    while fnorm > threshold && iterations < cfg.max_iters {
        let delta = lu_solve(&jac, &f)?;
        iterations += 1;
        let mut lambda = 1.0;
        let mut halvings = 0;
        let (cand, fc, jc) = loop {
            let cand: Vec<f64> = a.iter().zip(&delta).map(|(x, d)| x - lambda * d).collect();
            let (fc, jc) = sys.evaluate(&cand)?;
            let better = norm_inf(&fc) < fnorm;
            if better || cfg.damping == Damping::None || halvings == MAX_HALVINGS {
                break (cand, fc, jc);
            }
            lambda *= 0.5;
            halvings += 1;
        };
        let step = lambda * norm_inf(&delta);
        a = cand;
        f = fc;
        jac = jc;
        fnorm = norm_inf(&f);
        if step <= cfg.step_tol * norm_inf(&a).max(1.0) {
            break;
        }
    }
    Ok(NewtonResult {
        coeffs: a,
        iterations,
        residual_norm: fnorm,
        residual_threshold: threshold,
        converged: fnorm <= threshold,
    })
}
