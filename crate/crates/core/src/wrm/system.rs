//! Assembly of the weighted-residual systems.

use crate::basis::TrialSpace;
use crate::fracpoly::{caputo_series, FracOrder, FracSeries};
use crate::linalg::Matrix;
use crate::poly::Polynomial;
use crate::quadrature::CompositeRule;

use super::newton::NonlinearSystem;
use super::problem::ProblemSpec;
use super::{Method, SolveError};

/// `{(a + j) / (n + 1) : j = 1..n}`.
pub fn collocation_grid(a: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|j| (a + j as f64) / (n as f64 + 1.0)).collect()
}

/// Interior grid `a + (b - a) j / (n + 1)`; equals [`collocation_grid`] on [0, 1].
pub fn collocation_points(domain: (f64, f64), n: usize) -> Vec<f64> {
    let (a, b) = domain;
    (1..=n).map(|j| a + (b - a) * j as f64 / (n as f64 + 1.0)).collect()
}

/// Per-term images of the lift and basis under the term's derivative, in the
/// local variable `s = x - a`.
#[derive(Debug, Clone)]
struct TermImages {
    lift: FracSeries,
    basis: Vec<FracSeries>,
}

#[derive(Debug, Clone)]
struct TermAt {
    coef: f64,
    exponent: i32,
    lift: f64,
    basis: Vec<f64>,
}

/// Second-derivative term moved to the weak form: `p(x) u''` becomes
/// `-int p u' theta_i' - int p' u' theta_i`.
#[derive(Debug, Clone)]
struct WeakAt {
    p: f64,
    dp: f64,
}

#[derive(Debug, Clone)]
struct PointData {
    x: f64,
    weight: f64,
    rhs: f64,
    theta: Vec<f64>,
    terms: Vec<TermAt>,
    weak: Vec<WeakAt>,
    lift_d1: f64,
    theta_d1: Vec<f64>,
}

/// The nonlinear algebraic system `F(a) = 0` of one weighted-residual
/// method together with everything precomputed for fast assembly.
#[derive(Debug, Clone)]
pub struct ResidualSystem {
    method: Method,
    trial: TrialSpace,
    problem: ProblemSpec,
    images: Vec<TermImages>,
    weak_terms: Vec<usize>,
    points: Vec<PointData>,
    collocation_points: Option<Vec<f64>>,
}

fn is_integer(v: f64) -> bool {
    (v - v.round()).abs() <= 1e-12
}

fn image(poly_local: &Polynomial, order: f64) -> Result<FracSeries, SolveError> {
    let s = poly_local.to_series();
    if order == 0.0 {
        return Ok(s);
    }
    Ok(caputo_series(&s, FracOrder::new(order)?)?)
}

impl ResidualSystem {
    /// Builds the system. `quad` is used by the integral methods and ignored
    /// by collocation.
    pub fn new(
        method: Method,
        trial: TrialSpace,
        problem: ProblemSpec,
        quad: &CompositeRule,
    ) -> Result<Self, SolveError> {
        problem.validate()?;
        let (a, _b) = problem.domain;
        let dim = trial.dim();
        if dim == 0 {
            return Err(SolveError::InvalidProblem("trial space is empty".into()));
        }
        let lift_local = trial.lift().shift(a);
        let basis_local: Vec<Polynomial> = trial.basis().iter().map(|p| p.shift(a)).collect();

        let images = problem
            .terms
            .iter()
            .map(|t| {
                Ok(TermImages {
                    lift: image(&lift_local, t.order)?,
                    basis: basis_local.iter().map(|p| image(p, t.order)).collect::<Result<_, SolveError>>()?,
                })
            })
            .collect::<Result<Vec<_>, SolveError>>()?;

        let mut weak_terms = Vec::new();
        let mut weak_coeffs = Vec::new();
        if method == Method::GalerkinWeak {
            for (i, t) in problem.terms.iter().enumerate() {
                if t.exponent != 1 || !is_integer(t.order) || t.order.round() as i64 != 2 {
                    continue;
                }
                // p' is needed exactly, so only polynomial coefficients qualify
                let Ok(series) = t.coefficient.to_frac_series() else { continue };
                if !series.is_polynomial() {
                    continue;
                }
                let mut dense = vec![0.0; series.max_exponent() as usize + 1];
                for term in series.terms() {
                    dense[term.exponent as usize] = term.coeff;
                }
                weak_terms.push(i);
                weak_coeffs.push(Polynomial::new(dense));
            }
        }

        let (sample, collocation_points): (Vec<(f64, f64)>, Option<Vec<f64>>) = match method {
            Method::Collocation => {
                let pts = collocation_points(problem.domain, dim);
                (pts.iter().map(|&x| (x, 1.0)).collect(), Some(pts))
            }
            _ => (quad.points(), None),
        };

        let lift_d1 = trial.lift().derivative(1);
        let basis_d1: Vec<Polynomial> = trial.basis().iter().map(|p| p.derivative(1)).collect();
        let mut points = Vec::with_capacity(sample.len());
        for (x, weight) in sample {
            let s = x - a;
            let mut terms = Vec::with_capacity(problem.terms.len());
            for (ti, t) in problem.terms.iter().enumerate() {
                if weak_terms.contains(&ti) {
                    continue;
                }
                let coef = t
                    .coefficient
                    .eval(x)
                    .map_err(|e| SolveError::Evaluation { what: format!("coefficient of term {ti}"), source: e })?;
                terms.push(TermAt {
                    coef,
                    exponent: t.exponent as i32,
                    lift: images[ti].lift.eval(s),
                    basis: images[ti].basis.iter().map(|b| b.eval(s)).collect(),
                });
            }
            let weak = weak_coeffs
                .iter()
                .map(|p| WeakAt { p: p.eval(x), dp: p.derivative(1).eval(x) })
                .collect();
            let rhs = problem
                .rhs
                .eval(x)
                .map_err(|e| SolveError::Evaluation { what: "right-hand side".into(), source: e })?;
            points.push(PointData {
                x,
                weight,
                rhs,
                theta: trial.basis().iter().map(|p| p.eval(x)).collect(),
                terms,
                weak,
                lift_d1: lift_d1.eval(x),
                theta_d1: basis_d1.iter().map(|p| p.eval(x)).collect(),
            });
        }

        Ok(Self { method, trial, problem, images, weak_terms, points, collocation_points })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn trial(&self) -> &TrialSpace {
        &self.trial
    }

    pub fn problem(&self) -> &ProblemSpec {
        &self.problem
    }

    pub fn collocation_points(&self) -> Option<&[f64]> {
        self.collocation_points.as_deref()
    }

    /// Indices of operator terms handled in weak form.
    pub fn weak_terms(&self) -> &[usize] {
        &self.weak_terms
    }

    /// Strong-form residual `sum_t c_t(x) (D^o_t u~)^e_t - f(x)` at any `x`.
    pub fn residual_at(&self, coeffs: &[f64], x: f64) -> Result<f64, SolveError> {
        self.check_len(coeffs)?;
        let s = x - self.problem.domain.0;
        let mut r = -self
            .problem
            .rhs
            .eval(x)
            .map_err(|e| SolveError::Evaluation { what: "right-hand side".into(), source: e })?;
        for (ti, t) in self.problem.terms.iter().enumerate() {
            let coef = t
                .coefficient
                .eval(x)
                .map_err(|e| SolveError::Evaluation { what: format!("coefficient of term {ti}"), source: e })?;
            let img = &self.images[ti];
            let v = img.lift.eval(s) + img.basis.iter().zip(coeffs).map(|(b, c)| c * b.eval(s)).sum::<f64>();
            r += coef * v.powi(t.exponent as i32);
        }
        Ok(r)
    }

    fn check_len(&self, coeffs: &[f64]) -> Result<(), SolveError> {
        if coeffs.len() != self.trial.dim() {
            return Err(SolveError::InvalidProblem(format!(
                "{} coefficients for a {}-dimensional trial space",
                coeffs.len(),
                self.trial.dim()
            )));
        }
        Ok(())
    }

    /// Assembles `F(a)` and its Jacobian.
    pub fn assemble(&self, coeffs: &[f64]) -> Result<(Vec<f64>, Matrix), SolveError> {
        self.check_len(coeffs)?;
        let n = self.trial.dim();
        let mut f = vec![0.0; n];
        let mut jac = Matrix::zeros(n, n);
        let mut dr = vec![0.0; n];
        for (row, pt) in self.points.iter().enumerate() {
            // residual and its gradient at this point
            let mut r = -pt.rhs;
            dr.iter_mut().for_each(|v| *v = 0.0);
            for t in &pt.terms {
                let v = t.lift + t.basis.iter().zip(coeffs).map(|(b, c)| b * c).sum::<f64>();
                r += t.coef * v.powi(t.exponent);
                let g = t.coef * t.exponent as f64 * v.powi(t.exponent - 1);
                for (d, b) in dr.iter_mut().zip(&t.basis) {
                    *d += g * b;
                }
            }
            match self.method {
                Method::Collocation => {
                    f[row] = r;
                    for k in 0..n {
                        jac[(row, k)] = dr[k];
                    }
                }
                Method::Galerkin | Method::GalerkinWeak => {
                    let w = pt.weight;
                    let du = pt.lift_d1 + pt.theta_d1.iter().zip(coeffs).map(|(d, c)| d * c).sum::<f64>();
                    for i in 0..n {
                        let mut fi = r * pt.theta[i];
                        for wk in &pt.weak {
                            fi -= wk.p * du * pt.theta_d1[i] + wk.dp * du * pt.theta[i];
                        }
                        f[i] += w * fi;
                        for j in 0..n {
                            let mut jij = dr[j] * pt.theta[i];
                            for wk in &pt.weak {
                                jij -= wk.p * pt.theta_d1[j] * pt.theta_d1[i] + wk.dp * pt.theta_d1[j] * pt.theta[i];
                            }
                            jac[(i, j)] += w * jij;
                        }
                    }
                }
                Method::LeastSquares => {
                    let w = pt.weight;
                    for j in 0..n {
                        f[j] += w * r * dr[j];
                        for k in 0..n {
                            let mut second = 0.0;
                            for t in &pt.terms {
                                if t.exponent >= 2 {
                                    let v = t.lift + t.basis.iter().zip(coeffs).map(|(b, c)| b * c).sum::<f64>();
                                    let e = t.exponent as f64;
                                    second += t.coef * e * (e - 1.0) * v.powi(t.exponent - 2) * t.basis[j] * t.basis[k];
                                }
                            }
                            jac[(j, k)] += w * (dr[j] * dr[k] + r * second);
                        }
                    }
                }
            }
        }
        Ok((f, jac))
    }

    /// Sample points used by the assembly (quadrature nodes or grid).
    pub fn sample_points(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }
}

impl NonlinearSystem for ResidualSystem {
    fn dim(&self) -> usize {
        self.trial.dim()
    }

    fn evaluate(&self, coeffs: &[f64]) -> Result<(Vec<f64>, Matrix), SolveError> {
        self.assemble(coeffs)
    }
}
