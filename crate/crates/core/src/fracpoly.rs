//! Generalized power series `sum c_k x^{p_k}` with real exponents, and exact
//! fractional differentiation of such series.
//!
//! The analytic rule used throughout is the monomial formula
//! `D^alpha x^p = Gamma(p+1) / Gamma(p+1-alpha) x^(p-alpha)`; in the Caputo
//! sense integer powers below `ceil(alpha)` are annihilated. The lower
//! terminal of both derivatives is the origin of the series variable.

use std::fmt;

use thiserror::Error;

use crate::gamma::{gamma, gamma_ratio, recip_gamma, GammaError};
use crate::quadrature::{gauss_legendre_rule, CompositeRule, Panel, QuadratureRule};

/// Exponents within this distance of an integer are treated as that integer.
pub const EXPONENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FracError {
    #[error("fractional order must be positive and finite, got {0}")]
    InvalidOrder(f64),
    #[error("exponent must be finite and non-negative, got {0}")]
    InvalidExponent(f64),
    #[error("Caputo derivative of order {order} is undefined for x^{exponent}: the n-th derivative is not integrable at the origin")]
    NotIntegrable { exponent: f64, order: f64 },
    #[error("derivative of x^{exponent} has a negative exponent {result}; not representable as a series")]
    NegativeExponent { exponent: f64, result: f64 },
    #[error("Riemann-Liouville image of x^{exponent} with order {order} is not integrable at the origin")]
    RlNotIntegrable { exponent: f64, order: f64 },
    #[error("evaluation point {0} is outside the series domain")]
    BadPoint(f64),
    #[error("quadrature did not converge: estimated error {estimate:e} exceeds {tolerance:e}")]
    QuadratureNonConvergence { estimate: f64, tolerance: f64 },
    #[error(transparent)]
    Gamma(#[from] GammaError),
}

fn nearest_integer(p: f64) -> Option<i64> {
    let r = p.round();
    ((p - r).abs() <= EXPONENT_TOL).then_some(r as i64)
}

/// A single term `coeff * x^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracTerm {
    pub coeff: f64,
    pub exponent: f64,
}

impl FracTerm {
    pub fn new(coeff: f64, exponent: f64) -> Result<Self, FracError> {
        if !exponent.is_finite() || exponent < -EXPONENT_TOL {
            return Err(FracError::InvalidExponent(exponent));
        }
        let exponent = match nearest_integer(exponent) {
            Some(k) => k as f64,
            None => exponent,
        };
        Ok(Self { coeff, exponent })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeff * pow_term(x, self.exponent)
    }
}

/// `x^p` with the conventions `0^0 = 1` and `0^p = 0` for `p > 0`.
fn pow_term(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if x == 0.0 {
        if p > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else if p == p.trunc() && p.abs() < 64.0 {
        x.powi(p as i32)
    } else {
        x.powf(p)
    }
}

/// Order of a fractional derivative together with `ceil(alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    alpha: f64,
    n_ceil: u32,
}

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self, FracError> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(FracError::InvalidOrder(alpha));
        }
        let (alpha, n_ceil) = match nearest_integer(alpha) {
            Some(k) => (k as f64, k as u32),
            None => (alpha, alpha.ceil() as u32),
        };
        Ok(Self { alpha, n_ceil })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_ceil(&self) -> u32 {
        self.n_ceil
    }

    pub fn is_integer(&self) -> bool {
        self.alpha == self.n_ceil as f64
    }
}

/// Finite sum of [`FracTerm`]s, kept sorted by strictly increasing exponent
/// with no zero coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FracSeries {
    terms: Vec<FracTerm>,
}

impl FracSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::from_terms(vec![FracTerm { coeff: c, exponent: 0.0 }])
    }

    pub fn monomial(coeff: f64, exponent: f64) -> Result<Self, FracError> {
        Ok(Self::from_terms(vec![FracTerm::new(coeff, exponent)?]))
    }

    /// Builds a series from `(coeff, exponent)` pairs, merging duplicates.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, FracError>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let terms = pairs
            .into_iter()
            .map(|(c, p)| FracTerm::new(c, p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_terms(terms))
    }

    /// Dense polynomial coefficients (index = power).
    pub fn from_poly_coeffs(coeffs: &[f64]) -> Self {
        Self::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| FracTerm { coeff: c, exponent: k as f64 })
                .collect(),
        )
    }

    /// Normalizes terms without validating exponents; used for
    /// intermediate results that may carry negative powers.
    pub(crate) fn from_raw_terms(terms: Vec<FracTerm>) -> Self {
        Self::from_terms(terms)
    }

    fn from_terms(mut terms: Vec<FracTerm>) -> Self {
        for t in terms.iter_mut() {
            if let Some(k) = nearest_integer(t.exponent) {
                t.exponent = k as f64;
            }
        }
        terms.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
        let mut merged: Vec<FracTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if (t.exponent - last.exponent).abs() <= EXPONENT_TOL => {
                    last.coeff += t.coeff;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        Self { terms: merged }
    }

    pub fn terms(&self) -> &[FracTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn max_exponent(&self) -> f64 {
        self.terms.last().map_or(0.0, |t| t.exponent)
    }

    /// True when every exponent is a non-negative integer.
    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(|t| t.exponent == t.exponent.trunc())
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self::from_terms(terms)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| FracTerm { coeff: t.coeff * s, exponent: t.exponent })
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(FracTerm {
                    coeff: a.coeff * b.coeff,
                    exponent: a.exponent + b.exponent,
                });
            }
        }
        Self::from_terms(terms)
    }

    /// Exact `m`-fold classical derivative. Integer powers below `m` vanish;
    /// non-integer powers use the falling product `p (p-1) ... (p-m+1)`.
    pub fn diff(&self, m: u32) -> Result<Self, FracError> {
        let raw = self.diff_terms(m);
        if let Some(t) = raw.iter().find(|t| t.exponent < -EXPONENT_TOL) {
            return Err(FracError::NegativeExponent {
                exponent: t.exponent + m as f64,
                result: t.exponent,
            });
        }
        Ok(Self::from_terms(
            raw.into_iter()
                .map(|t| FracTerm { coeff: t.coeff, exponent: t.exponent.max(0.0) })
                .collect(),
        ))
    }

    /// Term-wise `m`-fold derivative; exponents may go negative.
    fn diff_terms(&self, m: u32) -> Vec<FracTerm> {
        let mut out = Vec::with_capacity(self.len());
        for t in &self.terms {
            let p = t.exponent;
            if nearest_integer(p).is_some_and(|k| k < m as i64) {
                continue;
            }
            let mut c = t.coeff;
            for i in 0..m {
                c *= p - i as f64;
            }
            out.push(FracTerm { coeff: c, exponent: p - m as f64 });
        }
        out
    }
}

impl fmt::Display for FracSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*x^{}", t.coeff, t.exponent)?;
        }
        Ok(())
    }
}

/// Caputo derivative of a single term.
pub fn caputo_term(t: &FracTerm, order: FracOrder) -> Result<FracSeries, FracError> {
    let p = t.exponent;
    let n = order.n_ceil();
    match nearest_integer(p) {
        Some(k) if k < n as i64 => return Ok(FracSeries::zero()),
        Some(_) => {}
        None if p <= n as f64 - 1.0 => {
            return Err(FracError::NotIntegrable { exponent: p, order: order.alpha() })
        }
        None => {}
    }
    let q = p - order.alpha();
    if q < -EXPONENT_TOL {
        return Err(FracError::NegativeExponent { exponent: p, result: q });
    }
    let c = t.coeff * gamma_ratio(p + 1.0, p + 1.0 - order.alpha())?;
    Ok(FracSeries::from_terms(vec![FracTerm { coeff: c, exponent: q.max(0.0) }]))
}

/// Caputo derivative of a series, term by term.
pub fn caputo_series(s: &FracSeries, order: FracOrder) -> Result<FracSeries, FracError> {
    let mut terms = Vec::with_capacity(s.len());
    for t in s.terms() {
        terms.extend_from_slice(caputo_term(t, order)?.terms());
    }
    Ok(FracSeries::from_terms(terms))
}

/// Terms that may carry exponents in (-1, 0); produced when a
/// Riemann-Liouville derivative leaves an integrable singularity at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSeries {
    terms: Vec<FracTerm>,
}

impl SingularSeries {
    pub fn terms(&self) -> &[FracTerm] {
        &self.terms
    }

    /// Evaluation for `x > 0`.
    pub fn eval(&self, x: f64) -> Result<f64, FracError> {
        if x <= 0.0 {
            return Err(FracError::BadPoint(x));
        }
        Ok(self.terms.iter().map(|t| t.coeff * x.powf(t.exponent)).sum())
    }
}

/// Result of a Riemann-Liouville derivative.
#[derive(Debug, Clone, PartialEq)]
pub enum RlImage {
    Regular(FracSeries),
    Singular(SingularSeries),
}

impl RlImage {
    pub fn eval(&self, x: f64) -> Result<f64, FracError> {
        match self {
            RlImage::Regular(s) => Ok(s.eval(x)),
            RlImage::Singular(s) => s.eval(x),
        }
    }
}

/// Riemann-Liouville derivative. Unlike Caputo, low-degree integer powers
/// are not annihilated; `Gamma(p+1-alpha)` poles give exact zeros.
pub fn riemann_liouville_series(s: &FracSeries, order: FracOrder) -> Result<RlImage, FracError> {
    let mut terms = Vec::with_capacity(s.len());
    for t in s.terms() {
        let p = t.exponent;
        let c = t.coeff * gamma(p + 1.0)? * recip_gamma(p + 1.0 - order.alpha())?;
        if c == 0.0 {
            continue;
        }
        let q = p - order.alpha();
        if q <= -1.0 + EXPONENT_TOL {
            return Err(FracError::RlNotIntegrable { exponent: p, order: order.alpha() });
        }
        let q = match nearest_integer(q) {
            Some(k) => k as f64,
            None => q,
        };
        terms.push(FracTerm { coeff: c, exponent: q });
    }
    if terms.iter().all(|t| t.exponent >= 0.0) {
        Ok(RlImage::Regular(FracSeries::from_terms(terms)))
    } else {
        terms.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
        Ok(RlImage::Singular(SingularSeries { terms }))
    }
}

/// Settings for [`caputo_numeric_oracle`].
#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub points: usize,
    pub panels: usize,
    pub ratio: f64,
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { points: 16, panels: 24, ratio: 0.2, tolerance: 1e-9 }
    }
}

/// Evaluates the Caputo integral definition
/// `1/Gamma(n-alpha) int_0^x (x-y)^(n-alpha-1) s^(n)(y) dy` by quadrature.
///
/// With `y = x t` and `1 - t = v^(1/mu)`, `mu = n - alpha`, the kernel becomes
/// constant and the integral is `x^mu / Gamma(mu + 1) int_0^1 s^(n)(x (1 - v^(1/mu))) dv`.
/// The remaining endpoint behaviour at both ends of `v` is handled by
/// geometric grading toward 0 and 1. The error estimate is the change under
/// panel doubling.
pub fn caputo_numeric_oracle(
    s: &FracSeries,
    order: FracOrder,
    x: f64,
    cfg: &OracleConfig,
) -> Result<f64, FracError> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(FracError::BadPoint(x));
    }
    let n = order.n_ceil();
    // integrability precondition, same as the analytic rule
    for t in s.terms() {
        if nearest_integer(t.exponent).is_none() && t.exponent <= n as f64 - 1.0 {
            return Err(FracError::NotIntegrable { exponent: t.exponent, order: order.alpha() });
        }
    }
    let dn = s.diff_terms(n);
    let eval_dn = |y: f64| -> f64 { dn.iter().map(|t| t.coeff * pow_term(y, t.exponent)).sum() };
    if order.is_integer() {
        return Ok(eval_dn(x));
    }
    let mu = n as f64 - order.alpha();
    let inv_mu = 1.0 / mu;
    let integrand = |v: f64, w: f64| {
        let gap = if v <= 0.5 { 1.0 - v.powf(inv_mu) } else { -(inv_mu * (-w).ln_1p()).exp_m1() };
        let y = x * gap;
        if y == 0.0 {
            // only reached on the substituted upper half, where the
            // transformed integrand vanishes like z^(power (1 + beta) - 1)
            return 0.0;
        }
        eval_dn(y)
    };
    let base = gauss_legendre_rule(cfg.points).expect("oracle rule size in range");
    // s^(n) ~ y^beta near y = 0 for fractional exponents in (n - 1, n)
    let beta = s
        .terms()
        .iter()
        .filter(|t| nearest_integer(t.exponent).is_none() && t.exponent < n as f64)
        .map(|t| t.exponent - n as f64)
        .fold(0.0, f64::min);
    let power = (2.0 / (1.0 + beta)).ceil().clamp(1.0, 64.0) as i32;
    let coarse = two_sided_sum(&integrand, cfg.panels, cfg.ratio, &base, power);
    let fine = two_sided_sum(&integrand, 2 * cfg.panels, cfg.ratio, &base, power);
    let prefactor = x.powf(mu) / gamma(mu + 1.0)?;
    let estimate = prefactor * (fine - coarse).abs();
    if estimate > cfg.tolerance {
        return Err(FracError::QuadratureNonConvergence { estimate, tolerance: cfg.tolerance });
    }
    Ok(prefactor * fine)
}

/// Integral over [0, 1] with panels graded geometrically toward both ends.
/// `f` receives `(v, 1 - v)`; on the upper half `1 - v = z^power` is the
/// integration variable, which smooths `(1 - v)^beta` singularities once
/// `power (1 + beta) >= 2` and keeps `1 - v` free of cancellation.
fn two_sided_sum(f: &dyn Fn(f64, f64) -> f64, panels: usize, ratio: f64, base: &QuadratureRule, power: i32) -> f64 {
    let graded = |top: f64| -> CompositeRule {
        let widths: Vec<f64> = (0..panels).map(|k| ratio.powi((panels - 1 - k) as i32)).collect();
        let total: f64 = widths.iter().sum();
        let mut edges = Vec::with_capacity(panels + 1);
        edges.push(0.0);
        let mut acc = 0.0;
        for w in &widths {
            acc += w / total * top;
            edges.push(acc);
        }
        *edges.last_mut().unwrap() = top;
        let panels = edges.windows(2).map(|e| Panel { left: e[0], right: e[1] }).collect();
        CompositeRule::from_panels(panels, base.clone())
    };
    let lower = graded(0.5).sum(&|v| f(v, 1.0 - v));
    let k = power as f64;
    let upper = graded(0.5f64.powf(1.0 / k)).sum(&|z| {
        let w = z.powi(power);
        k * z.powi(power - 1) * f(1.0 - w, w)
    });
    lower + upper
}
