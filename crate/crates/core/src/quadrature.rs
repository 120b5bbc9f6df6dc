//! Gauss-Legendre rules and geometrically graded composite rules.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("Gauss-Legendre rule needs 1..=128 points, got {0}")]
    BadPointCount(usize),
    #[error("composite rule needs a < b, got [{a}, {b}]")]
    BadInterval { a: f64, b: f64 },
    #[error("panel count must be in 1..=64, got {0}")]
    BadPanelCount(usize),
    #[error("grading ratio must lie in (0, 1), got {0}")]
    BadRatio(f64),
    #[error("integrand is not finite at x = {x} (value {value})")]
    NonFinite { x: f64, value: f64 },
}

/// Gauss rule on the reference interval [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

/// Legendre polynomial P_n and its derivative at `x` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// n-point Gauss-Legendre rule: Newton iteration on P_n from Chebyshev-like
/// initial guesses, weights `2 / ((1 - x^2) P_n'(x)^2)`. Nodes are mirrored so
/// the rule is exactly symmetric.
pub fn gauss_legendre_rule(npoints: usize) -> Result<QuadratureRule, QuadError> {
    if !(1..=128).contains(&npoints) {
        return Err(QuadError::BadPointCount(npoints));
    }
    let n = npoints;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // descending order from the left end
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub left: f64,
    pub right: f64,
}

/// Base rule replicated over a partition of [a, b].
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeRule {
    panels: Vec<Panel>,
    base: QuadratureRule,
}

impl CompositeRule {
    pub(crate) fn from_panels(panels: Vec<Panel>, base: QuadratureRule) -> Self {
        Self { panels, base }
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn base(&self) -> &QuadratureRule {
        &self.base
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.panels[0].left, self.panels[self.panels.len() - 1].right)
    }

    /// Mapped nodes and weights, in panel order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.panels.len() * self.base.order());
        for p in &self.panels {
            let half = 0.5 * (p.right - p.left);
            let mid = 0.5 * (p.right + p.left);
            for (t, w) in self.base.nodes.iter().zip(&self.base.weights) {
                out.push((mid + half * t, half * w));
            }
        }
        out
    }

    /// Plain weighted sum without finiteness checks.
    pub(crate) fn sum(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        let mut total = 0.0;
        for p in &self.panels {
            let half = 0.5 * (p.right - p.left);
            let mid = 0.5 * (p.right + p.left);
            let mut s = 0.0;
            for (t, w) in self.base.nodes.iter().zip(&self.base.weights) {
                s += w * f(mid + half * t);
            }
            total += half * s;
        }
        total
    }
}

/// Default quadrature configuration used by the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub points: usize,
    pub panels: usize,
    pub ratio: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { points: 16, panels: 30, ratio: 0.2 }
    }
}

impl QuadConfig {
    pub fn build(&self, a: f64, b: f64) -> Result<CompositeRule, QuadError> {
        graded_composite(a, b, self.panels, self.ratio, gauss_legendre_rule(self.points)?)
    }

    /// Same rule with twice the panels (capped at 64), for the doubling check.
    pub fn doubled(&self) -> Self {
        Self { panels: (2 * self.panels).min(64), ..*self }
    }
}

/// Panels whose widths shrink geometrically toward `a` by `grading_ratio`.
pub fn graded_composite(
    a: f64,
    b: f64,
    panels: usize,
    grading_ratio: f64,
    base: QuadratureRule,
) -> Result<CompositeRule, QuadError> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(QuadError::BadInterval { a, b });
    }
    if !(1..=64).contains(&panels) {
        return Err(QuadError::BadPanelCount(panels));
    }
    if !(grading_ratio > 0.0 && grading_ratio < 1.0) {
        return Err(QuadError::BadRatio(grading_ratio));
    }
    let rel: Vec<f64> = (0..panels).map(|k| grading_ratio.powi((panels - 1 - k) as i32)).collect();
    let total: f64 = rel.iter().sum();
    let len = b - a;
    let mut out = Vec::with_capacity(panels);
    let mut left = a;
    for (k, r) in rel.iter().enumerate() {
        let right = if k + 1 == panels { b } else { left + len * r / total };
        out.push(Panel { left, right });
        left = right;
    }
    Ok(CompositeRule { panels: out, base })
}

/// Integrates `f` with `rule`, reporting the first non-finite evaluation.
pub fn integrate<F: Fn(f64) -> f64>(f: F, rule: &CompositeRule) -> Result<f64, QuadError> {
    let mut total = 0.0;
    for (x, w) in rule.points() {
        let v = f(x);
        if !v.is_finite() {
            return Err(QuadError::NonFinite { x, value: v });
        }
        total += w * v;
    }
    Ok(total)
}

/// Integrates over `[a, b]` with `cfg` and with `cfg.doubled()`; returns the
/// first value and the absolute change between the two.
pub fn integrate_checked<F: Fn(f64) -> f64>(f: F, cfg: &QuadConfig, a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    let v = integrate(&f, &cfg.build(a, b)?)?;
    let v2 = integrate(&f, &cfg.doubled().build(a, b)?)?;
    Ok((v, (v2 - v).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rules() {
        let r1 = gauss_legendre_rule(1).unwrap();
        assert_eq!(r1.nodes(), &[0.0]);
        assert!((r1.weights()[0] - 2.0).abs() < 1e-15);
        let r2 = gauss_legendre_rule(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((r2.nodes()[1] - s).abs() < 1e-15 && (r2.nodes()[0] + s).abs() < 1e-15);
        assert!((r2.weights()[0] - 1.0).abs() < 1e-15);
        assert!(gauss_legendre_rule(0).is_err());
        assert!(gauss_legendre_rule(129).is_err());
    }

    #[test]
    fn four_point_rule_integrates_x6() {
        let r = gauss_legendre_rule(4).unwrap();
        let v: f64 = r.nodes().iter().zip(r.weights()).map(|(x, w)| w * x.powi(6)).sum();
        assert!((v - 2.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_and_symmetry() {
        for n in [1, 2, 3, 7, 16, 33, 64, 128] {
            let r = gauss_legendre_rule(n).unwrap();
            let s: f64 = r.weights().iter().sum();
            assert!((s - 2.0).abs() <= 1e-13, "n = {n}: sum {s}");
            for i in 0..n {
                assert_eq!(r.nodes()[i], -r.nodes()[n - 1 - i]);
                assert!(r.weights()[i] > 0.0);
            }
        }
    }

    #[test]
    fn graded_partition() {
        let base = gauss_legendre_rule(4).unwrap();
        let one = graded_composite(0.0, 1.0, 1, 0.5, base.clone()).unwrap();
        assert_eq!(one.panels(), &[Panel { left: 0.0, right: 1.0 }]);
        let three = graded_composite(0.0, 1.0, 3, 0.5, base.clone()).unwrap();
        let p = three.panels();
        assert!((p[0].right - 1.0 / 7.0).abs() < 1e-15);
        assert!((p[1].right - 3.0 / 7.0).abs() < 1e-15);
        assert_eq!(p[2].right, 1.0);
        for w in p.windows(2) {
            assert_eq!(w[0].right, w[1].left);
        }
        assert!(graded_composite(1.0, 0.0, 3, 0.5, base.clone()).is_err());
        assert!(graded_composite(0.0, 1.0, 65, 0.5, base.clone()).is_err());
        assert!(graded_composite(0.0, 1.0, 3, 1.0, base).is_err());
    }

    #[test]
    fn sqrt_with_twenty_panels() {
        let rule = graded_composite(0.0, 1.0, 20, 0.5, gauss_legendre_rule(16).unwrap()).unwrap();
        let v = integrate(|x| x.sqrt(), &rule).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn default_rule_basics() {
        let rule = QuadConfig::default().build(0.0, 1.0).unwrap();
        assert!((integrate(|_| 1.0, &rule).unwrap() - 1.0).abs() < 1e-14);
        assert!((integrate(|x| x.powf(0.4), &rule).unwrap() - 1.0 / 1.4).abs() < 1e-10);
    }

    #[test]
    fn non_finite_reports_node() {
        let rule = QuadConfig::default().build(0.0, 1.0).unwrap();
        let err = integrate(|x| if x > 0.5 { f64::NAN } else { x }, &rule).unwrap_err();
        match err {
            QuadError::NonFinite { x, .. } => assert!(x > 0.5),
            other => panic!("{other:?}"),
        }
    }
}
