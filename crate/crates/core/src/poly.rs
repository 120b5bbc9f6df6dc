//! Dense real polynomials in ascending-power form.

use std::fmt;

use crate::fracpoly::FracSeries;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self, m: u32) -> Self {
        let m = m as usize;
        if self.coeffs.len() <= m {
            return Self::zero();
        }
        let coeffs = (m..self.coeffs.len())
            .map(|k| {
                let falling: f64 = (0..m).map(|i| (k - i) as f64).product();
                falling * self.coeffs[k]
            })
            .collect();
        Self::new(coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.coeffs.get(k).copied().unwrap_or(0.0) + other.coeffs.get(k).copied().unwrap_or(0.0))
            .collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// `q(x) = p(x / length)`.
    pub fn rescale_argument(&self, length: f64) -> Self {
        let mut f = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c * f;
                f /= length;
                v
            })
            .collect();
        Self::new(coeffs)
    }

    /// `q(x) = p(x + h)` (Taylor shift).
    pub fn shift(&self, h: f64) -> Self {
        if h == 0.0 {
            return self.clone();
        }
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                c[j] += h * c[j + 1];
            }
        }
        Self::new(c)
    }

    /// Exact integral over [a, b].
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let e = (k + 1) as i32;
                c * (b.powi(e) - a.powi(e)) / e as f64
            })
            .sum()
    }

    pub fn to_series(&self) -> FracSeries {
        FracSeries::from_poly_coeffs(&self.coeffs)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let m = c.abs();
            let m = if (1e-4..1e6).contains(&m) { format!("{m}") } else { format!("{m:e}") };
            match k {
                0 => write!(f, "{m}")?,
                1 => write!(f, "{m}*x")?,
                _ => write!(f, "{m}*x^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_and_evaluates() {
        let p = Polynomial::new(vec![1.0, -2.0, 1.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval(1.0), 0.0);
        assert_eq!(p.eval(3.0), 4.0);
    }

    #[test]
    fn derivative_and_shift() {
        let p = Polynomial::new(vec![0.0, 1.0, -1.0]);
        assert_eq!(p.derivative(1), Polynomial::new(vec![1.0, -2.0]));
        assert!(p.derivative(3).is_zero());
        // (x+1)^2 = 1 + 2x + x^2
        let sq = Polynomial::new(vec![0.0, 0.0, 1.0]).shift(1.0);
        assert_eq!(sq, Polynomial::new(vec![1.0, 2.0, 1.0]));
    }

    #[test]
    fn integral_exact() {
        let p = Polynomial::new(vec![0.0, 0.0, 1.0]);
        assert!((p.integral(0.0, 1.0) - 1.0 / 3.0).abs() < 1e-16);
    }
}
