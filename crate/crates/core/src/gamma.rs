//! Gamma function via a Lanczos approximation (g = 7, nine coefficients)
//! with reflection below 1/2.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GammaError {
    #[error("gamma has a pole at {0}")]
    Pole(f64),
    #[error("gamma({0}) overflows (argument above 170)")]
    Overflow(f64),
    #[error("gamma argument is not finite: {0}")]
    NotFinite(f64),
}

/// Largest argument accepted by [`gamma`].
pub const GAMMA_MAX_ARG: f64 = 170.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const REDUCE_ABOVE: f64 = 12.0;

fn is_nonpositive_integer(z: f64) -> bool {
    z <= 0.0 && z == z.floor()
}

/// sin(pi * z) with argument reduction so that integer `z` gives an exact zero.
fn sin_pi(z: f64) -> f64 {
    let r = z - 2.0 * (z / 2.0).floor(); // r in [0, 2)
    let (r, sign) = if r >= 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    sign * (PI * r).sin()
}

fn lanczos(z: f64) -> f64 {
    // valid for z >= 0.5
    let z = z - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // t^(z+1/2) split in two halves so large arguments do not overflow early.
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * acc
}

/// Gamma function, relative error around 1e-15 on (0, 170].
pub fn gamma(z: f64) -> Result<f64, GammaError> {
    if !z.is_finite() {
        return Err(GammaError::NotFinite(z));
    }
    if is_nonpositive_integer(z) {
        return Err(GammaError::Pole(z));
    }
    if z > GAMMA_MAX_ARG {
        return Err(GammaError::Overflow(z));
    }
    if z == z.floor() && z <= 23.0 {
        // exact factorial for small integers
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < z {
            acc *= k;
            k += 1.0;
        }
        return Ok(acc);
    }
    if z < 0.5 {
        let s = sin_pi(z);
        Ok(PI / (s * lanczos(1.0 - z)))
    } else if z > REDUCE_ABOVE {
        // Gamma(z) = Gamma(z - k) (z - 1) ... (z - k): the rounding of the
        // product grows far slower than that of t^(z + 1/2) at large z
        let k = (z - REDUCE_ABOVE).ceil();
        let mut acc = lanczos(z - k);
        let mut j = 1.0;
        while j <= k {
            acc *= z - j;
            j += 1.0;
        }
        Ok(acc)
    } else {
        Ok(lanczos(z))
    }
}

/// 1/Gamma(z), defined as zero at the poles.
pub fn recip_gamma(z: f64) -> Result<f64, GammaError> {
    match gamma(z) {
        Ok(g) => Ok(1.0 / g),
        Err(GammaError::Pole(_)) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Gamma(a) / Gamma(b); zero when `b` is a pole.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64, GammaError> {
    Ok(gamma(a)? * recip_gamma(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_integers_are_factorials() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_eq!(gamma(2.0).unwrap(), 1.0);
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        assert_eq!(gamma(11.0).unwrap(), 3_628_800.0);
    }

    #[test]
    fn half_is_sqrt_pi() {
        let v = gamma(0.5).unwrap();
        assert!((v - PI.sqrt()).abs() <= 1e-15 * PI.sqrt());
    }

    #[test]
    fn poles_and_overflow() {
        assert_eq!(gamma(0.0), Err(GammaError::Pole(0.0)));
        assert_eq!(gamma(-3.0), Err(GammaError::Pole(-3.0)));
        assert!(matches!(gamma(170.5), Err(GammaError::Overflow(_))));
        assert!(matches!(gamma(f64::NAN), Err(GammaError::NotFinite(_))));
        assert_eq!(recip_gamma(-2.0).unwrap(), 0.0);
    }

    #[test]
    fn reflection_region() {
        // Gamma(-0.5) = -2 sqrt(pi)
        let v = gamma(-0.5).unwrap();
        let want = -2.0 * PI.sqrt();
        assert!((v - want).abs() <= 1e-14 * want.abs());
    }

    #[test]
    fn recurrence_holds() {
        for &z in &[0.3, 1.7, 4.25, 17.9, 60.1, 120.4] {
            let lhs = gamma(z + 1.0).unwrap();
            let rhs = z * gamma(z).unwrap();
            assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs(), "z = {z}");
        }
    }
}
