//! Modified Legendre and modified Bernoulli families, the boundary lift and
//! constrained trial spaces.
//!
//! Family coefficients are accumulated in exact rational arithmetic and
//! converted to `f64` once; both the Rodrigues expansion and the Bernoulli
//! double sum cancel catastrophically in floating point at higher degree.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::linalg::{lu_solve, symmetric_eigenvalues, LinalgError, Matrix};
use crate::poly::Polynomial;

/// Largest Bernoulli index accepted.
pub const MAX_BERNOULLI: u32 = 20;
/// Largest modified Legendre index accepted.
pub const MAX_LEGENDRE: u32 = 30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error("modified Legendre polynomials start at n = 1 and stop at {MAX_LEGENDRE}, got {0}")]
    LegendreIndex(u32),
    #[error("Bernoulli index {0} exceeds {MAX_BERNOULLI}")]
    BernoulliIndex(u32),
    #[error("modified Bernoulli polynomials need m >= 2, got {0}")]
    ModifiedBernoulliIndex(u32),
    #[error("no boundary conditions given")]
    NoConditions,
    #[error("boundary conditions are dependent or contradictory")]
    SingularLift(#[source] LinalgError),
    #[error("trial space must have at least one raw basis member")]
    EmptyRequest,
    #[error("constraints remove every basis member: rank {rank} of {count}")]
    EmptyBasis { rank: usize, count: usize },
    #[error("domain [{a}, {b}] is not a proper interval")]
    BadDomain { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisFamily {
    ModifiedLegendre,
    ModifiedBernoulli,
}

impl BasisFamily {
    pub fn name(&self) -> &'static str {
        match self {
            BasisFamily::ModifiedLegendre => "legendre",
            BasisFamily::ModifiedBernoulli => "bernoulli",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "legendre" => Some(BasisFamily::ModifiedLegendre),
            "bernoulli" => Some(BasisFamily::ModifiedBernoulli),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCondition {
    pub location: Side,
    pub derivative_order: u32,
    pub value: f64,
}

impl BoundaryCondition {
    pub fn new(location: Side, derivative_order: u32, value: f64) -> Self {
        Self { location, derivative_order, value }
    }

    /// Applies the condition's functional to `p` on `[a, b]`.
    pub fn apply(&self, p: &Polynomial, a: f64, b: f64) -> f64 {
        let x = match self.location {
            Side::Left => a,
            Side::Right => b,
        };
        p.derivative(self.derivative_order).eval(x)
    }
}

/// How derivative boundary conditions enter the trial space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DerivativeBcMode {
    /// The homogeneous counterpart constrains every basis member.
    #[default]
    Constrain,
    /// Only the lift carries the condition; basis members are left raw.
    LiftOnly,
}

type RatPoly = Vec<BigRational>;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn trim(mut p: RatPoly) -> RatPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn to_f64_poly(p: &RatPoly) -> Polynomial {
    Polynomial::new(p.iter().map(|c| c.to_f64().expect("finite rational")).collect())
}

fn rat_eval_derivative(p: &RatPoly, order: u32, at_one: bool) -> BigRational {
    // at x = 0 only the `order` coefficient survives
    let mut acc = BigRational::zero();
    for (k, c) in p.iter().enumerate() {
        let k = k as u32;
        if k < order {
            continue;
        }
        if !at_one && k != order {
            continue;
        }
        let falling: BigInt = (0..order).fold(BigInt::one(), |f, i| f * BigInt::from(k - i));
        acc += c * BigRational::from_integer(falling);
    }
    acc
}

fn rational_legendre(n: u32) -> Result<RatPoly, BasisError> {
    if n == 0 || n > MAX_LEGENDRE {
        return Err(BasisError::LegendreIndex(n));
    }
    // (1/n!) d^n/dx^n (x^2 - x)^n = sum_k (-1)^(n-k) C(n,k) C(n+k,k) x^k
    let mut shifted: RatPoly = vec![BigRational::zero(); n as usize + 1];
    for k in 0..=n {
        let mut c = binomial(n, k) * binomial(n + k, k);
        if (n - k) % 2 == 1 {
            c = -c;
        }
        shifted[k as usize] = BigRational::from_integer(c);
    }
    shifted[0] -= rat(if n % 2 == 0 { 1 } else { -1 });
    // multiply by (x - 1)
    let mut out = vec![BigRational::zero(); shifted.len() + 1];
    for (k, c) in shifted.iter().enumerate() {
        out[k + 1] += c;
        out[k] -= c;
    }
    Ok(trim(out))
}

fn rational_bernoulli(m: u32) -> Result<RatPoly, BasisError> {
    if m > MAX_BERNOULLI {
        return Err(BasisError::BernoulliIndex(m));
    }
    let mut out = vec![BigRational::zero(); m as usize + 1];
    for n in 0..=m {
        let outer = BigRational::new(BigInt::one(), BigInt::from(n + 1));
        for k in 0..=n {
            let mut c = binomial(n, k);
            if k % 2 == 1 {
                c = -c;
            }
            let weight = &outer * BigRational::from_integer(c);
            // (x + k)^m = sum_j C(m,j) k^(m-j) x^j
            for j in 0..=m {
                let term = binomial(m, j) * num::pow(BigInt::from(k), (m - j) as usize);
                out[j as usize] += &weight * BigRational::from_integer(term);
            }
        }
    }
    Ok(trim(out))
}

fn rational_modified_bernoulli(m: u32) -> Result<RatPoly, BasisError> {
    if m < 2 {
        return Err(BasisError::ModifiedBernoulliIndex(m));
    }
    let mut b = rational_bernoulli(m)?;
    b[0] = BigRational::zero();
    Ok(trim(b))
}

/// `[P~_n(x) - (-1)^n] (x - 1)` with `P~_n` the shifted Legendre polynomial
/// from the Rodrigues formula; degree `n + 1`, zero at 0 and 1.
pub fn modified_legendre(n: u32) -> Result<Polynomial, BasisError> {
    Ok(to_f64_poly(&rational_legendre(n)?))
}

/// Classical Bernoulli polynomial from the explicit double sum.
pub fn bernoulli_polynomial(m: u32) -> Result<Polynomial, BasisError> {
    Ok(to_f64_poly(&rational_bernoulli(m)?))
}

/// `B_m(x) - B_m(0)`, zero at both ends of [0, 1] for `m >= 2`.
pub fn modified_bernoulli(m: u32) -> Result<Polynomial, BasisError> {
    Ok(to_f64_poly(&rational_modified_bernoulli(m)?))
}

fn raw_family(family: BasisFamily, count: usize) -> Result<Vec<RatPoly>, BasisError> {
    (0..count as u32)
        .map(|i| match family {
            BasisFamily::ModifiedLegendre => rational_legendre(i + 1),
            BasisFamily::ModifiedBernoulli => rational_modified_bernoulli(i + 2),
        })
        .collect()
}

/// Lowest-degree polynomial satisfying every condition on `[a, b]`;
/// degree `bcs.len() - 1`.
pub fn boundary_lift(bcs: &[BoundaryCondition], domain: (f64, f64)) -> Result<Polynomial, BasisError> {
    let (a, b) = domain;
    if bcs.is_empty() {
        return Err(BasisError::NoConditions);
    }
    if !(a < b) {
        return Err(BasisError::BadDomain { a, b });
    }
    let n = bcs.len();
    let mut m = Matrix::zeros(n, n);
    for (i, bc) in bcs.iter().enumerate() {
        for k in 0..n {
            let mut e = vec![0.0; k + 1];
            e[k] = 1.0;
            m[(i, k)] = bc.apply(&Polynomial::new(e), a, b);
        }
    }
    let rhs: Vec<f64> = bcs.iter().map(|bc| bc.value).collect();
    let c = lu_solve(&m, &rhs).map_err(BasisError::SingularLift)?;
    Ok(Polynomial::new(c))
}

/// Lift plus a constrained basis; candidate solutions are
/// `lift + sum a_j basis[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpace {
    lift: Polynomial,
    basis: Vec<Polynomial>,
    family: BasisFamily,
    raw_count: usize,
    active_constraints: Vec<BoundaryCondition>,
    domain: (f64, f64),
}

impl TrialSpace {
    pub fn lift(&self) -> &Polynomial {
        &self.lift
    }

    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn raw_count(&self) -> usize {
        self.raw_count
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Homogeneous constraints that were imposed on the raw family.
    pub fn active_constraints(&self) -> &[BoundaryCondition] {
        &self.active_constraints
    }

    /// `lift + sum coeffs[j] basis[j]` as a dense polynomial.
    pub fn combine(&self, coeffs: &[f64]) -> Polynomial {
        self.basis
            .iter()
            .zip(coeffs)
            .fold(self.lift.clone(), |acc, (b, &c)| acc.add(&b.scale(c)))
    }

    /// Gram (mass) matrix of the basis over the domain.
    pub fn gram(&self) -> Matrix {
        let (a, b) = self.domain;
        let n = self.dim();
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = self.basis[i].mul(&self.basis[j]).integral(a, b);
            }
        }
        g
    }

    pub fn gram_min_eigenvalue(&self) -> f64 {
        symmetric_eigenvalues(&self.gram())[0]
    }
}

/// Null space of a rational matrix (rows x cols) by exact row reduction.
fn rational_null_space(rows: &[Vec<BigRational>], cols: usize) -> (usize, Vec<Vec<BigRational>>) {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let rank = pivots.len();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][f].clone();
            }
            v
        })
        .collect();
    (rank, basis)
}

/// Builds the trial space for `count` raw family members on `domain`.
///
/// Members are defined on [0, 1] and mapped affinely. Homogeneous
/// constraints the raw family does not already satisfy are imposed by
/// taking exact rational null-space combinations, so the dimension is
/// `count - rank(C)`.
pub fn build_trial_space(
    family: BasisFamily,
    count: usize,
    bcs: &[BoundaryCondition],
    domain: (f64, f64),
    mode: DerivativeBcMode,
) -> Result<TrialSpace, BasisError> {
    let (a, b) = domain;
    if !(a < b) {
        return Err(BasisError::BadDomain { a, b });
    }
    if count == 0 {
        return Err(BasisError::EmptyRequest);
    }
    let lift = boundary_lift(bcs, domain)?;
    let raw = raw_family(family, count)?;

    let mut rows = Vec::new();
    let mut active = Vec::new();
    for bc in bcs {
        if mode == DerivativeBcMode::LiftOnly && bc.derivative_order > 0 {
            continue;
        }
        let at_one = bc.location == Side::Right;
        let row: Vec<BigRational> =
            raw.iter().map(|p| rat_eval_derivative(p, bc.derivative_order, at_one)).collect();
        if row.iter().all(Zero::is_zero) {
            continue;
        }
        rows.push(row);
        active.push(BoundaryCondition { value: 0.0, ..*bc });
    }

    let combos: Vec<Vec<BigRational>> = if rows.is_empty() {
        (0..count)
            .map(|i| (0..count).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect()
    } else {
        let (rank, ns) = rational_null_space(&rows, count);
        if ns.is_empty() {
            return Err(BasisError::EmptyBasis { rank, count });
        }
        ns
    };

    let length = b - a;
    let basis = combos
        .iter()
        .map(|w| {
            let deg = w.iter().zip(&raw).filter(|(c, _)| !c.is_zero()).map(|(_, p)| p.len()).max().unwrap_or(0);
            let mut acc: RatPoly = vec![BigRational::zero(); deg];
            for (c, p) in w.iter().zip(&raw) {
                if c.is_zero() {
                    continue;
                }
                for (k, pk) in p.iter().enumerate() {
                    acc[k] += c * pk;
                }
            }
            to_f64_poly(&trim(acc)).rescale_argument(length).shift(-a)
        })
        .collect();

    Ok(TrialSpace { lift, basis, family, raw_count: count, active_constraints: active, domain })
}

impl BasisFamily {
    pub fn all() -> [BasisFamily; 2] {
        [BasisFamily::ModifiedLegendre, BasisFamily::ModifiedBernoulli]
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn dirichlet(l: f64, r: f64) -> Vec<BoundaryCondition> {
        vec![BoundaryCondition::new(Side::Left, 0, l), BoundaryCondition::new(Side::Right, 0, r)]
    }

    #[test]
    fn legendre_low_orders() {
        assert_eq!(modified_legendre(1).unwrap().coeffs(), &[0.0, -2.0, 2.0]);
        assert_eq!(modified_legendre(2).unwrap().coeffs(), &[0.0, 6.0, -12.0, 6.0]);
        assert!(matches!(modified_legendre(0), Err(BasisError::LegendreIndex(0))));
    }

    #[test]
    fn bernoulli_low_orders() {
        assert_eq!(bernoulli_polynomial(0).unwrap().coeffs(), &[1.0]);
        assert_eq!(bernoulli_polynomial(1).unwrap().coeffs(), &[-0.5, 1.0]);
        assert_eq!(bernoulli_polynomial(2).unwrap().coeffs(), &[1.0 / 6.0, -1.0, 1.0]);
        assert_eq!(modified_bernoulli(2).unwrap().coeffs(), &[0.0, -1.0, 1.0]);
        assert_eq!(modified_bernoulli(3).unwrap().coeffs(), &[0.0, 0.5, -1.5, 1.0]);
        assert!(matches!(modified_bernoulli(1), Err(BasisError::ModifiedBernoulliIndex(1))));
        assert!(matches!(bernoulli_polynomial(21), Err(BasisError::BernoulliIndex(21))));
    }

    #[test]
    fn bernoulli_difference_identity() {
        // B_m(x+1) - B_m(x) = m x^(m-1)
        for m in 1..=10u32 {
            let b = bernoulli_polynomial(m).unwrap();
            for &x in &[0.0, 0.3, 0.7] {
                let lhs = b.eval(x + 1.0) - b.eval(x);
                let rhs = m as f64 * f64::powi(x, m as i32 - 1);
                assert!((lhs - rhs).abs() < 1e-12, "m = {m}, x = {x}");
            }
        }
    }

    #[test]
    fn lifts() {
        assert_eq!(boundary_lift(&dirichlet(-1.0, 0.0), (0.0, 1.0)).unwrap().coeffs(), &[-1.0, 1.0]);
        assert_eq!(boundary_lift(&dirichlet(1.0, 2.0), (0.0, 1.0)).unwrap().coeffs(), &[1.0, 1.0]);
        let dup = vec![BoundaryCondition::new(Side::Left, 0, 1.0), BoundaryCondition::new(Side::Left, 0, 2.0)];
        assert!(matches!(boundary_lift(&dup, (0.0, 1.0)), Err(BasisError::SingularLift(_))));
        assert!(matches!(boundary_lift(&[], (0.0, 1.0)), Err(BasisError::NoConditions)));
    }

    #[test]
    fn dirichlet_space_is_unchanged() {
        let ts = build_trial_space(BasisFamily::ModifiedLegendre, 3, &dirichlet(-1.0, 0.0), (0.0, 1.0), DerivativeBcMode::Constrain).unwrap();
        assert_eq!(ts.dim(), 3);
        assert!(ts.active_constraints().is_empty());
        for (i, p) in ts.basis().iter().enumerate() {
            assert_eq!(*p, modified_legendre(i as u32 + 1).unwrap());
        }
        let ts = build_trial_space(BasisFamily::ModifiedBernoulli, 3, &dirichlet(0.0, 0.0), (0.0, 1.0), DerivativeBcMode::Constrain).unwrap();
        assert!(ts.lift().is_zero());
        assert_eq!(ts.basis()[2], modified_bernoulli(4).unwrap());
    }

    #[test]
    fn everything_constrained_is_an_error() {
        let bcs = vec![
            BoundaryCondition::new(Side::Left, 0, 0.0),
            BoundaryCondition::new(Side::Left, 1, 0.0),
            BoundaryCondition::new(Side::Right, 0, 0.0),
            BoundaryCondition::new(Side::Right, 1, 0.0),
        ];
        let err = build_trial_space(BasisFamily::ModifiedLegendre, 2, &bcs, (0.0, 1.0), DerivativeBcMode::Constrain).unwrap_err();
        assert!(matches!(err, BasisError::EmptyBasis { rank: 2, count: 2 }));
        assert!(build_trial_space(BasisFamily::ModifiedLegendre, 0, &bcs, (0.0, 1.0), DerivativeBcMode::Constrain).is_err());
    }

    #[test]
    fn mapped_domain_keeps_endpoint_zeros() {
        let ts = build_trial_space(BasisFamily::ModifiedBernoulli, 4, &dirichlet(1.0, 3.0), (1.0, 3.0), DerivativeBcMode::Constrain).unwrap();
        for p in ts.basis() {
            assert!(p.eval(1.0).abs() < 1e-12 && p.eval(3.0).abs() < 1e-12);
        }
        assert!((ts.lift().eval(1.0) - 1.0).abs() < 1e-12 && (ts.lift().eval(3.0) - 3.0).abs() < 1e-12);
    }
}
