//! Weighted-residual solvers for nonlinear fractional-order two-point
//! boundary value problems.
//!
//! Trial solutions are polynomials `lift + sum a_j theta_j` built from
//! modified Legendre or modified Bernoulli families. Caputo derivatives of
//! the trial functions are applied exactly through the monomial rule, the
//! weighted-residual integrals use graded Gauss-Legendre quadrature, and the
//! resulting nonlinear systems are solved by damped Newton iteration with an
//! analytic Jacobian.

pub mod basis;
pub mod expr;
pub mod fracpoly;
pub mod gamma;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod poly;
pub mod quadrature;
pub mod wrm;
