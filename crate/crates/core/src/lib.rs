//! Numerical toolkit for the two-divisor generalized Calabi ansatz.
//!
//! The homogeneous ansatz `u(x1, x2) = x1^((n+2)/n) v(t)` reduces the
//! non-archimedean Monge-Ampere equation
//! `det(D^2 u) (d1 u_1 + d2 u_2)^(n-2) = const` to a second order ODE in
//! `t = d1 x2 / (d2 x1)`. This crate provides
//!
//! - [`specfun`]: Gamma, Gauss hypergeometric `2F1` on `[0, 1]` and the
//!   profile integral `F(x) = ∫_1^x (1 - y^-2)^(-1/n) dy`;
//! - [`ode`]: the equivalent forms of the radial ODE, the first integral,
//!   the implicit solution, boundary series and adaptive integration;
//! - [`matching`]: the boundary value `w0` making the solution symmetric
//!   under `t -> 1/t`, from the Gamma-ratio formula and from shooting;
//! - [`potential`]: the reconstructed potential `u`, its Hessian, the
//!   Monge-Ampere residual and the metric diagnostics;
//! - [`cli`]: the `gcalabi` command line front end.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// tabulated constants and frozen reference values keep their published digits
#![allow(clippy::excessive_precision)]

pub mod cli;
pub mod error;
pub mod matching;
pub mod ode;
pub mod par;
pub mod potential;
pub mod quad;
pub mod rk;
pub mod roots;
pub mod series;
pub mod specfun;

pub use error::{Error, Result};
