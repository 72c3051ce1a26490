//! The symmetric global solution.
//!
//! A solution with `w(t) = t w(1/t)` exists on all of `(0, ∞)` exactly when
//! `w'(1) = w(1)/2`. Two independent routes determine the boundary value
//! `w0` achieving this:
//!
//! - the Legendre transform of `𝔴(s)` turns `w(1)` and `w'(1)` into
//!   closed forms (`w(1) = p*`, `w'(1) = w0 g(1)`), giving `w0` as a ratio of
//!   Gamma values;
//! - shooting on `φ(w0) = w'(1) - w(1)/2` with the integrated ODE.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::ode::{self, RadialSolution};
use crate::roots::{brent, BrentOptions};
use crate::specfun::{gamma_fn, gauss_at_one, hyp2f1, HypParams};

/// Default shooting bracket for `w0`.
pub const DEFAULT_BRACKET: (f64, f64) = (0.2, 5.0);

/// Start of the integration used to evaluate the shooting function.
pub const SHOOT_T_START: f64 = 1e-4;

/// Right end `p* = (n / (2(n-1) w0^2))^(1/n)` of the slope range of `𝔴`.
pub fn p_star(n: u32, w0: f64) -> f64 {
    ode::slope_limit(n, w0)
}

/// Rescaled Legendre transform `g(y) = 𝔴*(p* y) / w0` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LegendreProfile {
    pub n: u32,
    pub w0: f64,
    pub p_star: f64,
}

impl LegendreProfile {
    pub fn new(n: u32, w0: f64) -> Result<Self> {
        if n < 2 {
            return domain(format!("n must be >= 2, got {n}"));
        }
        if !(w0 > 0.0) {
            return domain(format!("w0 must be positive, got {w0}"));
        }
        Ok(Self {
            n,
            w0,
            p_star: p_star(n, w0),
        })
    }

    /// `g(y) = -2F1[1/2, -1/n; (n-1)/n; y^n] + (p*/w0) y`.
    pub fn eval(&self, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&y) {
            return domain(format!("g is defined on [0, 1], got y = {y}"));
        }
        let nf = self.n as f64;
        let (a, b, c) = (0.5, -1.0 / nf, (nf - 1.0) / nf);
        let hyp = if y == 1.0 {
            gauss_at_one(a, b, c)?
        } else {
            hyp2f1(HypParams::new(a, b, c, y.powi(self.n as i32)))?
        };
        Ok(-hyp + self.p_star / self.w0 * y)
    }

    /// `𝔴*(p)` for `p ∈ [0, p*]`.
    pub fn conjugate(&self, p: f64) -> Result<f64> {
        Ok(self.w0 * self.eval(p / self.p_star)?)
    }
}

/// `g(y)` for the given model.
pub fn legendre_g(y: f64, n: u32, w0: f64) -> Result<f64> {
    LegendreProfile::new(n, w0)?.eval(y)
}

/// `Γ(1 - 1/n) √π / Γ(1/2 - 1/n)`, zero for `n = 2`.
pub fn gamma_ratio(n: u32) -> Result<f64> {
    if n < 2 {
        return domain(format!("n must be >= 2, got {n}"));
    }
    if n == 2 {
        return Ok(0.0);
    }
    let nf = n as f64;
    Ok(gamma_fn(1.0 - 1.0 / nf)? * PI.sqrt() / gamma_fn(0.5 - 1.0 / nf)?)
}

/// `(w(1), w'(1))` read off the Legendre transform: `(p*, w0 g(1))`.
pub fn w_boundary_values(n: u32, w0: f64) -> Result<(f64, f64)> {
    let prof = LegendreProfile::new(n, w0)?;
    Ok((prof.p_star, w0 * prof.eval(1.0)?))
}

/// Closed-form matching value
/// `w0 = (1/2)^((n+1)/(n+2)) (n/(n-1))^(1/(n+2)) (Γ(1/2-1/n) / (√π Γ(1-1/n)))^(n/(n+2))`.
pub fn closed_form_w0(n: u32) -> Result<f64> {
    if n <= 2 {
        return Err(Error::NoPositiveSolution { n });
    }
    let nf = n as f64;
    let ratio = 1.0 / gamma_ratio(n)?;
    Ok(0.5f64.powf((nf + 1.0) / (nf + 2.0))
        * (nf / (nf - 1.0)).powf(1.0 / (nf + 2.0))
        * ratio.powf(nf / (nf + 2.0)))
}

/// Local error tolerance used for the integrations inside shooting.
fn shooting_ode_tol(tol: f64) -> f64 {
    (tol * 1e-2).clamp(1e-13, 1e-9)
}

/// Shooting function `φ(w0) = w'(1) - w(1)/2` from the integrated ODE.
pub fn shooting_function(n: u32, w0: f64, ode_tol: f64) -> Result<f64> {
    let sol = ode::integrate_w(n, w0, SHOOT_T_START, 1.0, ode_tol)?;
    let end = sol.samples[sol.samples.len() - 1];
    Ok(end.wp - 0.5 * end.w)
}

/// Both routes to the matching value, with the state at `t = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchResult {
    pub n: u32,
    pub w0_closed: f64,
    pub w0_shot: f64,
    pub w_at_one: f64,
    pub wp_at_one: f64,
    /// `w'(1) - w(1)/2` at `w0_shot`.
    pub residual: f64,
}

impl MatchResult {
    pub fn route_gap(&self) -> f64 {
        (self.w0_closed - self.w0_shot).abs()
    }
}

/// Solve `φ(w0) = 0` inside `bracket`. `tol` sets the integration accuracy
/// (`|φ|` at the root is of that order); the root itself is converged to
/// the bracket width.
pub fn shoot_w0(n: u32, bracket: (f64, f64), tol: f64) -> Result<MatchResult> {
    if n < 2 {
        return domain(format!("n must be >= 2, got {n}"));
    }
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return domain(format!(
            "bracket must satisfy 0 < lo < hi, got ({lo}, {hi})"
        ));
    }
    let ode_tol = shooting_ode_tol(tol);
    let phi = |w0: f64| shooting_function(n, w0, ode_tol);
    // Converge on the bracket rather than stopping at |φ| <= tol: the
    // continuation past t = 1 amplifies any error in w0 by orders of magnitude.
    let opts = BrentOptions {
        xtol: 1e-14,
        ftol: 0.0,
        max_iter: 200,
    };
    let w0_shot = match brent(phi, lo, hi, opts) {
        Ok(w) => w,
        Err(Error::NoSignChange { fa, fb, .. }) if n == 2 && fa > 0.0 && fb > 0.0 => {
            return Err(Error::NoPositiveSolution { n })
        }
        Err(e) => return Err(e),
    };
    let sol = ode::integrate_w(n, w0_shot, SHOOT_T_START, 1.0, ode_tol)?;
    let end = sol.samples[sol.samples.len() - 1];
    let w0_closed = closed_form_w0(n)?;
    Ok(MatchResult {
        n,
        w0_closed,
        w0_shot,
        w_at_one: end.w,
        wp_at_one: end.wp,
        residual: end.wp - 0.5 * end.w,
    })
}

/// The symmetric solution on `[t_min, 1/t_min]`: integrated on
/// `[t_min, 1]` from the shot `w0`, continued to `[1, 1/t_min]` by
/// `w(t) = t w(1/t)`.
pub fn matched_solution(n: u32, t_min: f64, tol: f64) -> Result<RadialSolution> {
    if n < 3 {
        return Err(Error::NoPositiveSolution { n });
    }
    if !(t_min > 0.0 && t_min < 1.0) {
        return domain(format!("t_min must lie in (0, 1), got {t_min}"));
    }
    let m = shoot_w0(n, DEFAULT_BRACKET, tol)?;
    matched_solution_from(n, m.w0_shot, t_min, shooting_ode_tol(tol))
}

/// As [`matched_solution`] for an already known matching value.
pub fn matched_solution_from(n: u32, w0: f64, t_min: f64, ode_tol: f64) -> Result<RadialSolution> {
    let left = ode::integrate_w(n, w0, t_min, 1.0, ode_tol)?;
    let right = ode::symmetry_reflect(&left);
    let mut samples = left.samples;
    samples.extend(right.samples.into_iter().skip(1));
    Ok(RadialSolution {
        n,
        w0,
        samples,
        tol: left.tol,
        symmetric: true,
    })
}

/// Largest `|w(t) - t w(1/t)|` for `t` in `[1, 1/t_min]`, where the left side
/// comes from integrating straight through `t = 1` rather than reflecting.
pub fn symmetry_defect(n: u32, w0: f64, t_min: f64, ode_tol: f64) -> Result<f64> {
    let direct = ode::integrate_w(n, w0, t_min, 1.0 / t_min, ode_tol)?;
    let left = ode::integrate_w(n, w0, t_min, 1.0, ode_tol)?;
    let mut worst: f64 = 0.0;
    for s in direct.samples.iter().filter(|s| s.t >= 1.0) {
        let back = left.eval((1.0 / s.t).max(t_min))?;
        worst = worst.max((s.w - s.t * back.w).abs());
    }
    Ok(worst)
}
