//! The homogeneous potential `u(x1, x2) = x1^((n+2)/n) v(t)`,
//! `t = d1 x2 / (d2 x1)`, on the logarithmic base quadrant, and the
//! diagnostics built from it.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::ode::{self, RadialSolution, SeriesExpansion};
use crate::par;
use crate::series;

/// Complex dimension and the two divisor degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelParams {
    pub n: u32,
    pub d1: u32,
    pub d2: u32,
}

impl ModelParams {
    pub fn new(n: u32, d1: u32, d2: u32) -> Result<Self> {
        if n < 3 {
            return domain(format!("model needs n >= 3, got {n}"));
        }
        if d1 < 1 || d2 < 1 {
            return domain(format!(
                "divisor degrees must be positive, got ({d1}, {d2})"
            ));
        }
        Ok(Self { n, d1, d2 })
    }

    /// The same model with the roles of the two divisors exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            n: self.n,
            d1: self.d2,
            d2: self.d1,
        }
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    fn ratio(&self) -> f64 {
        self.d1 as f64 / self.d2 as f64
    }

    /// Homogeneity degree `(n+2)/n` of `u`.
    pub fn degree(&self) -> f64 {
        (self.nf() + 2.0) / self.nf()
    }

    /// `t = d1 x2 / (d2 x1)`.
    pub fn t_of(&self, x1: f64, x2: f64) -> f64 {
        self.ratio() * x2 / x1
    }

    /// Right side `2n / ((n+2)^2 (n-1)) (d1/d2)^2 d1^(n-2)` of the Monge-Ampere equation.
    pub fn nama_const(&self) -> f64 {
        let nf = self.nf();
        2.0 * nf / ((nf + 2.0).powi(2) * (nf - 1.0))
            * self.ratio().powi(2)
            * (self.d1 as f64).powi(self.n as i32 - 2)
    }
}

/// Constants of the model for a given boundary value `w0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizationConstants {
    pub nama_const: f64,
    /// Volume form constant without the intersection number `∫_Y c1(L0)^(n-2)`.
    pub k0_reduced: f64,
    pub v0: f64,
    pub a: f64,
}

impl NormalizationConstants {
    pub fn new(params: &ModelParams, w0: f64) -> Result<Self> {
        let (v0, a) = v0_a(params.n, w0)?;
        let nf = params.nf();
        let k0_reduced = 2.0 * nf * nf / ((nf + 2.0).powi(2) * (4.0 * PI).powi(2))
            * params.ratio().powi(2)
            * (params.d1 as f64).powi(params.n as i32 - 2);
        Ok(Self {
            nama_const: params.nama_const(),
            k0_reduced,
            v0,
            a,
        })
    }
}

/// `v0 = (n w0/(n+2))^((n+2)/n)`, `a = (n/(n+2))^(2/n) w0^(-(n+2)/(n(n-1)))`.
pub fn v0_a(n: u32, w0: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return domain(format!("n must be >= 2, got {n}"));
    }
    if !(w0 > 0.0) {
        return domain(format!("w0 must be positive, got {w0}"));
    }
    let nf = n as f64;
    let v0 = (nf * w0 / (nf + 2.0)).powf((nf + 2.0) / nf);
    let a = (nf / (nf + 2.0)).powf(2.0 / nf) * w0.powf(-(nf + 2.0) / (nf * (nf - 1.0)));
    Ok((v0, a))
}

/// `u`, its gradient and Hessian at one base point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialSample {
    pub x1: f64,
    pub x2: f64,
    pub t: f64,
    pub u: f64,
    pub du: [f64; 2],
    pub hess: [[f64; 2]; 2],
}

impl PotentialSample {
    pub fn det(&self) -> f64 {
        self.hess[0][0] * self.hess[1][1] - self.hess[0][1] * self.hess[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.hess[0][0] + self.hess[1][1]
    }

    /// `d1 ∂u/∂x1 + d2 ∂u/∂x2`.
    pub fn class_term(&self, params: &ModelParams) -> f64 {
        params.d1 as f64 * self.du[0] + params.d2 as f64 * self.du[1]
    }

    pub fn grad_norm(&self) -> f64 {
        self.du[0].hypot(self.du[1])
    }

    /// Spectral norm of the Hessian.
    pub fn hess_norm(&self) -> f64 {
        let [[a, b], [_, c]] = self.hess;
        let mid = 0.5 * (a + c);
        let rad = (0.5 * (a - c)).hypot(b);
        (mid + rad).abs().max((mid - rad).abs())
    }
}

/// Potential data at `(x1, x2)` from `(v, v', v'')` at `t`.
pub fn potential_from_v(
    params: &ModelParams,
    x1: f64,
    x2: f64,
    v: f64,
    vp: f64,
    vpp: f64,
) -> PotentialSample {
    let nf = params.nf();
    let r = params.ratio();
    let t = params.t_of(x1, x2);
    let alpha = params.degree();
    let p1 = x1.powf(2.0 / nf);
    let p2 = x1.powf(2.0 / nf - 1.0);
    let h11 = p2 * (2.0 * (nf + 2.0) / (nf * nf) * v - 4.0 * t / nf * vp + t * t * vpp);
    let h12 = r * (2.0 / nf * vp - t * vpp) * p2;
    let h22 = r * r * p2 * vpp;
    PotentialSample {
        x1,
        x2,
        t,
        u: x1.powf(alpha) * v,
        du: [(alpha * v - t * vp) * p1, r * vp * p1],
        hess: [[h11, h12], [h12, h22]],
    }
}

/// Evaluate the potential from a radial solution. `t` must lie inside the
/// solution's grid; there is no extrapolation.
pub fn sample_potential(
    params: &ModelParams,
    sol: &RadialSolution,
    x1: f64,
    x2: f64,
) -> Result<PotentialSample> {
    if !(x1 > 0.0 && x2 > 0.0) {
        return domain(format!(
            "base point must be in the open quadrant, got ({x1}, {x2})"
        ));
    }
    let rs = sol.eval(params.t_of(x1, x2))?;
    let (v, vp, vpp) = ode::v_derivatives(rs.w, rs.wp, rs.wpp, params.n);
    Ok(potential_from_v(params, x1, x2, v, vp, vpp))
}

/// `det(D^2 u) (d1 u_1 + d2 u_2)^(n-2) - const`.
pub fn nama_residual(sample: &PotentialSample, params: &ModelParams) -> f64 {
    sample.det() * sample.class_term(params).powi(params.n as i32 - 2) - params.nama_const()
}

/// Residual divided by the right-hand constant.
pub fn nama_relative_residual(sample: &PotentialSample, params: &ModelParams) -> f64 {
    nama_residual(sample, params) / params.nama_const()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KahlerFlags {
    pub hess_positive: bool,
    pub class_positive: bool,
}

impl KahlerFlags {
    pub fn all(&self) -> bool {
        self.hess_positive && self.class_positive
    }
}

pub fn kahler_flags(sample: &PotentialSample, params: &ModelParams) -> KahlerFlags {
    KahlerFlags {
        hess_positive: sample.trace() > 0.0 && sample.det() > 0.0,
        class_positive: sample.class_term(params) > 0.0,
    }
}

/// Tangent cone metric `g∞ = u_ij dx_i dx_j`, up to a constant.
pub fn hessian_metric(sample: &PotentialSample) -> [[f64; 2]; 2] {
    sample.hess
}

/// Coefficients `a_k` of `v(t) = (1-t)^((n+2)/n) Σ a_k (t/(1-t))^(kn/(n-1))`,
/// composed from the `𝔴` series through `v = (n 𝔴/(n+2))^((n+2)/n)`.
pub fn expansion_coefficients(expansion: &SeriesExpansion) -> Vec<f64> {
    let nf = expansion.n as f64;
    let alpha = (nf + 2.0) / nf;
    let scale = (nf / (nf + 2.0)).powf(alpha);
    series::powf(&expansion.coeffs, alpha)
        .into_iter()
        .map(|c| scale * c)
        .collect()
}

/// Truncated expansion of `u` for `1 << x2 << x1`:
/// `u ≈ Σ_{k<=order} a_k x̃1^((n+2)/n - kn/(n-1)) (d1 x2/d2)^(kn/(n-1))`,
/// `x̃1 = x1 - (d1/d2) x2`.
pub fn boundary_expansion_u(
    params: &ModelParams,
    expansion: &SeriesExpansion,
    x1: f64,
    x2: f64,
    order: usize,
) -> Result<f64> {
    if order < 1 || order > expansion.order {
        return domain(format!(
            "expansion order must lie in [1, {}], got {order}",
            expansion.order
        ));
    }
    if expansion.n != params.n {
        return domain("series dimension differs from model dimension");
    }
    let r = params.ratio();
    let xt = x1 - r * x2;
    if !(xt > 0.0) {
        return domain(format!("expansion needs x1 > (d1/d2) x2, got ({x1}, {x2})"));
    }
    let nf = params.nf();
    let m = nf / (nf - 1.0);
    let alpha = params.degree();
    let y = r * x2;
    let coeffs = expansion_coefficients(&expansion.truncated(order));
    Ok(coeffs
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let e = k as f64 * m;
            a * xt.powf(alpha - e) * y.powf(e)
        })
        .sum())
}

/// Characteristic sizes at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthScales {
    /// `|D^2 u|^(1/2)`, the size of the torus fibres.
    pub torus_diam: f64,
    /// `(d1 u_1 + d2 u_2)^(1/2)`, the size of the compact fibres.
    pub fiber_diam: f64,
    /// `|x|^((n+2)/(2n))`, distance to the origin.
    pub dist: f64,
    /// Volume growth exponent `4n/(n+2)` in terms of distance.
    pub vol_exponent: f64,
}

pub fn length_scales(params: &ModelParams, sample: &PotentialSample) -> LengthScales {
    let nf = params.nf();
    LengthScales {
        torus_diam: sample.hess_norm().sqrt(),
        fiber_diam: sample.class_term(params).sqrt(),
        dist: sample.x1.hypot(sample.x2).powf((nf + 2.0) / (2.0 * nf)),
        vol_exponent: 4.0 * nf / (nf + 2.0),
    }
}

/// Residual of `u'' u'^(n-1) = (n+1)^n / n^(n+1)` for `u = x^((n+1)/n)`.
pub fn calabi_ansatz_m1_residual(n: u32, x: f64) -> f64 {
    let nf = n as f64;
    let up = (nf + 1.0) / nf * x.powf(1.0 / nf);
    let upp = (nf + 1.0) / (nf * nf) * x.powf(1.0 / nf - 1.0);
    upp * up.powi(n as i32 - 1) - (nf + 1.0).powi(n as i32) / nf.powi(n as i32 + 1)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len()) as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in lx.iter().zip(&ly) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Base points on a log grid: `x1` over `[x1_lo, x1_hi]`, `t` over `[t_lo, t_hi]`.
pub fn log_grid(
    params: &ModelParams,
    x1_range: (f64, f64),
    t_range: (f64, f64),
    size: usize,
) -> Vec<(f64, f64)> {
    let logspace = |(lo, hi): (f64, f64), k: usize| {
        if size == 1 {
            lo
        } else {
            lo * (hi / lo).powf(k as f64 / (size - 1) as f64)
        }
    };
    let mut pts = Vec::with_capacity(size * size);
    for i in 0..size {
        let x1 = logspace(x1_range, i);
        for j in 0..size {
            let t = logspace(t_range, j);
            pts.push((x1, t * x1 / params.ratio()));
        }
    }
    pts
}

/// Samples at many points; runs on the rayon pool with the `parallel` feature.
pub fn sweep(
    params: &ModelParams,
    sol: &RadialSolution,
    points: &[(f64, f64)],
) -> Result<Vec<PotentialSample>> {
    par::map(points, |&(x1, x2)| sample_potential(params, sol, x1, x2))
        .into_iter()
        .collect()
}
