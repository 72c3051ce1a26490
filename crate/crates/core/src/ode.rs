//! The radial ODE in its equivalent forms.
//!
//! With `w = (n+2)/n v^(n/(n+2))` the reduced Monge-Ampere equation reads
//!
//! ```text
//! w'' w^3 (w + (1-t) w')^(n-2) = 1/(n-1)
//! ```
//!
//! and with `s = 1/(1-t)`, `𝔴(s) = w(t)/(1-t)` it becomes
//! `d/ds (𝔴')^(n-1) = 𝔴^-3`, which has the first integral
//! `(n-1)/n 𝔴'^n + 1/(2𝔴^2) = 1/(2 w0^2)`. The boundary at `t = 0`
//! (`s = 1`) is singular: `w''` grows like `t^(-(n-2)/(n-1))`, so numerical
//! integration starts at a small positive `t` seeded from the fractional
//! power series in `(s-1)^(n/(n-1))`.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::rk;
use crate::roots::{brent, BrentOptions};
use crate::series;
use crate::specfun::f_profile_excess;

fn check_n(n: u32) -> Result<f64> {
    if n < 2 {
        return domain(format!("dimension n must be >= 2, got {n}"));
    }
    Ok(n as f64)
}

fn check_w0(w0: f64) -> Result<()> {
    if !(w0 > 0.0) || !w0.is_finite() {
        return domain(format!("w0 must be positive, got {w0}"));
    }
    Ok(())
}

/// Boundary triple at `t -> 0`: `w = w0 + O(t)`,
/// `w' = -w0 + b1 t^beta + O(t)`, with `b1^(n-1) w0^3 = 1`, `beta = 1/(n-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryData {
    pub n: u32,
    pub w0: f64,
    pub b1: f64,
    pub beta: f64,
}

pub fn boundary_data(n: u32, w0: f64) -> Result<BoundaryData> {
    let nf = check_n(n)?;
    check_w0(w0)?;
    Ok(BoundaryData {
        n,
        w0,
        b1: w0.powf(-3.0 / (nf - 1.0)),
        beta: 1.0 / (nf - 1.0),
    })
}

/// `w'' w^3 (w + (1-t) w')^(n-2) - 1/(n-1)`.
pub fn ode_residual_w(t: f64, w: f64, wp: f64, wpp: f64, n: u32) -> f64 {
    let nf = n as f64;
    wpp * w.powi(3) * (w + (1.0 - t) * wp).powi(n as i32 - 2) - 1.0 / (nf - 1.0)
}

/// Right-hand constant of the `v` form, consistent with the normalized `w` form.
pub fn v_ode_constant(n: u32) -> f64 {
    let nf = n as f64;
    (nf / (nf + 2.0)).powi(3) / (nf - 1.0)
}

/// `(v v'' - 2/(n+2) v'^2) ((n+2)/n v + (1-t) v')^(n-2) - C_v`.
pub fn ode_residual_v(t: f64, v: f64, vp: f64, vpp: f64, n: u32) -> f64 {
    let nf = n as f64;
    (v * vpp - 2.0 / (nf + 2.0) * vp * vp)
        * ((nf + 2.0) / nf * v + (1.0 - t) * vp).powi(n as i32 - 2)
        - v_ode_constant(n)
}

/// `w'' ` solved from the normalized equation.
pub fn w_second_derivative(t: f64, w: f64, wp: f64, n: u32) -> f64 {
    let nf = n as f64;
    1.0 / ((nf - 1.0) * w.powi(3) * (w + (1.0 - t) * wp).powi(n as i32 - 2))
}

/// `w = (n+2)/n v^(n/(n+2))`.
pub fn w_from_v(v: f64, n: u32) -> Result<f64> {
    let nf = check_n(n)?;
    if !(v > 0.0) {
        return domain(format!("v must be positive, got {v}"));
    }
    Ok((nf + 2.0) / nf * v.powf(nf / (nf + 2.0)))
}

/// `v = (n w / (n+2))^((n+2)/n)`.
pub fn v_from_w(w: f64, n: u32) -> Result<f64> {
    let nf = check_n(n)?;
    if !(w > 0.0) {
        return domain(format!("w must be positive, got {w}"));
    }
    Ok((nf * w / (nf + 2.0)).powf((nf + 2.0) / nf))
}

/// `(v, v', v'')` from `(w, w', w'')` through the chain rule of the substitution.
pub fn v_derivatives(w: f64, wp: f64, wpp: f64, n: u32) -> (f64, f64, f64) {
    let nf = n as f64;
    let v = (nf * w / (nf + 2.0)).powf((nf + 2.0) / nf);
    // w' = v' v^(-2/(n+2)),  w'' = (v v'' - 2/(n+2) v'^2) v^(-(n+4)/(n+2))
    let vp = wp * v.powf(2.0 / (nf + 2.0));
    let vpp = (wpp * v.powf((nf + 4.0) / (nf + 2.0)) + 2.0 / (nf + 2.0) * vp * vp) / v;
    (v, vp, vpp)
}

/// Inverse of [`v_derivatives`].
pub fn w_derivatives(v: f64, vp: f64, vpp: f64, n: u32) -> (f64, f64, f64) {
    let nf = n as f64;
    let w = (nf + 2.0) / nf * v.powf(nf / (nf + 2.0));
    let wp = vp * v.powf(-2.0 / (nf + 2.0));
    let wpp = (v * vpp - 2.0 / (nf + 2.0) * vp * vp) * v.powf(-(nf + 4.0) / (nf + 2.0));
    (w, wp, wpp)
}

/// One point `(s, 𝔴, d𝔴/ds)` of the second reformulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrakSample {
    pub s: f64,
    pub frak_w: f64,
    pub frak_wp: f64,
}

impl FrakSample {
    /// Back to the `t` variables: `(t, w, w')`.
    pub fn to_w(&self) -> (f64, f64, f64) {
        let t = 1.0 - 1.0 / self.s;
        let w = self.frak_w / self.s;
        (t, w, (self.frak_wp - w) * self.s)
    }
}

/// `(n-1)/n 𝔴'^n + 1/(2𝔴^2) - 1/(2 w0^2)`.
pub fn first_integral_residual(sample: &FrakSample, n: u32, w0: f64) -> f64 {
    let nf = n as f64;
    (nf - 1.0) / nf * sample.frak_wp.powi(n as i32) + 0.5 / (sample.frak_w * sample.frak_w)
        - 0.5 / (w0 * w0)
}

/// Scale factor `(2(n-1)/n w0^(n+2))^(-1/n)` of the implicit solution.
fn implicit_scale(nf: f64, w0: f64) -> f64 {
    (2.0 * (nf - 1.0) / nf * w0.powf(nf + 2.0)).powf(-1.0 / nf)
}

/// Slope limit `p* = (n / (2(n-1) w0^2))^(1/n)` of `d𝔴/ds` as `s -> ∞`.
pub fn slope_limit(n: u32, w0: f64) -> f64 {
    let nf = n as f64;
    (nf / (2.0 * (nf - 1.0) * w0 * w0)).powf(1.0 / nf)
}

/// `d𝔴/ds` from the first integral given `𝔴 = w0 (1 + xi)`.
fn frak_slope_from_excess(xi: f64, nf: f64, w0: f64) -> f64 {
    // 1/w0^2 - 1/𝔴^2 = xi (2 + xi) / (w0^2 (1 + xi)^2)
    let x = 1.0 + xi;
    let gap = xi * (2.0 + xi) / (w0 * w0 * x * x);
    (0.5 * nf / (nf - 1.0) * gap).powf(1.0 / nf)
}

/// Exact solution of the `s`-form from `F(𝔴/w0) = scale (s - 1)`, inverted by
/// bracketed root finding on the monotone profile `F`.
pub fn frak_implicit(s: f64, n: u32, w0: f64) -> Result<FrakSample> {
    let nf = check_n(n)?;
    check_w0(w0)?;
    if !(s >= 1.0) || !s.is_finite() {
        return domain(format!("frak_implicit needs s >= 1, got {s}"));
    }
    if s == 1.0 {
        return Ok(FrakSample {
            s,
            frak_w: w0,
            frak_wp: 0.0,
        });
    }
    let target = implicit_scale(nf, w0) * (s - 1.0);
    let g = |xi: f64| f_profile_excess(xi, n).map(|f| f - target);
    // 𝔴 ∈ [w0, w0 + p* (s-1) + 1], widened geometrically if needed
    let mut hi = (slope_limit(n, w0) * (s - 1.0) + 1.0) / w0;
    let mut tries = 0;
    while g(hi)? < 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::NoSignChange {
                a: 0.0,
                b: hi,
                fa: -target,
                fb: g(hi)?,
            });
        }
    }
    let opts = BrentOptions {
        xtol: 0.0,
        ftol: 0.0,
        max_iter: 400,
    };
    let xi = brent(g, 0.0, hi, opts)?;
    Ok(FrakSample {
        s,
        frak_w: w0 * (1.0 + xi),
        frak_wp: frak_slope_from_excess(xi, nf, w0),
    })
}

/// `𝔴(s) = Σ c_k σ^k` with `σ = (s-1)^(n/(n-1))`, truncated after `order`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesExpansion {
    pub n: u32,
    pub w0: f64,
    pub coeffs: Vec<f64>,
    pub order: usize,
}

impl SeriesExpansion {
    /// Exponent `n/(n-1)` of the expansion variable.
    pub fn exponent(&self) -> f64 {
        let nf = self.n as f64;
        nf / (nf - 1.0)
    }

    /// `(𝔴, d𝔴/ds)` at `s >= 1` from the truncated series.
    pub fn eval(&self, s: f64) -> FrakSample {
        let m = self.exponent();
        let ds = s - 1.0;
        let sigma = ds.powf(m);
        let w = series::eval(&self.coeffs, sigma);
        // d𝔴/ds = (s-1)^(m-1) Σ k m c_k σ^(k-1)
        let dw = series::derivative(&self.coeffs);
        let wp = if ds == 0.0 {
            0.0
        } else {
            ds.powf(m - 1.0) * m * series::eval(&dw, sigma)
        };
        FrakSample {
            s,
            frak_w: w,
            frak_wp: wp,
        }
    }

    /// Same expansion truncated at a lower order.
    pub fn truncated(&self, order: usize) -> SeriesExpansion {
        let order = order.min(self.order);
        SeriesExpansion {
            n: self.n,
            w0: self.w0,
            coeffs: self.coeffs[..=order].to_vec(),
            order,
        }
    }
}

/// Coefficients of the boundary series by matching powers of `σ` in the first
/// integral. `c_0 = w0`, `c_1 = (n-1)/n w0^(-3/(n-1))`; every later
/// coefficient enters its own power linearly with slope `(nk - 1) w0^-3`.
pub fn series_near_one(n: u32, w0: f64, order: usize) -> Result<SeriesExpansion> {
    let nf = check_n(n)?;
    check_w0(w0)?;
    if order < 2 {
        return domain(format!("series order must be >= 2, got {order}"));
    }
    let m = nf / (nf - 1.0);
    let len = order + 1;
    let mut c = vec![0.0; len];
    c[0] = w0;
    c[1] = (nf - 1.0) / nf * w0.powf(-3.0 / (nf - 1.0));
    for k in 2..len {
        // residual of the σ^k coefficient with c_k = 0
        let p: Vec<f64> = (0..len)
            .map(|j| {
                if j + 1 < len {
                    (j + 1) as f64 * m * c[j + 1]
                } else {
                    0.0
                }
            })
            .collect();
        let pn = series::powf(&p, nf);
        let inv_sq = series::powf(&c, -2.0);
        let r = (nf - 1.0) / nf * pn[k - 1] + 0.5 * inv_sq[k];
        let slope = (nf * k as f64 - 1.0) / (w0 * w0 * w0);
        c[k] = -r / slope;
    }
    Ok(SeriesExpansion {
        n,
        w0,
        coeffs: c,
        order,
    })
}

/// Order used for seeding numerical integration from the boundary series.
pub const SEED_ORDER: usize = 12;

/// One node of a radial solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialSample {
    pub t: f64,
    pub w: f64,
    pub wp: f64,
    pub wpp: f64,
}

impl RadialSample {
    pub fn residual(&self, n: u32) -> f64 {
        ode_residual_w(self.t, self.w, self.wp, self.wpp, n)
    }

    /// `w + (1-t) w'`, the effective Kähler class factor.
    pub fn class_factor(&self) -> f64 {
        self.w + (1.0 - self.t) * self.wp
    }
}

/// A validated numerical solution on an increasing `t` grid, with dense
/// evaluation by Hermite interpolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSolution {
    pub n: u32,
    pub w0: f64,
    pub samples: Vec<RadialSample>,
    pub tol: f64,
    /// The samples satisfy `w(t) = t w(1/t)`. Evaluation at `t > 1` then
    /// reflects the interpolant at `1/t`: there `w` grows like `t` while `w''`
    /// decays, and interpolating `w` directly loses most digits of `w''`.
    pub symmetric: bool,
}

impl RadialSolution {
    pub fn t_range(&self) -> (f64, f64) {
        (self.samples[0].t, self.samples[self.samples.len() - 1].t)
    }

    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = self.t_range();
        t >= lo * (1.0 - 1e-12) && t <= hi * (1.0 + 1e-12)
    }

    /// Dense evaluation at `t` inside the grid range.
    pub fn eval(&self, t: f64) -> Result<RadialSample> {
        let (lo, hi) = self.t_range();
        if !self.contains(t) {
            return Err(Error::OutOfRange { t, lo, hi });
        }
        if self.symmetric && t > 1.0 && self.contains(1.0 / t) {
            let mut s = reflect_sample(&self.interpolate(1.0 / t));
            s.t = t;
            return Ok(s);
        }
        Ok(self.interpolate(t))
    }

    fn interpolate(&self, t: f64) -> RadialSample {
        let (lo, hi) = self.t_range();
        let t = t.clamp(lo, hi);
        let idx = self.samples.partition_point(|s| s.t <= t);
        if idx == 0 {
            return self.samples[0];
        }
        if idx >= self.samples.len() {
            return self.samples[self.samples.len() - 1];
        }
        let (a, b) = (&self.samples[idx - 1], &self.samples[idx]);
        if t == a.t {
            return *a;
        }
        hermite(a, b, t, self.n)
    }

    pub fn resample(&self, ts: &[f64]) -> Result<RadialSolution> {
        let samples = ts
            .iter()
            .map(|&t| self.eval(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(RadialSolution {
            n: self.n,
            w0: self.w0,
            samples,
            tol: self.tol,
            symmetric: false,
        })
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.residual(self.n).abs())
            .fold(0.0, f64::max)
    }

    /// All invariants of a valid solution: increasing positive `t`, Kähler
    /// positivity and the ODE residual within `tol`.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.samples.is_empty() {
            return Err("empty solution".into());
        }
        let mut prev = 0.0;
        for s in &self.samples {
            if !(s.t > prev) {
                return Err(format!("t not strictly increasing at {}", s.t));
            }
            prev = s.t;
            if !(s.w > 0.0) || !(s.wpp > 0.0) || !(s.class_factor() > 0.0) {
                return Err(format!("Kähler positivity fails at t = {}", s.t));
            }
            let r = s.residual(self.n);
            if !(r.abs() <= self.tol) {
                return Err(format!(
                    "ODE residual {r:e} at t = {} exceeds {:e}",
                    s.t, self.tol
                ));
            }
        }
        Ok(())
    }
}

/// `w'''` along a solution, from differentiating `log w'' = const - 3 log w - (n-2) log c`
/// with `c = w + (1-t) w'`, `c' = (1-t) w''`.
fn third_derivative(s: &RadialSample, n: u32) -> f64 {
    let c = s.class_factor();
    s.wpp * (-3.0 * s.wp / s.w - (n as f64 - 2.0) * (1.0 - s.t) * s.wpp / c)
}

/// `w`, `w'` from the quintic Hermite interpolant of `(w, w', w'')`; `w''` from
/// the cubic Hermite interpolant of `(w'', w''')`. Differentiating the quintic
/// twice would divide the roundoff in `w` by `h^2`.
fn hermite(a: &RadialSample, b: &RadialSample, t: f64, n: u32) -> RadialSample {
    let h = b.t - a.t;
    let u = (t - a.t) / h;
    let c0 = a.w;
    let c1 = h * a.wp;
    let c2 = 0.5 * h * h * a.wpp;
    let delta = b.w - c0 - c1 - c2;
    let d = h * b.wp - c1 - 2.0 * c2;
    let s = h * h * b.wpp - 2.0 * c2;
    let c3 = 10.0 * delta - 4.0 * d + 0.5 * s;
    let c4 = -15.0 * delta + 7.0 * d - s;
    let c5 = 6.0 * delta - 3.0 * d + 0.5 * s;
    let w = c0 + u * (c1 + u * (c2 + u * (c3 + u * (c4 + u * c5))));
    let dw = c1 + u * (2.0 * c2 + u * (3.0 * c3 + u * (4.0 * c4 + u * 5.0 * c5)));

    let (m0, m1) = (h * third_derivative(a, n), h * third_derivative(b, n));
    let (u2, u3) = (u * u, u * u * u);
    let wpp = (2.0 * u3 - 3.0 * u2 + 1.0) * a.wpp
        + (u3 - 2.0 * u2 + u) * m0
        + (-2.0 * u3 + 3.0 * u2) * b.wpp
        + (u3 - u2) * m1;
    RadialSample {
        t,
        w,
        wp: dw / h,
        wpp,
    }
}

/// Largest step relative to `t` taken by [`integrate_w`].
const MAX_REL_STEP: f64 = 0.005;

/// Seed `(w, w')` at `t` in `(0, 1)` from the boundary series.
pub fn seed_from_series(expansion: &SeriesExpansion, t: f64) -> (f64, f64) {
    let fs = expansion.eval(1.0 / (1.0 - t));
    let w = (1.0 - t) * fs.frak_w;
    let wp = (fs.frak_wp - w) / (1.0 - t);
    (w, wp)
}

/// Integrate the normalized ODE from `t_start` to `t_end` with local error
/// `tol`, starting on the boundary branch selected by `w0`.
pub fn integrate_w(n: u32, w0: f64, t_start: f64, t_end: f64, tol: f64) -> Result<RadialSolution> {
    check_n(n)?;
    check_w0(w0)?;
    if !(t_start > 0.0 && t_start < 1.0) {
        return domain(format!("t_start must lie in (0, 1), got {t_start}"));
    }
    if !(t_end > t_start) {
        return domain(format!("t_end = {t_end} must exceed t_start = {t_start}"));
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    let expansion = series_near_one(n, w0, SEED_ORDER)?;
    let (w, wp) = seed_from_series(&expansion, t_start);
    let rhs = |t: f64, y: &[f64; 2]| [y[1], w_second_derivative(t, y[0], y[1], n)];
    let valid = |t: f64, y: &[f64; 2]| y[0] > 0.0 && y[0] + (1.0 - t) * y[1] > 0.0;
    let opts = rk::Options {
        h0: Some(1e-3 * t_start),
        h_max_rel: MAX_REL_STEP,
        h_max: MAX_REL_STEP,
        ..rk::Options::with_tol(tol)
    };
    let tr = rk::dopri5(rhs, valid, t_start, [w, wp], t_end, opts)?;
    let samples =
        tr.t.iter()
            .zip(tr.y.iter().zip(tr.dy.iter()))
            .map(|(&t, (y, dy))| RadialSample {
                t,
                w: y[0],
                wp: y[1],
                wpp: dy[1],
            })
            .collect();
    Ok(RadialSolution {
        n,
        w0,
        samples,
        tol,
        symmetric: false,
    })
}

/// Integrate the `s`-form directly, as `(𝔴, q = 𝔴'^(n-1))` with
/// `𝔴' = q^(1/(n-1))`, `q' = 𝔴^-3`, seeded from the series at `s_start`.
/// Independent of the implicit solution; used to audit the first integral.
pub fn integrate_frak(
    n: u32,
    w0: f64,
    s_start: f64,
    s_end: f64,
    tol: f64,
) -> Result<Vec<FrakSample>> {
    let nf = check_n(n)?;
    check_w0(w0)?;
    if !(s_start > 1.0 && s_end > s_start) {
        return domain(format!("need 1 < s_start < s_end, got {s_start}, {s_end}"));
    }
    let expansion = series_near_one(n, w0, SEED_ORDER)?;
    let seed = expansion.eval(s_start);
    let y0 = [seed.frak_w, seed.frak_wp.powf(nf - 1.0)];
    let rhs = |_s: f64, y: &[f64; 2]| [y[1].powf(1.0 / (nf - 1.0)), y[0].powi(-3)];
    let valid = |_s: f64, y: &[f64; 2]| y[0] > 0.0 && y[1] >= 0.0;
    let opts = rk::Options {
        h0: Some(1e-3 * (s_start - 1.0)),
        ..rk::Options::with_tol(tol)
    };
    let tr = rk::dopri5(rhs, valid, s_start, y0, s_end, opts)?;
    Ok(tr
        .t
        .iter()
        .zip(tr.y.iter())
        .map(|(&s, y)| FrakSample {
            s,
            frak_w: y[0],
            frak_wp: y[1].powf(1.0 / (nf - 1.0)),
        })
        .collect())
}

/// Reflect a sample through `w~(t) = t w(1/t)`.
pub fn reflect_sample(s: &RadialSample) -> RadialSample {
    let t = s.t;
    RadialSample {
        t: 1.0 / t,
        w: s.w / t,
        wp: s.w - t * s.wp,
        wpp: t * t * t * s.wpp,
    }
}

/// The solution `w~(t) = t w(1/t)` on `[1/t1, 1/t0]`. Every node maps to a
/// node, so no resampling is needed.
pub fn symmetry_reflect(sol: &RadialSolution) -> RadialSolution {
    let samples = sol.samples.iter().rev().map(reflect_sample).collect();
    RadialSolution {
        n: sol.n,
        w0: sol.w0,
        samples,
        tol: sol.tol,
        symmetric: sol.symmetric,
    }
}
