//! Dormand-Prince 5(4) explicit Runge-Kutta pair with PI step control.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// Difference between the 5th and embedded 4th order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
// PI controller exponents (Hairer & Wanner, beta = 0.04)
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; defaults to a small fraction of `|t0|`.
    pub h0: Option<f64>,
    pub h_max: f64,
    /// Caps the step at `h_max_rel * |t|` so output nodes stay dense where
    /// the solution varies on the scale of `t` itself.
    pub h_max_rel: f64,
    pub max_steps: usize,
}

impl Options {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            ..Self::default()
        }
    }
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h0: None,
            h_max: f64::INFINITY,
            h_max_rel: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

/// Accepted steps, including the initial point.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub dy: Vec<[f64; N]>,
}

/// Integrate `y' = f(t, y)` from `t0` to `t_end > t0`.
///
/// `valid` rejects states outside the domain of the equation; a rejected
/// stage shrinks the step. If the step falls below roundoff level the
/// integration stops with [`Error::BlowUp`] at the last accepted time.
pub fn dopri5<const N: usize, F, V>(
    f: F,
    valid: V,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: Options,
) -> Result<Trajectory<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    V: Fn(f64, &[f64; N]) -> bool,
{
    assert!(t_end > t0, "dopri5 integrates forward only");
    let mut t = t0;
    let mut y = y0;
    let mut k0 = f(t, &y);
    if !valid(t, &y) || k0.iter().any(|v| !v.is_finite()) {
        return Err(Error::BlowUp { t });
    }
    let mut out = Trajectory {
        t: vec![t],
        y: vec![y],
        dy: vec![k0],
    };
    let cap = |t: f64| opts.h_max.min(opts.h_max_rel * t.abs());
    let mut h = opts
        .h0
        .unwrap_or_else(|| 1e-3 * t0.abs().max(1e-6))
        .min(cap(t))
        .min(t_end - t0);
    let mut err_prev: f64 = 1e-4;

    for _ in 0..opts.max_steps {
        if t >= t_end {
            return Ok(out);
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::BlowUp { t });
        }

        let mut k = [[0.0; N]; 7];
        k[0] = k0;
        let mut stage_ok = true;
        for s in 1..7 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * k[j][i];
                }
                *yi += h * acc;
            }
            let ts = t + C[s] * h;
            if !valid(ts, &ys) {
                stage_ok = false;
                break;
            }
            k[s] = f(ts, &ys);
            if k[s].iter().any(|v| !v.is_finite()) {
                stage_ok = false;
                break;
            }
        }
        if !stage_ok {
            h *= 0.25;
            continue;
        }

        // FSAL: the 7th stage is evaluated at the 5th order solution
        let mut y_new = y;
        for (i, yi) in y_new.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..6 {
                acc += A[6][j] * k[j][i];
            }
            *yi += h * acc;
        }

        let mut err = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for j in 0..7 {
                e += E[j] * k[j][i];
            }
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (h * e / sc).powi(2);
        }
        let err = (err / N as f64).sqrt();

        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            y = y_new;
            k0 = k[6];
            out.t.push(t);
            out.y.push(y);
            out.dy.push(k0);
            let fac = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-ALPHA) * err_prev.powf(BETA)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            err_prev = err.max(1e-4);
            h = (h * fac).min(cap(t));
        } else {
            let fac = (SAFETY * err.powf(-0.2)).max(MIN_FACTOR);
            h *= fac;
        }
    }
    Err(Error::BlowUp { t })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let tr = dopri5(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            |_, _| true,
            0.0,
            [1.0, 0.0],
            10.0,
            Options::with_tol(1e-12),
        )
        .unwrap();
        let y = tr.y.last().unwrap();
        assert_eq!(*tr.t.last().unwrap(), 10.0);
        assert!((y[0] - 10f64.cos()).abs() < 1e-10);
        assert!((y[1] + 10f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn respects_relative_cap() {
        let tr = dopri5(
            |_, y: &[f64; 1]| [y[0]],
            |_, _| true,
            1.0,
            [1.0],
            2.0,
            Options {
                h_max_rel: 0.01,
                ..Options::with_tol(1e-8)
            },
        )
        .unwrap();
        for w in tr.t.windows(2) {
            assert!(w[1] - w[0] <= 0.01 * w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn reports_finite_time_blowup() {
        // y' = y^2, y(0) = 1 blows up at t = 1
        let err = dopri5(
            |_, y: &[f64; 1]| [y[0] * y[0]],
            |_, y| y[0] < 1e12,
            0.0,
            [1.0],
            2.0,
            Options::with_tol(1e-10),
        )
        .unwrap_err();
        match err {
            Error::BlowUp { t } => assert!((t - 1.0).abs() < 1e-3, "{t}"),
            e => panic!("{e:?}"),
        }
    }
}
