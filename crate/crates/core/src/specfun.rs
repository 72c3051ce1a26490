//! Gamma, Gauss hypergeometric `2F1` for real parameters on `[0, 1]`, and the
//! profile integral `F(x) = ∫_1^x (1 - y^-2)^(-1/n) dy` in closed and
//! quadrature form.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::quad;

/// Lanczos coefficients, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
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

/// Hard cap on hypergeometric series terms.
pub const MAX_SERIES_TERMS: usize = 100_000;

/// Above this argument the `1 - z` connection formula replaces the direct series.
const CONNECTION_THRESHOLD: f64 = 0.75;

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (Γ(x + 1) form).
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    acc
}

/// Γ(x) for any real x that is not a non-positive integer.
fn gamma_real(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Γ(x) Γ(1 - x) = π / sin(πx).
        return PI / ((PI * x).sin() * gamma_real(1.0 - x));
    }
    if x == x.round() && x <= 171.0 {
        // exact factorials
        return (2..x as u32).fold(1.0, |acc, k| acc * k as f64);
    }
    if x > 140.0 {
        return ln_gamma_large(x).exp();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

fn ln_gamma_large(x: f64) -> f64 {
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// 1/Γ(x), zero at the poles of Γ.
fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / gamma_real(x)
    }
}

/// The Gamma function for positive arguments.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("gamma_fn requires x > 0, got {x}"));
    }
    Ok(gamma_real(x))
}

/// Rising factorial (α)_k = α (α + 1) ... (α + k - 1), (α)_0 = 1.
pub fn pochhammer(alpha: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (alpha + j as f64))
}

/// Parameters and argument of `2F1[a, b; c; z]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

impl HypParams {
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Self {
        Self { a, b, c, z }
    }

    fn validate(&self) -> Result<()> {
        if is_nonpositive_integer(self.c) {
            return domain(format!("c = {} is a non-positive integer", self.c));
        }
        if !(0.0..=1.0).contains(&self.z) {
            return domain(format!("z = {} outside [0, 1]", self.z));
        }
        if self.z == 1.0 && self.c - self.a - self.b <= 0.0 {
            return domain(format!(
                "series diverges at z = 1: c - a - b = {} <= 0",
                self.c - self.a - self.b
            ));
        }
        Ok(())
    }
}

/// Gauss's value `2F1[a, b; c; 1] = Γ(c)Γ(c-a-b) / (Γ(c-a)Γ(c-b))`.
pub fn gauss_at_one(a: f64, b: f64, c: f64) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return domain(format!("c = {c} is a non-positive integer"));
    }
    let s = c - a - b;
    if !(s > 0.0) {
        return domain(format!("Gauss formula needs c - a - b > 0, got {s}"));
    }
    Ok(gamma_real(c) * gamma_real(s) * rgamma(c - a) * rgamma(c - b))
}

/// Direct Maclaurin summation. Stops once a term falls below 1e-16 of the
/// partial sum while term magnitudes are decreasing.
fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((kf + 1.0) * (c + kf)) * z;
        if term == 0.0 {
            return Ok(sum);
        }
        sum += term;
        let mag = term.abs();
        if mag < 1e-16 * sum.abs() && mag <= prev {
            return Ok(sum);
        }
        prev = mag;
    }
    Err(Error::Convergence {
        what: "hypergeometric series",
        terms: MAX_SERIES_TERMS,
    })
}

/// `2F1` when either upper parameter is a non-positive integer (a polynomial).
fn terminating(a: f64, b: f64, c: f64, z: f64) -> Option<f64> {
    let m = [a, b]
        .into_iter()
        .filter(|&p| is_nonpositive_integer(p))
        .map(|p| (-p) as usize)
        .min()?;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..m {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((kf + 1.0) * (c + kf)) * z;
        sum += term;
    }
    Some(sum)
}

/// `2F1[a, b; c; z]` with `omz = 1 - z` supplied separately so that callers
/// holding an accurate complement near `z = 1` do not lose it to rounding.
pub(crate) fn hyp2f1_split(a: f64, b: f64, c: f64, z: f64, omz: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(1.0);
    }
    if let Some(v) = terminating(a, b, c, z) {
        return Ok(v);
    }
    if omz == 0.0 {
        return gauss_at_one(a, b, c);
    }
    let s = c - a - b;
    if z <= CONNECTION_THRESHOLD || s == s.round() {
        return series(a, b, c, z);
    }
    // 2F1(a,b;c;z) = A 2F1(a,b;1-s;1-z) + B (1-z)^s 2F1(c-a,c-b;1+s;1-z)
    let gc = gamma_real(c);
    let ca = gamma_real(s) * rgamma(c - a) * rgamma(c - b);
    let cb = gamma_real(-s) * rgamma(a) * rgamma(b);
    let mut out = 0.0;
    if ca != 0.0 {
        out += ca * series(a, b, 1.0 - s, omz)?;
    }
    if cb != 0.0 {
        out += cb * omz.powf(s) * series(c - a, c - b, 1.0 + s, omz)?;
    }
    Ok(gc * out)
}

/// Gauss hypergeometric function for real parameters and `z ∈ [0, 1]`.
pub fn hyp2f1(p: HypParams) -> Result<f64> {
    p.validate()?;
    hyp2f1_split(p.a, p.b, p.c, p.z, 1.0 - p.z)
}

fn check_profile_args(x: f64, n: u32) -> Result<()> {
    if n < 2 {
        return domain(format!("profile needs n >= 2, got {n}"));
    }
    if !(x >= 1.0) || !x.is_finite() {
        return domain(format!("profile needs x >= 1, got {x}"));
    }
    Ok(())
}

/// `F(1 + xi)` from the hypergeometric closed form, taking the excess `xi`
/// directly so that `1 - x^-2 = xi (2 + xi) / x^2` keeps full precision.
pub(crate) fn f_profile_excess(xi: f64, n: u32) -> Result<f64> {
    let nf = n as f64;
    let x = 1.0 + xi;
    let omz = xi * (2.0 + xi) / (x * x);
    let z = 1.0 / (x * x);
    let (a, b, c) = (-0.5, 1.0 / nf, 0.5);
    let at_one = gauss_at_one(a, b, c)?;
    let at_z = hyp2f1_split(a, b, c, z, omz)?;
    Ok(x * at_z - at_one)
}

/// `F(x) = x 2F1[-1/2, 1/n; 1/2; x^-2] - 2F1[-1/2, 1/n; 1/2; 1]` for `x >= 1`.
pub fn f_profile(x: f64, n: u32) -> Result<f64> {
    check_profile_args(x, n)?;
    f_profile_excess(x - 1.0, n)
}

/// `F(1 + xi)` by quadrature after the substitution `y = 1 + τ^(n/(n-1))`,
/// which cancels the `(y - 1)^(-1/n)` endpoint singularity exactly.
pub(crate) fn f_profile_quadrature_excess(xi: f64, n: u32) -> f64 {
    if xi == 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    let m = nf / (nf - 1.0);
    let upper = xi.powf(1.0 / m);
    // (1 - y^-2)^(-1/n) dy = m y^(2/n) (y + 1)^(-1/n) dτ
    let integrand = |tau: f64| {
        let y = 1.0 + tau.powf(m);
        m * y.powf(2.0 / nf) * (y + 1.0).powf(-1.0 / nf)
    };
    quad::integrate(integrand, 0.0, upper, 1e-13).0
}

/// Independent evaluation of `F(x) = ∫_1^x (1 - y^-2)^(-1/n) dy` by adaptive
/// quadrature.
pub fn f_profile_quadrature(x: f64, n: u32) -> Result<f64> {
    check_profile_args(x, n)?;
    Ok(f_profile_quadrature_excess(x - 1.0, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_golden() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert!(rel(gamma_fn(0.5).unwrap(), PI.sqrt()) < 1e-14);
        // 50 digit reference value, frozen
        assert!(
            rel(
                gamma_fn(1.0 / 6.0).unwrap(),
                5.566_316_001_780_235_204_250_096_895_2
            ) < 1e-13
        );
        assert!(rel(gamma_fn(5.0).unwrap(), 24.0) < 1e-13);
        assert!(rel(gamma_fn(171.0).unwrap(), 7.257_415_615_307_999e306) < 1e-11);
    }

    #[test]
    fn gamma_domain() {
        assert!(matches!(gamma_fn(0.0), Err(Error::Domain(_))));
        assert!(matches!(gamma_fn(-1.5), Err(Error::Domain(_))));
        assert!(gamma_fn(f64::NAN).is_err());
    }

    #[test]
    fn gamma_negative_internal() {
        // Γ(-1/2) = -2√π
        assert!(rel(gamma_real(-0.5), -2.0 * PI.sqrt()) < 1e-14);
        assert_eq!(rgamma(-3.0), 0.0);
    }

    #[test]
    fn hyp_constant_term() {
        let v = hyp2f1(HypParams::new(0.5, -1.0 / 3.0, 2.0 / 3.0, 0.0)).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn hyp_log_identity() {
        let v = hyp2f1(HypParams::new(1.0, 1.0, 2.0, 0.5)).unwrap();
        assert!(rel(v, 2.0 * 2f64.ln()) < 1e-14);
        // -ln(1-z)/z near 1 goes through the integer c - a - b branch (series)
        let z = 0.9;
        let v = hyp2f1(HypParams::new(1.0, 1.0, 2.0, z)).unwrap();
        assert!(rel(v, -(1.0 - z).ln() / z) < 1e-13);
    }

    #[test]
    fn hyp_near_one_golden() {
        // mpmath, 40 digits
        let cases = [
            (
                0.5,
                -1.0 / 3.0,
                2.0 / 3.0,
                0.9,
                0.629_582_003_662_653_011_392_875_114_3,
            ),
            (
                0.5,
                -1.0 / 3.0,
                2.0 / 3.0,
                0.99,
                0.496_483_914_285_946_387_661_024_020_1,
            ),
            (
                0.5,
                -1.0 / 3.0,
                2.0 / 3.0,
                0.999_999,
                0.431_851_449_550_682_442_238_543_310_2,
            ),
            (
                -0.5,
                1.0 / 3.0,
                0.5,
                0.9,
                0.572_331_541_671_272_835_385_316_995_2,
            ),
            (
                -0.5,
                1.0 / 3.0,
                0.5,
                0.999_999,
                0.431_259_710_953_281_258_481_526_834_9,
            ),
        ];
        for (a, b, c, z, want) in cases {
            let got = hyp2f1(HypParams::new(a, b, c, z)).unwrap();
            assert!(rel(got, want) < 1e-13, "{a} {b} {c} {z}: {got} vs {want}");
        }
    }

    #[test]
    fn hyp_terminating() {
        // 2F1(-2, b; c; z) = 1 - 2bz/c + b(b+1)z^2/(c(c+1))
        let (b, c, z) = (0.3, 1.7, 0.4);
        let want = 1.0 - 2.0 * b * z / c + b * (b + 1.0) * z * z / (c * (c + 1.0));
        let got = hyp2f1(HypParams::new(-2.0, b, c, z)).unwrap();
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn hyp_errors() {
        assert!(matches!(
            hyp2f1(HypParams::new(0.5, 0.5, -1.0, 0.3)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            hyp2f1(HypParams::new(1.0, 1.0, 2.0, 1.0)),
            Err(Error::Domain(_))
        ));
        assert!(hyp2f1(HypParams::new(1.0, 1.0, 2.0, 1.2)).is_err());
        assert!(gauss_at_one(1.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn gauss_values() {
        assert!(rel(gauss_at_one(0.0, 0.3, 1.4).unwrap(), 1.0) < 1e-14);
        let n3 = gauss_at_one(0.5, -1.0 / 3.0, 2.0 / 3.0).unwrap();
        assert!(rel(n3, 0.431_184_926_538_298_422_492_252_504_188_5) < 1e-13);
        let n4 = gauss_at_one(0.5, -0.25, 0.75).unwrap();
        assert!(rel(n4, 0.599_070_117_367_796_103_719_961_246_140_2) < 1e-13);
        let viagamma = gamma_fn(2.0 / 3.0).unwrap() * PI.sqrt() / gamma_fn(1.0 / 6.0).unwrap();
        assert!(rel(n3, viagamma) < 1e-14);
    }

    #[test]
    fn profile_basics() {
        for n in 2..7 {
            assert_eq!(f_profile(1.0, n).unwrap(), 0.0);
            assert_eq!(f_profile_quadrature(1.0, n).unwrap(), 0.0);
        }
        assert!(f_profile(0.99, 3).is_err());
        assert!(f_profile_quadrature(0.5, 3).is_err());
        assert!(f_profile(2.0, 1).is_err());
        let x = 1e6;
        assert!((f_profile(x, 3).unwrap() / x - 1.0).abs() < 1e-4);
    }

    #[test]
    fn profile_golden() {
        // mpmath quadrature, 40 digits
        let cases = [
            (3, 1.001, 0.011_907_888_495_456_923_469_572_209_318),
            (3, 2.0, 1.391_614_956_409_629_091_408_288_166_34),
            (4, 10.0, 9.375_877_563_554_601_127_911_107_685_19),
            (5, 50.0, 49.306_213_334_409_276_194_359_367_716_3),
        ];
        for (n, x, want) in cases {
            let a = f_profile(x, n).unwrap();
            let b = f_profile_quadrature(x, n).unwrap();
            assert!(
                (a - want).abs() < 1e-12,
                "closed n={n} x={x}: {a} vs {want}"
            );
            assert!((b - want).abs() < 1e-11, "quad n={n} x={x}: {b} vs {want}");
        }
    }

    #[test]
    fn profile_leading_behaviour() {
        let eps: f64 = 1e-6;
        for n in 3..6 {
            let nf = n as f64;
            let lead = nf / (nf - 1.0) * 2f64.powf(-1.0 / nf) * eps.powf((nf - 1.0) / nf);
            let got = f_profile_quadrature(1.0 + eps, n).unwrap();
            assert!(rel(got, lead) < 1e-3, "n={n}: {got} vs {lead}");
            let got = f_profile(1.0 + eps, n).unwrap();
            assert!(rel(got, lead) < 1e-3);
        }
    }

    #[test]
    fn pochhammer_small() {
        assert_eq!(pochhammer(0.5, 0), 1.0);
        assert_eq!(pochhammer(1.0, 5), 120.0);
        assert!((pochhammer(-0.5, 3) - (-0.5 * 0.5 * 1.5)).abs() < 1e-16);
    }
}
