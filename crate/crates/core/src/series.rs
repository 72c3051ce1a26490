//! Truncated power series arithmetic on coefficient vectors.
//!
//! All operations keep the length of the first operand; coefficient `k` is
//! the coefficient of `x^k`.

pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len();
    let mut out = vec![0.0; len];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `a^p` for real `p`, requiring `a[0] > 0` (J. C. P. Miller recurrence).
pub fn powf(a: &[f64], p: f64) -> Vec<f64> {
    let len = a.len();
    let mut out = vec![0.0; len];
    if len == 0 {
        return out;
    }
    let a0 = a[0];
    assert!(a0 > 0.0, "series power needs a positive constant term");
    out[0] = a0.powf(p);
    for k in 1..len {
        let mut acc = 0.0;
        for j in 1..=k {
            let jf = j as f64;
            acc += ((p + 1.0) * jf - k as f64) * a[j] * out[k - j];
        }
        out[k] = acc / (k as f64 * a0);
    }
    out
}

/// Horner evaluation at `x`.
pub fn eval(a: &[f64], x: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Formal derivative `d/dx`, same length (last coefficient zero).
pub fn derivative(a: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len()];
    for k in 1..a.len() {
        out[k - 1] = k as f64 * a[k];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_squared() {
        // 1/(1-x) squared = sum (k+1) x^k
        let g = vec![1.0; 8];
        let sq = mul(&g, &g);
        for (k, c) in sq.iter().enumerate() {
            assert_eq!(*c, (k + 1) as f64);
        }
    }

    #[test]
    fn powf_matches_binomial() {
        // (1 + x)^p
        let a = [1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        let p = -1.0 / 3.0;
        let out = powf(&a, p);
        let mut binom = 1.0;
        for (k, c) in out.iter().enumerate() {
            assert!((c - binom).abs() < 1e-15, "k={k}");
            binom *= (p - k as f64) / (k as f64 + 1.0);
        }
    }

    #[test]
    fn powf_inverts_mul() {
        let a = [2.0, 0.3, -0.1, 0.05, 0.0, 0.01];
        let s = powf(&a, 0.5);
        let back = mul(&s, &s);
        for (x, y) in back.iter().zip(a.iter()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn eval_and_derivative() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(eval(&a, 2.0), 17.0);
        assert_eq!(derivative(&a), vec![2.0, 6.0, 0.0]);
    }
}
