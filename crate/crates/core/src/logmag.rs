//! Sign + log-magnitude numbers.
//!
//! Products of many factors (filter coefficients, objective values, the
//! critical point products) leave the double range long before the orders
//! of interest, so they are carried as `(sign, ln|value|)`.

use std::ops::Mul;

/// A real number stored as a sign and the natural log of its magnitude.
///
/// Zero is represented with `ln_abs = -inf` and sign `+1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub negative: bool,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ONE: SignedLog = SignedLog { negative: false, ln_abs: 0.0 };

    pub fn new(negative: bool, ln_abs: f64) -> Self {
        Self { negative, ln_abs }
    }

    pub fn from_f64(x: f64) -> Self {
        Self { negative: x < 0.0, ln_abs: x.abs().ln() }
    }

    pub fn sign(&self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }

    /// Converts back to a double; overflows to `±inf` / underflows to `0`.
    pub fn to_f64(&self) -> f64 {
        self.sign() * self.ln_abs.exp()
    }

    pub fn abs(&self) -> f64 {
        self.ln_abs.exp()
    }

    pub fn recip(&self) -> Self {
        Self { negative: self.negative, ln_abs: -self.ln_abs }
    }
}

impl Mul for SignedLog {
    type Output = SignedLog;

    fn mul(self, rhs: SignedLog) -> SignedLog {
        SignedLog { negative: self.negative != rhs.negative, ln_abs: self.ln_abs + rhs.ln_abs }
    }
}

impl std::iter::Product for SignedLog {
    fn product<I: Iterator<Item = SignedLog>>(iter: I) -> Self {
        iter.fold(SignedLog::ONE, |acc, x| acc * x)
    }
}

/// `ln(Σ exp(a_i))` without overflow. Returns `-inf` for an empty slice.
pub fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let s: f64 = logs.iter().map(|&l| (l - max).exp()).sum();
    max + s.ln()
}

/// `ln(m!)` by direct summation; exact enough for the orders used here.
pub fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|k| (k as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_tracks_sign() {
        let p: SignedLog = [-2.0, 3.0, -0.5].iter().map(|&x| SignedLog::from_f64(x)).product();
        assert!(!p.negative);
        assert!((p.to_f64() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn log_sum_exp_handles_large_values() {
        let l = log_sum_exp(&[1000.0, 1000.0]);
        assert!((l - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn factorial_logs() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-14);
    }
}
