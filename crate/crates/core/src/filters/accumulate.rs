//! The accumulated filter `g` with `Δ^m g = δ^{(0)} - h`.
//!
//! Summing `δ^{(0)} - h` `m` times in doubles amplifies the rounding in the
//! coefficients by roughly `n_m^m / ∏ n_j`, which already destroys the
//! finite-support certificate around `m = 20`. When the taps are the
//! minimally supported coefficients of their own positions, the sums are
//! done exactly over the rationals instead.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::SparseFilter;
use crate::error::{Error, Result};

/// Exact `d_j = ∏'_i p_i/(p_i - p_j)` for the given positions.
fn exact_coefficients(pos: &[usize]) -> Vec<BigRational> {
    (0..pos.len())
        .map(|j| {
            let mut num = BigInt::one();
            let mut den = BigInt::one();
            for (i, &p) in pos.iter().enumerate() {
                if i != j {
                    num *= BigInt::from(p);
                    den *= BigInt::from(p as i64 - pos[j] as i64);
                }
            }
            BigRational::new(num, den)
        })
        .collect()
}

fn exact_g(m: usize, pos: &[usize], d: &[BigRational]) -> Result<Vec<f64>> {
    let denom = d.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let span = *pos.last().unwrap();
    let mut a = vec![BigInt::zero(); span + 1];
    a[0] = denom.clone();
    for (&p, c) in pos.iter().zip(d) {
        a[p] -= c.numer() * (&denom / c.denom());
    }
    for _ in 0..m {
        for k in 1..a.len() {
            let prev = a[k - 1].clone();
            a[k] += prev;
        }
    }
    let len = span + 1 - m;
    if let Some(k) = (len..a.len()).find(|&k| !a[k].is_zero()) {
        return Err(Error::InfeasibleFilter(format!("g does not vanish at index {k}")));
    }
    Ok(a[..len]
        .iter()
        .map(|v| BigRational::new(v.clone(), denom.clone()).to_f64().unwrap_or(f64::NAN))
        .collect())
}

fn float_g(m: usize, h: &SparseFilter) -> Result<Vec<f64>> {
    let span = h.span();
    if span < m {
        return Err(Error::InfeasibleFilter(format!("span {span} is shorter than the order {m}")));
    }
    let mut a = vec![0.0; span + 1];
    a[0] = 1.0;
    for &(p, c) in h.taps() {
        a[p] -= c;
    }
    for _ in 0..m {
        for k in 1..a.len() {
            a[k] += a[k - 1];
        }
    }
    let len = span + 1 - m;
    let norm: f64 = a.iter().map(|v| v.abs()).sum();
    if let Some(k) = (len..a.len()).find(|&k| a[k].abs() > 1e-9 * norm) {
        return Err(Error::InfeasibleFilter(format!("g does not vanish at index {k}: {}", a[k])));
    }
    a.truncate(len);
    Ok(a)
}

/// Dense `g` on `[0, n_m - m]` from `m` cumulative sums of `δ^{(0)} - h`.
///
/// Fails with [`Error::InfeasibleFilter`] when the sums do not come back to
/// zero past `n_m - m`, i.e. when `h` violates the moment conditions.
pub fn g_from_h(m: usize, h: &SparseFilter) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::InvalidOrder(0));
    }
    let pos: Vec<usize> = h.taps().iter().map(|t| t.0).collect();
    if pos.len() == m {
        let d = exact_coefficients(&pos);
        let matches = d.iter().zip(h.taps()).all(|(e, &(_, c))| {
            let e = e.to_f64().unwrap_or(f64::NAN);
            (e - c).abs() <= 1e-9 * e.abs().max(1.0)
        });
        if matches {
            return exact_g(m, &pos, &d);
        }
    }
    float_g(m, h)
}
