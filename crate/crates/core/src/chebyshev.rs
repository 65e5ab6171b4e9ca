//! Chebyshev polynomials of the first and second kind.
//!
//! Everything is evaluated through the trigonometric / hyperbolic
//! representations `T_m(cos θ) = cos mθ`, `T_m(cosh t) = cosh mt`,
//! `U_m(cos θ) = sin((m+1)θ)/sin θ`, `U_m(cosh t) = sinh((m+1)t)/sinh t`.
//! Monomial expansions are never formed.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::logmag::SignedLog;

/// First kind, `T_m(x)`, for any real `x`.
pub fn cheb_t(m: usize, x: f64) -> f64 {
    let mf = m as f64;
    if x.abs() <= 1.0 {
        (mf * x.acos()).cos()
    } else {
        let v = (mf * x.abs().acosh()).cosh();
        if x < 0.0 && m % 2 == 1 {
            -v
        } else {
            v
        }
    }
}

/// Second kind, `U_m(x)`, for any real `x`. At `x = ±1` the limits
/// `m+1` and `(-1)^m (m+1)` are returned.
pub fn cheb_u(m: usize, x: f64) -> f64 {
    let mf = m as f64;
    let parity = if m % 2 == 1 { -1.0 } else { 1.0 };
    if x == 1.0 {
        return mf + 1.0;
    }
    if x == -1.0 {
        return parity * (mf + 1.0);
    }
    if x.abs() < 1.0 {
        let theta = x.acos();
        ((mf + 1.0) * theta).sin() / theta.sin()
    } else {
        let t = x.abs().acosh();
        let v = ((mf + 1.0) * t).sinh() / t.sinh();
        if x < 0.0 {
            parity * v
        } else {
            v
        }
    }
}

/// Angle `a_j = (2j - m)π / (2m)` with `z_j = sin(a_j) = cos((m-j)π/m)`.
///
/// The integer numerator makes `a_{m-j} = -a_j` hold exactly, so the node
/// set is exactly antisymmetric and `z_0 = -1`, `z_m = 1`.
fn node_angle(m: usize, j: usize) -> f64 {
    (2.0 * j as f64 - m as f64) * PI / (2.0 * m as f64)
}

/// `z_j = cos((m-j)π/m)` for `j = 0..=m`, i.e. including the end points
/// `z_0 = -1` and `z_m = 1`.
pub fn extended_node(m: usize, j: usize) -> f64 {
    node_angle(m, j).sin()
}

/// `z_k - z_i` via the sum-to-product identity, accurate for close nodes.
fn node_difference(m: usize, k: usize, i: usize) -> f64 {
    let (ak, ai) = (node_angle(m, k), node_angle(m, i));
    2.0 * (0.5 * (ak + ai)).cos() * (0.5 * (ak - ai)).sin()
}

/// Zeros of `U_{m-1}`, equivalently the interior critical points of `T_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebNodeSet {
    pub m: usize,
    /// `z_1 < ... < z_{m-1}`.
    pub z: Vec<f64>,
}

impl ChebNodeSet {
    /// `1 + z_j = 2 sin²(jπ/(2m))`, computed without cancellation.
    pub fn one_plus(&self, j: usize) -> f64 {
        let s = (j as f64 * PI / (2.0 * self.m as f64)).sin();
        2.0 * s * s
    }
}

/// Returns `z_j = cos((m-j)π/m)`, `j = 1..m-1`, in ascending order.
pub fn second_kind_zeros(m: usize) -> Result<ChebNodeSet> {
    if m < 2 {
        return Err(Error::InvalidDegree(m));
    }
    let z = (1..m).map(|j| extended_node(m, j)).collect();
    Ok(ChebNodeSet { m, z })
}

/// `∏'_{i=0}^{m-1} (z_k - z_i)` for `k = 0..m-1`, with `z_0 = -1`, as
/// sign + log-magnitude values (the products underflow for large `m`).
pub fn critical_point_products(m: usize) -> Result<Vec<SignedLog>> {
    if m < 2 {
        return Err(Error::InvalidDegree(m));
    }
    Ok((0..m)
        .map(|k| {
            (0..m)
                .filter(|&i| i != k)
                .map(|i| SignedLog::from_f64(node_difference(m, k, i)))
                .product()
        })
        .collect())
}

/// Closed form of the critical point products:
/// `m(-1)^{m-1}/2^{m-1}` for `k = 0` and
/// `m(-1)^{m-1-k}/(2^{m-1}(1-z_k))` for `k > 0`.
pub fn critical_point_product_closed_form(m: usize, k: usize) -> SignedLog {
    let ln_base = (m as f64).ln() - (m as f64 - 1.0) * 2f64.ln();
    if k == 0 {
        SignedLog::new((m - 1) % 2 == 1, ln_base)
    } else {
        // 1 - z_k = 2 sin²((m-k)π/(2m))
        let s = ((m - k) as f64 * PI / (2.0 * m as f64)).sin();
        let one_minus = 2.0 * s * s;
        SignedLog::new((m - 1 - k) % 2 == 1, ln_base - one_minus.ln())
    }
}
