//! Closed-form solution of the relaxed support-placement problem.
//!
//! Minimise `η(x) = ∏ x_j` over `1 < x_1 < ... < x_{m-1}` subject to
//! `f(x) = Σ_j ∏'_i x_i/|x_i - x_j| ≤ γ` (with `x_0 ≡ 1`). The unique
//! minimiser is an affinely rescaled set of Chebyshev second-kind zeros,
//! `x_j = 1 + K(1 + z_j)` with `K = 1/(2 sinh²β)` and `β` the positive root of
//! `cosh((2m-1)β)/cosh β = γ`.

mod matrix;

pub use matrix::{build_b_matrix, jordan_residual, p_vector, JordanReport};

use std::f64::consts::PI;

use crate::chebyshev::second_kind_zeros;
use crate::error::{Error, Result};
use crate::logmag::log_sum_exp;

/// `σ = π² / arccosh²(γ)`.
pub fn sigma_from_gamma(gamma: f64) -> f64 {
    let a = gamma.acosh();
    PI * PI / (a * a)
}

/// `γ = cosh(π/√σ)`.
pub fn gamma_from_sigma(sigma: f64) -> f64 {
    (PI / sigma.sqrt()).cosh()
}

fn check_order_and_level(m: usize, gamma: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidOrder(m));
    }
    if gamma.is_nan() || gamma <= 1.0 {
        return Err(Error::NoSolution(gamma));
    }
    if !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma = {gamma}")));
    }
    Ok(())
}

/// `cosh((2m-1)β) / cosh β`, strictly increasing in `β > 0`.
pub fn beta_ratio(m: usize, beta: f64) -> f64 {
    ((2 * m - 1) as f64 * beta).cosh() / beta.cosh()
}

/// Positive root `β` of `cosh((2m-1)β)/cosh β = γ`.
///
/// Bisection on `[arccosh γ/(2m), arccosh γ/(2m-2)]`, which always brackets
/// the root, run until the bracket collapses to adjacent doubles.
pub fn solve_beta(m: usize, gamma: f64) -> Result<f64> {
    check_order_and_level(m, gamma)?;
    let a = gamma.acosh();
    let mut lo = a / (2 * m) as f64;
    let mut hi = a / (2 * m - 2) as f64;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_ratio(m, mid) < gamma {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (rl, rh) = (beta_ratio(m, lo), beta_ratio(m, hi));
    Ok(if (rl - gamma).abs() <= (rh - gamma).abs() { lo } else { hi })
}

/// The relaxed minimiser for order `m` and constraint level `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedSolution {
    pub m: usize,
    pub gamma: f64,
    pub beta: f64,
    /// `K = 1/(2 sinh² β)`.
    pub k: f64,
    /// `x_1 < ... < x_{m-1}`; `x_0 ≡ 1` is implicit.
    pub x: Vec<f64>,
    /// `ln η_min` from the closed form.
    pub log_eta_min: f64,
}

impl RelaxedSolution {
    /// `x_j` with `x_0 = 1`, for `j = 0..m-1`.
    pub fn coordinate(&self, j: usize) -> f64 {
        if j == 0 {
            1.0
        } else {
            self.x[j - 1]
        }
    }

    /// `x_j / x_{j-1}` for `j = 1..m-1`.
    pub fn ratio(&self, j: usize) -> f64 {
        self.coordinate(j) / self.coordinate(j - 1)
    }

    pub fn sigma(&self) -> f64 {
        sigma_from_gamma(self.gamma)
    }

    pub fn point(&self) -> ConstraintPoint {
        ConstraintPoint::new(self.x.clone()).expect("relaxed minimiser lies in the domain")
    }
}

/// Closed-form `ln η_min = ln sinh(2mβ) - (2m-1) ln(2 sinh β) - ln cosh β`.
pub fn log_eta_closed_form(m: usize, beta: f64) -> f64 {
    let mf = m as f64;
    (2.0 * mf * beta).sinh().ln() - (2.0 * mf - 1.0) * (2.0 * beta.sinh()).ln() - beta.cosh().ln()
}

/// Solves the relaxed problem in closed form.
pub fn relaxed_minimizer(m: usize, gamma: f64) -> Result<RelaxedSolution> {
    let beta = solve_beta(m, gamma)?;
    let sh = beta.sinh();
    let k = 1.0 / (2.0 * sh * sh);
    let nodes = second_kind_zeros(m)?;
    let x = (1..m).map(|j| 1.0 + k * nodes.one_plus(j)).collect();
    Ok(RelaxedSolution { m, gamma, beta, k, x, log_eta_min: log_eta_closed_form(m, beta) })
}

/// A point of the domain `1 < x_1 < ... < x_{m-1}`, kept together with the
/// logarithms of the successive ratios `r_j = x_j / x_{j-1}` (`x_0 ≡ 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintPoint {
    x: Vec<f64>,
    ln_ratios: Vec<f64>,
}

impl ConstraintPoint {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if let Some(v) = x.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Domain(format!("coordinate {v} is not a positive number")));
        }
        let full: Vec<f64> = std::iter::once(1.0).chain(x.iter().copied()).collect();
        for i in 0..full.len() {
            for j in i + 1..full.len() {
                if full[i] == full[j] {
                    return Err(Error::SingularPoint(i, j));
                }
            }
        }
        if full.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("coordinates must satisfy 1 < x_1 < ... < x_{m-1}".into()));
        }
        let ln_ratios = full.windows(2).map(|w| ((w[1] - w[0]) / w[0]).ln_1p()).collect();
        Ok(Self { x, ln_ratios })
    }

    /// Builds the point from ratios `r_j > 1`.
    pub fn from_ratios(ratios: &[f64]) -> Result<Self> {
        if let Some(r) = ratios.iter().find(|r| !(r.is_finite() && **r > 1.0)) {
            return Err(Error::Domain(format!("ratio {r} must exceed 1")));
        }
        let ln_ratios: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
        let mut acc = 0.0;
        let x = ln_ratios
            .iter()
            .map(|l| {
                acc += l;
                acc.exp()
            })
            .collect();
        Ok(Self { x, ln_ratios })
    }

    pub fn coords(&self) -> &[f64] {
        &self.x
    }

    /// `m`, the number of support points including `x_0`.
    pub fn order(&self) -> usize {
        self.x.len() + 1
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.ln_ratios.iter().map(|l| l.exp()).collect()
    }

    fn coordinate(&self, j: usize) -> f64 {
        if j == 0 {
            1.0
        } else {
            self.x[j - 1]
        }
    }

    fn min_relative_gap(&self) -> f64 {
        let max = self.x.last().copied().unwrap_or(1.0);
        (0..self.x.len())
            .map(|j| self.coordinate(j + 1) - self.coordinate(j))
            .fold(f64::INFINITY, f64::min)
            / max
    }
}

/// `ln x_i/|x_i - x_j|` from the direct coordinates.
fn direct_log_terms(p: &ConstraintPoint) -> Vec<f64> {
    let m = p.order();
    (0..m)
        .map(|j| {
            let xj = p.coordinate(j);
            (0..m)
                .filter(|&i| i != j)
                .map(|i| {
                    let xi = p.coordinate(i);
                    xi.ln() - (xi - xj).abs().ln()
                })
                .sum()
        })
        .collect()
}

/// Same terms through the ratios: for `i > j`,
/// `x_i/(x_i - x_j) = 1/(1 - 1/(r_{j+1}⋯r_i))`, and for `i < j`,
/// `x_i/(x_j - x_i) = 1/(r_{i+1}⋯r_j - 1)`.
fn ratio_log_terms(p: &ConstraintPoint) -> Vec<f64> {
    let m = p.order();
    let lr = &p.ln_ratios;
    (0..m)
        .map(|j| {
            let mut total = 0.0;
            let mut l = 0.0;
            for i in j + 1..m {
                l += lr[i - 1];
                total -= (-(-l).exp_m1()).ln();
            }
            l = 0.0;
            for i in (0..j).rev() {
                l += lr[i];
                total -= l.exp_m1().ln();
            }
            total
        })
        .collect()
}

/// `f(x)` evaluated from the coordinates directly.
pub fn constraint_f_direct(p: &ConstraintPoint) -> f64 {
    log_sum_exp(&direct_log_terms(p)).exp()
}

/// `f(x)` evaluated in the ratio form, free of cancellation in `x_i - x_j`.
pub fn constraint_f_ratio(p: &ConstraintPoint) -> f64 {
    log_sum_exp(&ratio_log_terms(p)).exp()
}

/// `f(x) = Σ_{j=0}^{m-1} ∏'_i x_i/|x_i - x_j|` with `x_0 ≡ 1`.
///
/// Uses the ratio form when two coordinates are closer than `1e-6` times
/// the largest one, the direct form otherwise.
pub fn constraint_f(p: &ConstraintPoint) -> f64 {
    if p.min_relative_gap() < 1e-6 {
        constraint_f_ratio(p)
    } else {
        constraint_f_direct(p)
    }
}

/// `ln η(x) = Σ ln x_j`.
pub fn log_eta(x: &[f64]) -> Result<f64> {
    x.iter().try_fold(0.0, |acc, &v| {
        if v > 0.0 {
            Ok(acc + v.ln())
        } else {
            Err(Error::Domain(format!("nonpositive coordinate {v}")))
        }
    })
}

/// Relative slack used when comparing successive ratios `y_j/x_j`.
pub const SUBORDINACY_TOLERANCE: f64 = 1e-12;

/// `y` is subordinate to `x` when `1 ≤ y_1/x_1 ≤ ... ≤ y_{m-1}/x_{m-1}`.
///
/// Comparisons allow a relative slack of [`SUBORDINACY_TOLERANCE`] so that
/// exact coincidences computed in floating point (an integer equal to a
/// closed-form coordinate) are not rejected by rounding.
pub fn is_subordinate(x: &[f64], y: &[f64]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch { expected: x.len(), found: y.len() });
    }
    let mut prev = 1.0;
    for (xj, yj) in x.iter().zip(y) {
        let q = yj / xj;
        if q < prev * (1.0 - SUBORDINACY_TOLERANCE) {
            return Ok(false);
        }
        prev = q.max(prev);
    }
    Ok(true)
}
