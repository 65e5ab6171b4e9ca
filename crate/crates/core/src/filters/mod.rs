//! Integer-supported feedback filters.
//!
//! A minimally supported filter of order `m` is `h = Σ d_j δ^{(n_j)}` with
//! `1 = n_1 < ... < n_m` and the `d_j` fixed by the `m` moment conditions.
//! The support comes from rounding the relaxed minimiser up, one ratio at a
//! time, which keeps the sequence subordinate and therefore feasible.

mod accumulate;

pub use accumulate::g_from_h;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::export::json_number;
use crate::logmag::{ln_factorial, log_sum_exp, SignedLog};
use crate::relaxed::{constraint_f, relaxed_minimizer, ConstraintPoint};

/// Rounds `v` up, except that values within floating noise of an integer
/// snap to it first.
fn noisy_ceil(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= (1e-13 * v).max(1e-9) {
        r
    } else {
        v.ceil()
    }
}

/// `n_1 = 1`, `n_{j+1} = ⌈n_j x_j / x_{j-1}⌉` with `x` the relaxed minimiser
/// of order `m` at level `γ` and `x_0 = 1`.
pub fn minimal_subordinate_sequence(m: usize, gamma: f64) -> Result<Vec<u64>> {
    if m == 0 {
        return Err(Error::InvalidOrder(m));
    }
    if gamma.is_nan() || gamma <= 1.0 {
        return Err(Error::NoSolution(gamma));
    }
    if m == 1 {
        return Ok(vec![1]);
    }
    let sol = relaxed_minimizer(m, gamma)?;
    let mut n = Vec::with_capacity(m);
    n.push(1u64);
    let mut cur = 1.0f64;
    for j in 1..m {
        cur = noisy_ceil(cur * sol.ratio(j));
        if cur > (1u64 << 53) as f64 {
            return Err(Error::InvalidParameter(format!("support position overflow at m = {m}")));
        }
        n.push(cur as u64);
    }
    Ok(n)
}

/// `d_j = ∏'_i n_i/(n_i - n_j)` as sign + log-magnitude values.
///
/// The sign is `(-1)^{j-1}` (one negative factor for each `i < j`).
pub fn filter_coefficients(n: &[u64]) -> Result<Vec<SignedLog>> {
    if n.is_empty() {
        return Err(Error::InvalidOrder(0));
    }
    if n[0] == 0 {
        return Err(Error::NonCausal(0));
    }
    for (i, w) in n.windows(2).enumerate() {
        if w[0] == w[1] {
            return Err(Error::SingularPoint(i, i + 1));
        }
        if w[0] > w[1] {
            return Err(Error::Domain(format!("positions not increasing at index {}", i + 1)));
        }
    }
    let ln_n: Vec<f64> = n.iter().map(|&v| (v as f64).ln()).collect();
    Ok((0..n.len())
        .map(|j| {
            let ln_abs = (0..n.len())
                .filter(|&i| i != j)
                .map(|i| ln_n[i] - (n[i].abs_diff(n[j]) as f64).ln())
                .sum();
            SignedLog::new(j % 2 == 1, ln_abs)
        })
        .collect())
}

/// `ln ‖g‖₁ = Σ ln n_j - ln m!`.
pub fn log_g1_of(n: &[u64]) -> f64 {
    n.iter().map(|&v| (v as f64).ln()).sum::<f64>() - ln_factorial(n.len())
}

/// `ln ‖g‖₁` of the minimal subordinate design without forming coefficients.
pub fn design_log_g1(m: usize, gamma: f64) -> Result<f64> {
    Ok(log_g1_of(&minimal_subordinate_sequence(m, gamma)?))
}

/// A realizable minimally supported filter.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterDesign {
    pub m: usize,
    pub gamma: f64,
    /// `1 = n_1 < ... < n_m`.
    pub n: Vec<u64>,
    pub d: Vec<SignedLog>,
    /// `ln ‖g‖₁ = ln(∏ n_j / m!)`.
    pub log_g1: f64,
    /// `‖h‖₁ = Σ |d_j|`.
    pub h_one_norm: f64,
}

impl FilterDesign {
    /// The minimal subordinate design of order `m` at level `γ`.
    pub fn new(m: usize, gamma: f64) -> Result<Self> {
        let n = minimal_subordinate_sequence(m, gamma)?;
        let design = Self::from_support(gamma, n)?;
        if design.h_one_norm > gamma * (1.0 + 1e-12) {
            return Err(Error::InfeasibleFilter(format!(
                "‖h‖₁ = {} exceeds gamma = {gamma}",
                design.h_one_norm
            )));
        }
        Ok(design)
    }

    /// Builds the design for an explicit support; feasibility is not checked.
    pub fn from_support(gamma: f64, n: Vec<u64>) -> Result<Self> {
        let d = filter_coefficients(&n)?;
        let logs: Vec<f64> = d.iter().map(|c| c.ln_abs).collect();
        Ok(Self {
            m: n.len(),
            gamma,
            log_g1: log_g1_of(&n),
            h_one_norm: log_sum_exp(&logs).exp(),
            n,
            d,
        })
    }

    pub fn d_values(&self) -> Vec<f64> {
        self.d.iter().map(SignedLog::to_f64).collect()
    }

    /// `{m, gamma, n, d, h_one_norm, log_g1}` plus the sign / log-magnitude
    /// form of `d`, which stays finite when the plain values overflow.
    pub fn to_json(&self) -> Value {
        let nums = |v: Vec<f64>| Value::Array(v.into_iter().map(json_number).collect());
        json!({
            "m": self.m,
            "gamma": json_number(self.gamma),
            "n": self.n,
            "d": nums(self.d_values()),
            "d_sign": self.d.iter().map(|c| if c.negative { -1 } else { 1 }).collect::<Vec<i32>>(),
            "d_ln_abs": nums(self.d.iter().map(|c| c.ln_abs).collect()),
            "h_one_norm": json_number(self.h_one_norm),
            "log_g1": json_number(self.log_g1),
        })
    }
}

/// A strictly causal sparse filter `h = Σ c_k δ^{(p_k)}`, `p_k ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseFilter {
    taps: Vec<(usize, f64)>,
}

impl SparseFilter {
    pub fn new(taps: Vec<(usize, f64)>) -> Result<Self> {
        for (i, &(p, _)) in taps.iter().enumerate() {
            if p == 0 {
                return Err(Error::NonCausal(0));
            }
            if i > 0 && taps[i - 1].0 >= p {
                return Err(Error::Domain(format!("tap positions not increasing at {p}")));
            }
        }
        Ok(Self { taps })
    }

    pub fn taps(&self) -> &[(usize, f64)] {
        &self.taps
    }

    /// Largest tap position, the memory span of the filter.
    pub fn span(&self) -> usize {
        self.taps.last().map_or(0, |t| t.0)
    }

    pub fn one_norm(&self) -> f64 {
        self.taps.iter().map(|t| t.1.abs()).sum()
    }
}

/// `h = Σ d_j δ^{(n_j)}`.
pub fn h_from_design(design: &FilterDesign) -> SparseFilter {
    let taps = design.n.iter().zip(&design.d).map(|(&p, c)| (p as usize, c.to_f64())).collect();
    SparseFilter::new(taps).expect("design positions are increasing and start at 1")
}

/// `w_j = 1 + σ j²`, `j = 1..m-1`.
pub fn w_sequence(sigma: f64, m: usize) -> Vec<f64> {
    (1..m).map(|j| 1.0 + sigma * (j * j) as f64).collect()
}

/// Large-`m` limit `1 + ⌈σ⌉(j-1)²` of `n_j`, valid for `σ > 5/4`.
pub fn asymptotic_position(sigma: f64, j: usize) -> Result<u64> {
    if sigma.is_nan() || sigma <= 1.25 {
        return Err(Error::OutOfRegime(sigma));
    }
    if j == 0 {
        return Err(Error::InvalidParameter("position index starts at 1".into()));
    }
    Ok(1 + sigma.ceil() as u64 * ((j - 1) * (j - 1)) as u64)
}

/// `(η(n)/η(x))^{1/m}` for the integer design against the relaxed optimum.
pub fn optimality_ratio(m: usize, gamma: f64) -> Result<f64> {
    let n = minimal_subordinate_sequence(m, gamma)?;
    let sol = relaxed_minimizer(m, gamma)?;
    let ln_n: f64 = n.iter().map(|&v| (v as f64).ln()).sum();
    Ok(((ln_n - sol.log_eta_min) / m as f64).exp())
}

/// `f` evaluated at the integer support, the constraint value of the design.
pub fn support_constraint(n: &[u64]) -> Result<f64> {
    let p = ConstraintPoint::new(n[1..].iter().map(|&v| v as f64).collect())?;
    Ok(constraint_f(&p))
}
