//! Error bounds as a function of the oversampling ratio, order selection,
//! and the multi-level rate / efficiency tables.

use std::f64::consts::{E, LN_2, PI};
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::export::fmt17;
use crate::filters::{design_log_g1, minimal_subordinate_sequence};
use crate::relaxed::{gamma_from_sigma, relaxed_minimizer};

/// `log₂(‖g‖₁ ‖φ₀‖₁ π^m (1+ε)^m λ^{-m})` with `‖v‖∞` taken as 1.
pub fn log2_error_bound(m: usize, lambda: f64, log_g1: f64, log_phi_l1: f64, epsilon: f64) -> f64 {
    let mf = m as f64;
    (log_g1 + log_phi_l1 + mf * PI.ln() + mf * epsilon.ln_1p() - mf * lambda.ln()) / LN_2
}

/// `ln ‖g‖₁` of the minimal subordinate design for `m = 1..=m_max`, all at
/// one level `γ`. Filled once in parallel, then read-only.
#[derive(Debug, Clone)]
pub struct DesignCache {
    pub gamma: f64,
    log_g1: Vec<f64>,
}

impl DesignCache {
    pub fn build(gamma: f64, m_max: usize) -> Result<Self> {
        if m_max == 0 {
            return Err(Error::InvalidOrder(0));
        }
        let log_g1 = (1..=m_max).into_par_iter().map(|m| design_log_g1(m, gamma)).collect::<Result<_>>()?;
        Ok(Self { gamma, log_g1 })
    }

    pub fn m_max(&self) -> usize {
        self.log_g1.len()
    }

    pub fn log_g1(&self, m: usize) -> f64 {
        self.log_g1[m - 1]
    }

    /// Order minimising the bound at `λ`.
    pub fn optimize(&self, lambda: f64, epsilon: f64, log_phi_l1: f64) -> OrderChoice {
        let (m_opt, log2_bound) = (1..=self.m_max())
            .map(|m| (m, log2_error_bound(m, lambda, self.log_g1(m), log_phi_l1, epsilon)))
            .fold((0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best });
        OrderChoice { lambda, m_opt, log2_bound, at_boundary: m_opt == self.m_max() }
    }

    pub fn bound_curve(&self, lambdas: &[f64], epsilon: f64, log_phi_l1: f64) -> Vec<OrderChoice> {
        lambdas.par_iter().map(|&l| self.optimize(l, epsilon, log_phi_l1)).collect()
    }
}

/// One entry of a bound curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderChoice {
    pub lambda: f64,
    pub m_opt: usize,
    pub log2_bound: f64,
    /// The minimum sits at the largest cached order; a larger cache may
    /// lower the bound further.
    pub at_boundary: bool,
}

impl OrderChoice {
    /// `-log₂(bound)/λ`, the effective exponential rate.
    pub fn rate(&self) -> f64 {
        -self.log2_bound / self.lambda
    }
}

/// Builds the cache and picks the best order at `λ` (kernel norm factor 1).
pub fn optimize_order(lambda: f64, gamma: f64, epsilon: f64, m_max: usize) -> Result<OrderChoice> {
    Ok(DesignCache::build(gamma, m_max)?.optimize(lambda, epsilon, 0.0))
}

/// `π λ / (σ e² (1+ε))`, the large-`λ` growth of the optimal order.
pub fn predicted_order(lambda: f64, sigma: f64, epsilon: f64) -> f64 {
    PI * lambda / (sigma * E * E * (1.0 + epsilon))
}

/// `π / (e² σ ln 2)`.
pub fn rate_constant(sigma: f64) -> f64 {
    PI / (E * E * sigma * LN_2)
}

/// One column of the multi-level comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub levels: usize,
    pub bits_per_sample: f64,
    pub sigma: u32,
    pub max_input: f64,
    pub r0: f64,
    pub efficiency: f64,
}

/// Smallest integer `σ ≥ 1` with `cosh(π/√σ) < L`.
pub fn minimal_sigma(levels: usize) -> Result<u32> {
    if levels < 2 {
        return Err(Error::InvalidParameter(format!("need L >= 2, got {levels}")));
    }
    Ok((1..).find(|&s| gamma_from_sigma(s as f64) < levels as f64).unwrap())
}

pub fn multilevel_table(levels: &[usize]) -> Result<Vec<RateRow>> {
    levels
        .iter()
        .map(|&l| {
            let sigma = minimal_sigma(l)?;
            let bits = (l as f64).log2();
            let r0 = rate_constant(sigma as f64);
            Ok(RateRow {
                levels: l,
                bits_per_sample: bits,
                sigma,
                max_input: l as f64 - gamma_from_sigma(sigma as f64),
                r0,
                efficiency: r0 / bits,
            })
        })
        .collect()
}

/// `m² / η(n^{(m)})^{1/m}` in log domain.
pub fn limit_factor(m: usize, gamma: f64) -> Result<f64> {
    let n = minimal_subordinate_sequence(m, gamma)?;
    let ln_eta: f64 = n.iter().map(|&v| (v as f64).ln()).sum();
    Ok((2.0 * (m as f64).ln() - ln_eta / m as f64).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyPoint {
    pub sigma: f64,
    pub limit_factor: f64,
    pub efficiency: f64,
    /// Factor at `m_est` and at `m_est/2` differ by less than 1%.
    pub converged: bool,
}

/// Coding efficiency `factor / (π e² ln⌈cosh(π/√σ)⌉)` with the limit
/// factor estimated at a single large order.
pub fn efficiency_curve(sigmas: &[f64], m_est: usize) -> Result<Vec<EfficiencyPoint>> {
    if m_est < 100 {
        return Err(Error::InvalidParameter(format!("m_est must be at least 100, got {m_est}")));
    }
    sigmas
        .par_iter()
        .map(|&sigma| {
            let gamma = gamma_from_sigma(sigma);
            let factor = limit_factor(m_est, gamma)?;
            let half = limit_factor(m_est / 2, gamma)?;
            let levels = gamma.ceil();
            Ok(EfficiencyPoint {
                sigma,
                limit_factor: factor,
                efficiency: factor / (PI * E * E * levels.ln()),
                converged: (factor / half - 1.0).abs() < 0.01,
            })
        })
        .collect()
}

/// `x_{j-1}` and `n_j` at order `m_est`, plus the integer limit where valid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionPoint {
    pub sigma: f64,
    pub j: usize,
    pub x_prev: f64,
    pub n_j: u64,
    pub limit: Option<u64>,
}

pub fn sigma_quantization_curve(sigmas: &[f64], js: &[usize], m_est: usize) -> Result<Vec<PositionPoint>> {
    let per_sigma: Vec<Vec<PositionPoint>> = sigmas
        .par_iter()
        .map(|&sigma| {
            let gamma = gamma_from_sigma(sigma);
            let sol = relaxed_minimizer(m_est, gamma)?;
            let n = minimal_subordinate_sequence(m_est, gamma)?;
            js.iter()
                .map(|&j| {
                    if j == 0 || j > m_est {
                        return Err(Error::InvalidParameter(format!("j = {j} outside 1..={m_est}")));
                    }
                    Ok(PositionPoint {
                        sigma,
                        j,
                        x_prev: sol.coordinate(j - 1),
                        n_j: n[j - 1],
                        limit: crate::filters::asymptotic_position(sigma, j).ok(),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_sigma.into_iter().flatten().collect())
}

pub fn write_rate_table<W: Write>(out: W, rows: &[RateRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["L", "bits", "sigma", "max_input", "r0", "efficiency"])?;
    for r in rows {
        w.write_record([
            r.levels.to_string(),
            fmt17(r.bits_per_sample),
            r.sigma.to_string(),
            fmt17(r.max_input),
            fmt17(r.r0),
            fmt17(r.efficiency),
        ])?;
    }
    w.flush()
}

pub fn write_bound_curve<W: Write>(out: W, rows: &[OrderChoice]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lambda", "m_opt", "log2_bound", "at_boundary"])?;
    for r in rows {
        w.write_record([fmt17(r.lambda), r.m_opt.to_string(), fmt17(r.log2_bound), r.at_boundary.to_string()])?;
    }
    w.flush()
}

pub fn write_efficiency_curve<W: Write>(out: W, rows: &[EfficiencyPoint]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sigma", "limit_factor", "efficiency", "converged"])?;
    for r in rows {
        w.write_record([fmt17(r.sigma), fmt17(r.limit_factor), fmt17(r.efficiency), r.converged.to_string()])?;
    }
    w.flush()
}

pub fn write_position_curve<W: Write>(out: W, rows: &[PositionPoint]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sigma", "j", "x_prev", "n_j", "limit"])?;
    for r in rows {
        w.write_record([
            fmt17(r.sigma),
            r.j.to_string(),
            fmt17(r.x_prev),
            r.n_j.to_string(),
            r.limit.map_or(String::new(), |v| v.to_string()),
        ])?;
    }
    w.flush()
}
