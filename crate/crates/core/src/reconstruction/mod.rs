//! Bandlimited test signals, the reconstruction kernel, and measured
//! quantization error as a function of the oversampling ratio.

mod error;
mod kernel;
mod signal;

pub use error::{reconstruct, sup_error, ErrorReport};
pub use kernel::{design_kernel, Kernel, BLEND_INTEGRAL};
pub use signal::{eval_signal, SignalSpec, Tone};

use std::io::Write;

use rayon::prelude::*;

use crate::error::Result;
use crate::export::fmt17;
use crate::filters::{h_from_design, FilterDesign};
use crate::modulator::{run_greedy, Alphabet};
use crate::rate::log2_error_bound;
use crate::rng::SplitRng;

/// Settings shared by every point of an error sweep.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub omega: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub levels: usize,
    pub mu: f64,
    /// Evaluation window length in time units, so it covers the same
    /// stretch of the signal at every `λ`.
    pub window_span: f64,
    /// Independent phase draws per point; the reported error is the largest.
    pub phase_draws: usize,
    pub points_per_sample: usize,
    /// Absolute bound on the dropped kernel tail.
    pub tail_tolerance: f64,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            omega: 0.5,
            epsilon: 1.0,
            gamma: 1.5,
            levels: 2,
            mu: 0.3,
            window_span: 256.0,
            phase_draws: 4,
            points_per_sample: 8,
            tail_tolerance: 1e-10,
            seed: 0,
        }
    }
}

impl SweepConfig {
    /// Two-tone input; phases for draw `k` come from stream `k` of the seed.
    pub fn signal(&self, draw: usize) -> Result<SignalSpec> {
        let mut rng = SplitRng::child(self.seed, draw as u64);
        let p = (rng.uniform_in(0.0, std::f64::consts::TAU), rng.uniform_in(0.0, std::f64::consts::TAU));
        SignalSpec::two_tone(self.omega, self.mu, p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub m: usize,
    pub sup_error: f64,
    pub bound: f64,
    pub truncation_budget: f64,
}

impl SweepRow {
    /// Measured error, tail included, is within the worst-case bound.
    pub fn within_bound(&self) -> bool {
        self.sup_error + self.truncation_budget <= self.bound
    }
}

/// Simulates order `m` at oversampling `λ` and measures the error.
pub fn simulate_point(cfg: &SweepConfig, m: usize, lambda: f64) -> Result<SweepRow> {
    let kernel = design_kernel(cfg.omega, cfg.epsilon)?;
    simulate_with_kernel(cfg, &kernel, m, lambda)
}

fn simulate_with_kernel(cfg: &SweepConfig, kernel: &Kernel, m: usize, lambda: f64) -> Result<SweepRow> {
    let tau = 1.0 / (2.0 * cfg.omega * lambda);
    let design = FilterDesign::new(m, cfg.gamma)?;
    let alphabet = Alphabet::new(cfg.levels)?;
    let q_max = (cfg.levels - 1) as f64;
    let t_max = kernel.radius_for(tau, q_max, cfg.tail_tolerance);
    let width = cfg.window_span;
    let count = ((2.0 * t_max + width) / tau).ceil() as usize + 8;
    let lo = t_max + 2.0 * tau;
    let h = h_from_design(&design);
    let mut sup = 0.0f64;
    let mut budget = 0.0f64;
    for draw in 0..cfg.phase_draws.max(1) {
        let spec = cfg.signal(draw)?;
        let trace = run_greedy(&h, &spec.samples(tau, count), &alphabet)?;
        let rep = sup_error(&spec, &trace, tau, kernel, t_max, (lo, lo + width), cfg.points_per_sample)?;
        sup = sup.max(rep.sup);
        budget = budget.max(rep.budget);
    }
    let log2_bound = log2_error_bound(m, lambda, design.log_g1, kernel.l1_norm().ln(), cfg.epsilon);
    Ok(SweepRow { lambda, m, sup_error: sup, bound: log2_bound.exp2(), truncation_budget: budget })
}

/// Runs every `(m, λ)` point on the current rayon pool; rows come back
/// in input order whatever the completion order.
pub fn run_sweep(cfg: &SweepConfig, points: &[(usize, f64)]) -> Result<Vec<Result<SweepRow>>> {
    let kernel = design_kernel(cfg.omega, cfg.epsilon)?;
    kernel.l1_norm();
    Ok(points.par_iter().map(|&(m, lambda)| simulate_with_kernel(cfg, &kernel, m, lambda)).collect())
}

/// Least-squares slope of `ln error` against `ln λ`.
pub fn log_log_slope(rows: &[SweepRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.lambda.ln(), r.sup_error.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Columns `lambda, m, sup_error, bound, truncation_budget, status`;
/// failed points keep their `(m, λ)` and carry the error text.
pub fn write_sweep_csv<W: Write>(
    out: W,
    points: &[(usize, f64)],
    rows: &[Result<SweepRow>],
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lambda", "m", "sup_error", "bound", "truncation_budget", "status"])?;
    for (&(m, lambda), row) in points.iter().zip(rows) {
        match row {
            Ok(r) => w.write_record([
                fmt17(r.lambda),
                r.m.to_string(),
                fmt17(r.sup_error),
                fmt17(r.bound),
                fmt17(r.truncation_budget),
                if r.within_bound() { "ok".into() } else { "above-bound".to_string() },
            ])?,
            Err(e) => w.write_record([
                fmt17(lambda),
                m.to_string(),
                String::new(),
                String::new(),
                String::new(),
                format!("error: {e}"),
            ])?,
        }
    }
    w.flush()
}
