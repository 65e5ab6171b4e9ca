//! Reconstruction `τ Σ q_n φ(t - nτ)` and the sup-norm error.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::kernel::Kernel;
use super::signal::{eval_signal, SignalSpec};
use crate::error::{Error, Result};
use crate::modulator::ModulatorTrace;

fn check_admissible(kernel: &Kernel, tau: f64) -> Result<()> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    if kernel.band() > 0.5 / tau * (1.0 + 1e-12) {
        return Err(Error::KernelMismatch { tau, band: kernel.band() });
    }
    Ok(())
}

/// `τ Σ_{|t-nτ| ≤ T} q_n φ(t - nτ)` with `q_n` at `t_n = nτ`, `n ≥ 0`.
pub fn reconstruct(q: &[f64], tau: f64, kernel: &Kernel, t_max: f64, t: f64) -> Result<f64> {
    check_admissible(kernel, tau)?;
    let lo = ((t - t_max) / tau).ceil().max(0.0) as usize;
    let hi = ((t + t_max) / tau).floor();
    if hi < 0.0 {
        return Ok(0.0);
    }
    let hi = (hi as usize).min(q.len().saturating_sub(1));
    Ok(tau * (lo..=hi).filter(|&n| n < q.len()).map(|n| q[n] * kernel.phi(t - n as f64 * tau)).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// Largest `|x(t) - x̃(t)|` over the evaluation lattice.
    pub sup: f64,
    /// Bound on the terms dropped beyond the kernel radius.
    pub budget: f64,
    pub points: usize,
}

impl ErrorReport {
    pub fn total(&self) -> f64 {
        self.sup + self.budget
    }
}

/// Sup-norm error of the reconstruction from `trace.q` against the signal,
/// on the lattice `t = kτ/G` (`G = points_per_sample ≥ 8`) inside `window`.
///
/// The kernel is tabulated exactly at `jτ/G`, `|jτ/G| ≤ T`, and each of
/// the `G` polyphase components is convolved with `q` by FFT, so no
/// interpolation error enters. The window must keep a margin of `T` from
/// both ends of the sampled range.
pub fn sup_error(
    spec: &SignalSpec,
    trace: &ModulatorTrace,
    tau: f64,
    kernel: &Kernel,
    t_max: f64,
    window: (f64, f64),
    points_per_sample: usize,
) -> Result<ErrorReport> {
    check_admissible(kernel, tau)?;
    let g = points_per_sample;
    if g < 8 {
        return Err(Error::InvalidParameter(format!("need at least 8 points per sample, got {g}")));
    }
    let (t_lo, t_hi) = window;
    if !(t_lo <= t_hi) {
        return Err(Error::Window(format!("empty window [{t_lo}, {t_hi}]")));
    }
    let q = &trace.q;
    let n_samples = q.len();
    let last = n_samples as f64 * tau - tau;
    if t_lo - t_max < 0.0 || t_hi + t_max > last {
        return Err(Error::Window(format!(
            "window [{t_lo}, {t_hi}] needs margin {t_max} inside [0, {last}]"
        )));
    }

    let step = tau / g as f64;
    let j_max = (t_max / step).floor() as i64;
    let table: Vec<f64> = (0..=j_max).map(|j| kernel.phi(j as f64 * step)).collect();
    let phi_at = |j: i64| if j.abs() <= j_max { table[j.unsigned_abs() as usize] } else { 0.0 };

    let k_lo = (t_lo / step).ceil() as i64;
    let k_hi = (t_hi / step).floor() as i64;
    let i_lo = k_lo.div_euclid(g as i64);
    let i_hi = k_hi.div_euclid(g as i64);
    let d_max = j_max / g as i64 + 1;
    // q segment covering n = i - d for i in [i_lo, i_hi], |d| ≤ d_max.
    let seg_lo = i_lo - d_max;
    let seg_hi = i_hi + d_max;
    let seg: Vec<f64> =
        (seg_lo..=seg_hi).map(|n| if n >= 0 && (n as usize) < n_samples { q[n as usize] } else { 0.0 }).collect();
    let filt_len = (2 * d_max + 1) as usize;
    let size = (seg.len() + filt_len - 1).next_power_of_two();

    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut seg_hat: Vec<Complex<f64>> = seg.iter().map(|&v| Complex::new(v, 0.0)).collect();
    seg_hat.resize(size, Complex::new(0.0, 0.0));
    fwd.process(&mut seg_hat);

    let mut sup = 0.0f64;
    let mut points = 0usize;
    for r in 0..g as i64 {
        let mut f: Vec<Complex<f64>> =
            (-d_max..=d_max).map(|d| Complex::new(phi_at(d * g as i64 + r), 0.0)).collect();
        f.resize(size, Complex::new(0.0, 0.0));
        fwd.process(&mut f);
        for (a, b) in f.iter_mut().zip(&seg_hat) {
            *a *= b;
        }
        inv.process(&mut f);
        let scale = tau / size as f64;
        for i in i_lo..=i_hi {
            let k = i * g as i64 + r;
            if k < k_lo || k > k_hi {
                continue;
            }
            // out[s] = Σ_a f[a] seg[s-a], a = d + d_max, s - a = i - d - seg_lo.
            let s = (i - seg_lo + d_max) as usize;
            let rec = f[s].re * scale;
            let t = k as f64 * step;
            sup = sup.max((eval_signal(spec, t) - rec).abs());
            points += 1;
        }
    }
    let q_max = q.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(ErrorReport { sup, budget: kernel.truncation_budget(tau, t_max, q_max), points })
}
