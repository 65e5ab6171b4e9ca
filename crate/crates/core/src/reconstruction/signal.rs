//! Exactly bandlimited test inputs: finite sums of sinusoids.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng::SplitRng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tone {
    pub freq: f64,
    pub amplitude: f64,
    pub phase: f64,
}

/// `x(t) = Σ a_i cos(2π f_i t + θ_i)` with `|f_i| < Ω` and `Σ|a_i| ≤ μ ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    pub omega: f64,
    pub tones: Vec<Tone>,
    pub mu: f64,
}

impl SignalSpec {
    pub fn new(omega: f64, tones: Vec<Tone>, mu: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
        }
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidParameter(format!("mu must lie in [0, 1], got {mu}")));
        }
        if let Some(t) = tones.iter().find(|t| !(t.freq.abs() < omega)) {
            return Err(Error::InvalidParameter(format!("tone at {} is outside the band", t.freq)));
        }
        let total: f64 = tones.iter().map(|t| t.amplitude.abs()).sum();
        if total > mu * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!("amplitudes sum to {total} > mu = {mu}")));
        }
        Ok(Self { omega, tones, mu })
    }

    /// Two tones at `0.31Ω` and `0.73Ω` with amplitudes `0.6μ` and `0.4μ`.
    pub fn two_tone(omega: f64, mu: f64, phases: (f64, f64)) -> Result<Self> {
        Self::new(
            omega,
            vec![
                Tone { freq: 0.31 * omega, amplitude: 0.6 * mu, phase: phases.0 },
                Tone { freq: 0.73 * omega, amplitude: 0.4 * mu, phase: phases.1 },
            ],
            mu,
        )
    }

    /// `count` tones with random in-band frequencies, phases, and
    /// amplitudes rescaled so that `Σ|a_i| = μ`.
    pub fn random(rng: &mut SplitRng, omega: f64, mu: f64, count: usize) -> Result<Self> {
        let mut tones: Vec<Tone> = (0..count)
            .map(|_| Tone {
                freq: rng.uniform_in(0.0, 0.98) * omega,
                amplitude: rng.uniform_in(0.1, 1.0),
                phase: rng.uniform_in(0.0, 2.0 * PI),
            })
            .collect();
        let total: f64 = tones.iter().map(|t| t.amplitude).sum();
        for t in &mut tones {
            t.amplitude *= mu / total;
        }
        Self::new(omega, tones, mu)
    }

    /// Samples `x(nτ)`, `n = 0..count`.
    pub fn samples(&self, tau: f64, count: usize) -> Vec<f64> {
        (0..count).map(|n| eval_signal(self, n as f64 * tau)).collect()
    }
}

pub fn eval_signal(spec: &SignalSpec, t: f64) -> f64 {
    spec.tones.iter().map(|c| c.amplitude * (2.0 * PI * c.freq * t + c.phase).cos()).sum()
}
