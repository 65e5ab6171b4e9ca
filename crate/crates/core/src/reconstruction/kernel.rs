//! Admissible low-pass kernel with a quintic transition band.
//!
//! `φ̂(ξ) = 1` on `|ξ| ≤ Ω`, `B((|ξ|-Ω)/w)` on the transition band of width
//! `w = εΩ`, and `0` beyond `(1+ε)Ω`, with
//! `B(s) = 1 - 10s³ + 15s⁴ - 6s⁵` (value, slope and curvature match at both
//! edges). Since `φ̂` is `C²` and piecewise polynomial, integrating the
//! cosine transform by parts terminates: only the jumps of `B'''`, `B''''`
//! and `B⁽⁵⁾` at the two band edges survive, which gives `φ` in closed form
//! and the explicit decay envelope
//! `|φ(t)| ≤ Σ_{k=3}^{5} c_k / (w^k (2π|t|)^{k+1})`, `c = (240, 1440, 2880)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, integrate};

/// `∫₀¹ B(s) ds`.
pub const BLEND_INTEGRAL: f64 = 0.5;

/// Constants of the decay envelope for `k = 3, 4, 5`.
const ENVELOPE: [f64; 3] = [240.0, 1440.0, 2880.0];

fn blend(s: f64) -> f64 {
    1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

#[derive(Debug)]
pub struct Kernel {
    pub omega: f64,
    pub epsilon: f64,
    rule: (Vec<f64>, Vec<f64>),
    l1: OnceLock<f64>,
}

impl Clone for Kernel {
    fn clone(&self) -> Self {
        Self { omega: self.omega, epsilon: self.epsilon, rule: self.rule.clone(), l1: self.l1.clone() }
    }
}

/// Builds the kernel for band edge `Ω` and transition parameter `ε`.
pub fn design_kernel(omega: f64, epsilon: f64) -> Result<Kernel> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    Ok(Kernel { omega, epsilon, rule: gauss_legendre(16), l1: OnceLock::new() })
}

impl Kernel {
    /// Transition width `w = εΩ`.
    pub fn width(&self) -> f64 {
        self.epsilon * self.omega
    }

    /// Upper band edge `(1+ε)Ω`.
    pub fn band(&self) -> f64 {
        self.omega + self.width()
    }

    pub fn phi_hat(&self, xi: f64) -> f64 {
        let a = xi.abs();
        if a <= self.omega {
            1.0
        } else if a >= self.band() {
            0.0
        } else {
            blend((a - self.omega) / self.width())
        }
    }

    /// `φ(0) = ∫ φ̂ = 2Ω(1 + ε/2)`.
    pub fn phi_at_zero(&self) -> f64 {
        2.0 * (self.omega + self.width() * BLEND_INTEGRAL)
    }

    pub fn phi(&self, t: f64) -> f64 {
        let w = self.width();
        let om = 2.0 * PI * t.abs();
        if om == 0.0 {
            return self.phi_at_zero();
        }
        if om * w > 2.0 {
            // Jump terms of p''' cos/ω⁴, p'''' sin/ω⁵, p⁽⁵⁾ cos/ω⁶ at both
            // edges; B''' = -60 at 0 and 1, B'''' = 360 at 0 and -360 at 1,
            // B⁽⁵⁾ = -720.
            let (w3, w4, w5) = (w * w * w, w * w * w * w, w * w * w * w * w);
            let (o4, o5, o6) = (om.powi(4), om.powi(5), om.powi(6));
            let edge = |x: f64, d4: f64| {
                let (s, c) = (om * x).sin_cos();
                60.0 * c / (w3 * o4) + d4 * s / (w4 * o5) - 720.0 * c / (w5 * o6)
            };
            2.0 * (edge(self.band(), -360.0) - edge(self.omega, 360.0))
        } else {
            let flat = (om * self.omega).sin() / om;
            let trans = integrate(&self.rule, self.omega, self.band(), |xi| {
                blend((xi - self.omega) / w) * (om * xi).cos()
            });
            2.0 * (flat + trans)
        }
    }

    /// Decay envelope `E(t) ≥ |φ(t)|` for `t ≠ 0`.
    pub fn envelope(&self, t: f64) -> f64 {
        let w = self.width();
        let om = 2.0 * PI * t.abs();
        ENVELOPE
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = (i + 3) as i32;
                c / (w.powi(k) * om.powi(k + 1))
            })
            .sum()
    }

    /// `∫_s^∞ E(t) dt` for `s > 0`.
    pub fn envelope_tail(&self, s: f64) -> f64 {
        let w = self.width();
        ENVELOPE
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = (i + 3) as i32;
                c / (w.powi(k) * (2.0 * PI).powi(k + 1) * k as f64 * s.powi(k))
            })
            .sum()
    }

    /// Bound on `τ Σ_{|t-nτ| > T} |q_n φ(t-nτ)|` for `|q_n| ≤ q_max`.
    pub fn truncation_budget(&self, tau: f64, t_max: f64, q_max: f64) -> f64 {
        if t_max <= tau {
            return f64::INFINITY;
        }
        2.0 * q_max * self.envelope_tail(t_max - tau)
    }

    /// Smallest radius (to 1%) with `truncation_budget(τ, T, q_max) ≤ tol`.
    pub fn radius_for(&self, tau: f64, q_max: f64, tol: f64) -> f64 {
        let mut hi = tau + 1.0 / self.width();
        while self.truncation_budget(tau, hi, q_max) > tol {
            hi *= 2.0;
        }
        let mut lo = tau;
        while hi - lo > 0.01 * hi {
            let mid = 0.5 * (lo + hi);
            if self.truncation_budget(tau, mid, q_max) > tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// `∫₀^T f(φ(t)) dt` on panels of a quarter period of the top band
    /// frequency, split at sign changes of `φ` so that `|φ|` is smooth on
    /// every piece.
    fn panel_integral(&self, t_end: f64, signed: bool) -> f64 {
        let rule = gauss_legendre(8);
        let h = 1.0 / (16.0 * self.band());
        let panels = (t_end / h).ceil() as usize;
        let f = |t: f64| {
            let v = self.phi(t);
            if signed {
                v
            } else {
                v.abs()
            }
        };
        let mut total = 0.0;
        let mut left = self.phi(0.0);
        for i in 0..panels {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            let right = self.phi(b);
            if !signed && left * right < 0.0 {
                let z = self.bracket_zero(a, b, left);
                total += integrate(&rule, a, z, f) + integrate(&rule, z, b, f);
            } else {
                total += integrate(&rule, a, b, f);
            }
            left = right;
        }
        total
    }

    /// Zero of `φ` in `[a, b]` given `φ(a) = fa` and a sign change.
    fn bracket_zero(&self, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = self.phi(m);
            if (fm < 0.0) == (fa < 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    /// Integration radius whose one-sided envelope tail is below `tol`.
    fn integration_radius(&self, tol: f64) -> f64 {
        let mut t = 1.0 / self.width();
        while self.envelope_tail(t) > tol {
            t *= 1.25;
        }
        t
    }

    /// `‖φ‖₁`, including the envelope bound on the tail past the
    /// integration radius (so the value is an upper bound to ~1e-12).
    pub fn l1_norm(&self) -> f64 {
        *self.l1.get_or_init(|| {
            let t = self.integration_radius(1e-9 * self.omega.min(1.0));
            2.0 * (self.panel_integral(t, false) + self.envelope_tail(t))
        })
    }

    /// `∫φ`, which must equal `φ̂(0) = 1`.
    pub fn integral(&self) -> f64 {
        let t = self.integration_radius(1e-10);
        2.0 * self.panel_integral(t, true)
    }

    /// Fitted `C` in `|φ(t)| ≤ C/(1+t⁴)`: sampled maximum up to `t*`,
    /// where past `t* ≥ 1` the envelope times `1+t⁴` is decreasing.
    pub fn decay_constant(&self) -> f64 {
        let t_star = (4.0 / self.width()).max(1.0);
        let h = 1.0 / (16.0 * self.band());
        let sampled = (0..=(t_star / h).ceil() as usize)
            .map(|i| {
                let t = i as f64 * h;
                self.phi(t).abs() * (1.0 + t.powi(4))
            })
            .fold(0.0, f64::max);
        sampled.max(self.envelope(t_star) * (1.0 + t_star.powi(4)))
    }

    /// Largest deviation of the transform of `φ`, recovered numerically
    /// from its samples, from 1 on the pass band and from 0 on the stop
    /// band, over at least `n_freq` frequencies in `[0, 2(1+ε)Ω]`.
    ///
    /// With sample step `Δ = 1/(4(1+ε)Ω)` the periodised transform
    /// `Δ Σ_k φ(kΔ) e^{-2πiξkΔ}` equals `φ̂` on `[-(1+ε)Ω, 3(1+ε)Ω]` up
    /// to the truncation tail, which is included in the result.
    pub fn admissibility_defect(&self, n_freq: usize) -> (f64, f64) {
        let delta = 1.0 / (4.0 * self.band());
        let t = self.integration_radius(1e-11);
        let half = (t / delta).ceil() as usize;
        let size = (2 * half + 1).max(2 * n_freq).next_power_of_two();
        let mut buf = vec![Complex::new(0.0, 0.0); size];
        buf[0].re = delta * self.phi(0.0);
        for k in 1..=half.min(size / 2 - 1) {
            let v = delta * self.phi(k as f64 * delta);
            buf[k].re = v;
            buf[size - k].re = v;
        }
        FftPlanner::new().plan_fft_forward(size).process(&mut buf);
        let tail = 2.0 * self.envelope_tail(t);
        let (mut pass, mut stop) = (0.0f64, 0.0f64);
        for (j, c) in buf.iter().enumerate().take(size / 2) {
            let xi = j as f64 / (size as f64 * delta);
            if xi <= self.omega {
                pass = pass.max((c.re - 1.0).abs());
            } else if xi >= self.band() {
                stop = stop.max(c.re.abs());
            }
        }
        (pass + tail, stop + tail)
    }
}
