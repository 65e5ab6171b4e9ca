//! Greedy feedback quantization `v_n = (h*v)_n + y_n - q_n`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::export::fmt17;
use crate::filters::{FilterDesign, SparseFilter};

/// `L` equispaced levels `-(L-1), -(L-3), ..., L-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Alphabet {
    levels: Vec<f64>,
}

impl Alphabet {
    pub fn new(l: usize) -> Result<Self> {
        if l < 2 {
            return Err(Error::InvalidParameter(format!("alphabet needs L >= 2, got {l}")));
        }
        let top = (l - 1) as f64;
        Ok(Self { levels: (0..l).map(|k| 2.0 * k as f64 - top).collect() })
    }

    pub fn one_bit() -> Self {
        Self::new(2).unwrap()
    }

    pub fn size(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Nearest level; midpoints go to the larger level, so `L = 2` gives
    /// `sign` with `sign(0) = +1`.
    pub fn quantize(&self, s: f64) -> f64 {
        let top = (self.levels.len() - 1) as f64;
        let k = ((s + top) * 0.5 + 0.5).floor().clamp(0.0, top);
        self.levels[k as usize]
    }

    pub fn contains(&self, q: f64) -> bool {
        self.levels.contains(&q)
    }
}

/// One run of the recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulatorTrace {
    pub y: Vec<f64>,
    pub q: Vec<f64>,
    pub v: Vec<f64>,
    /// `v_init[k]` is `v_{-1-k}`; indices past the end are zero.
    pub v_init: Vec<f64>,
    /// Canonical state `u = g*v`, when computed.
    pub u: Option<Vec<f64>>,
}

impl ModulatorTrace {
    /// `v_n` for any `n`, negative indices taken from the initial state.
    pub fn state(&self, n: isize) -> f64 {
        if n >= 0 {
            self.v[n as usize]
        } else {
            self.v_init.get((-n - 1) as usize).copied().unwrap_or(0.0)
        }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn max_abs_state(&self) -> f64 {
        self.v.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Columns `n, y, q, v` and `u` when present.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["n", "y", "q", "v"];
        if self.u.is_some() {
            header.push("u");
        }
        w.write_record(&header)?;
        for n in 0..self.len() {
            let mut row = vec![n.to_string(), fmt17(self.y[n]), fmt17(self.q[n]), fmt17(self.v[n])];
            if let Some(u) = &self.u {
                row.push(fmt17(u[n]));
            }
            w.write_record(&row)?;
        }
        w.flush()
    }
}

/// `(h*v)_n + y_n`, summing taps in stored order.
fn pre_quantized(h: &SparseFilter, trace: &ModulatorTrace, n: usize) -> f64 {
    let mut s = 0.0;
    for &(p, c) in h.taps() {
        s += c * trace.state(n as isize - p as isize);
    }
    s + trace.y[n]
}

/// Runs the greedy scheme from the zero initial state.
pub fn run_greedy(h: &SparseFilter, y: &[f64], alphabet: &Alphabet) -> Result<ModulatorTrace> {
    run_greedy_from(h, y, alphabet, Vec::new())
}

/// Runs the greedy scheme from `v_init` (`v_init[k] = v_{-1-k}`).
pub fn run_greedy_from(
    h: &SparseFilter,
    y: &[f64],
    alphabet: &Alphabet,
    v_init: Vec<f64>,
) -> Result<ModulatorTrace> {
    if let Some(&(p, _)) = h.taps().first() {
        if p == 0 {
            return Err(Error::NonCausal(p));
        }
    }
    let mut trace = ModulatorTrace {
        y: y.to_vec(),
        q: Vec::with_capacity(y.len()),
        v: Vec::with_capacity(y.len()),
        v_init,
        u: None,
    };
    for n in 0..y.len() {
        let s = pre_quantized(h, &trace, n);
        let q = alphabet.quantize(s);
        trace.q.push(q);
        trace.v.push(s - q);
    }
    Ok(trace)
}

/// Largest `|v_n - ((h*v)_n + y_n - q_n)|` over the trace, recomputed in
/// the same summation order; zero for an untouched trace.
pub fn recursion_defect(h: &SparseFilter, trace: &ModulatorTrace) -> f64 {
    (0..trace.len())
        .map(|n| (trace.v[n] - (pre_quantized(h, trace, n) - trace.q[n])).abs())
        .fold(0.0, f64::max)
}

/// `u = g*v` on `0..N`, including initial-state contributions.
pub fn canonical_state(g: &[f64], trace: &ModulatorTrace) -> Result<Vec<f64>> {
    if g.is_empty() {
        return Err(Error::ShapeMismatch { expected: 1, found: 0 });
    }
    Ok((0..trace.len())
        .map(|n| g.iter().enumerate().map(|(k, &gk)| gk * trace.state(n as isize - k as isize)).sum())
        .collect())
}

/// Largest `|Δ^m u_n - (y_n - q_n)|` over `n ≥ m`, relative to
/// `max(1, ‖u‖∞)`.
pub fn canonical_defect(m: usize, u: &[f64], trace: &ModulatorTrace) -> f64 {
    let scale = u.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let mut d = u.to_vec();
    for _ in 0..m {
        for k in (1..d.len()).rev() {
            d[k] -= d[k - 1];
        }
    }
    (m..u.len())
        .map(|n| (d[n] - (trace.y[n] - trace.q[n])).abs())
        .fold(0.0, f64::max)
        / scale
}

/// `L - (‖h‖₁ + μ)`; nonnegative means inputs bounded by `μ` keep `|v| ≤ 1`.
pub fn stability_margin(design: &FilterDesign, mu: f64, levels: usize) -> f64 {
    levels as f64 - (design.h_one_norm + mu)
}

/// Slack allowed on `|v_n| ≤ 1` for rounding in `s_n`.
pub const STABILITY_TOLERANCE: f64 = 1e-9;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{g_from_h, h_from_design};
    use crate::relaxed::gamma_from_sigma;
    use crate::rng::SplitRng;
    use proptest::prelude::*;

    fn unit_delay() -> SparseFilter {
        SparseFilter::new(vec![(1, 1.0)]).unwrap()
    }

    #[test]
    fn alphabets() {
        assert_eq!(Alphabet::new(2).unwrap().levels(), &[-1.0, 1.0]);
        assert_eq!(Alphabet::new(5).unwrap().levels(), &[-4.0, -2.0, 0.0, 2.0, 4.0]);
        assert!(Alphabet::new(1).is_err());
        let a = Alphabet::new(5).unwrap();
        assert_eq!(a.quantize(1.0), 2.0);
        assert_eq!(a.quantize(-1.0), 0.0);
        assert_eq!(a.quantize(100.0), 4.0);
        assert_eq!(Alphabet::one_bit().quantize(0.0), 1.0);
        assert_eq!(Alphabet::one_bit().quantize(-0.0), 1.0);
    }

    #[test]
    fn hand_simulation_half() {
        let t = run_greedy(&unit_delay(), &[0.5; 8], &Alphabet::one_bit()).unwrap();
        assert_eq!(t.q, vec![1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0, 1.0]);
        assert_eq!(t.v, vec![-0.5, -1.0, 0.5, 0.0, -0.5, -1.0, 0.5, 0.0]);
    }

    #[test]
    fn hand_simulation_zero() {
        let t = run_greedy(&unit_delay(), &[0.0; 6], &Alphabet::one_bit()).unwrap();
        assert_eq!(t.q, vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0]);
        assert_eq!(t.v, vec![-1.0, 0.0, -1.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn empty_input() {
        let t = run_greedy(&unit_delay(), &[], &Alphabet::one_bit()).unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn initial_state_is_used() {
        let t = run_greedy_from(&unit_delay(), &[0.0], &Alphabet::one_bit(), vec![-0.5]).unwrap();
        assert_eq!((t.q[0], t.v[0]), (-1.0, 0.5));
    }

    #[test]
    fn first_order_state_is_canonical() {
        let t = run_greedy(&unit_delay(), &[0.3; 50], &Alphabet::one_bit()).unwrap();
        assert_eq!(canonical_state(&[1.0], &t).unwrap(), t.v);
        assert!(canonical_state(&[], &t).is_err());
    }

    #[test]
    fn second_order_canonical_state() {
        let design = FilterDesign::new(2, 1.5).unwrap();
        let h = h_from_design(&design);
        let g = g_from_h(2, &h).unwrap();
        let t = run_greedy(&h, &[0.3; 10_000], &Alphabet::one_bit()).unwrap();
        let u = canonical_state(&g, &t).unwrap();
        assert!(u.iter().all(|v| v.abs() <= 2.5 * (1.0 + 1e-12)));
        assert!(canonical_defect(2, &u, &t) < 1e-8);
        assert_eq!(recursion_defect(&h, &t), 0.0);
    }

    #[test]
    fn margins() {
        // With μ = L - γ (the largest admissible input) the margin is
        // γ - ‖h‖₁: nonnegative, and shrinking toward 0 as m grows.
        for &(sigma, levels, mu) in &[(6.0, 2usize, 0.058), (1.0, 12, 0.408)] {
            let gamma = gamma_from_sigma(sigma);
            assert!((levels as f64 - gamma - mu).abs() < 1e-3);
            let margins: Vec<f64> = [10, 40, 160, 640]
                .iter()
                .map(|&m| {
                    let d = FilterDesign::new(m, gamma).unwrap();
                    assert!(stability_margin(&d, 0.0, levels) >= 0.0);
                    stability_margin(&d, levels as f64 - gamma, levels)
                })
                .collect();
            assert!(margins.iter().all(|&v| v >= 0.0), "{margins:?}");
            assert!(margins.windows(2).all(|w| w[1] < w[0]), "{margins:?}");
        }
        let d = FilterDesign::new(640, gamma_from_sigma(6.0)).unwrap();
        assert!(stability_margin(&d, 0.058, 2).abs() < 1e-2);
    }

    #[test]
    fn random_designs_stay_stable() {
        let mut rng = SplitRng::new(11);
        for _ in 0..10 {
            let levels = rng.int_in(2, 6) as usize;
            let m = rng.int_in(1, 12) as usize;
            let gamma = rng.uniform_in(1.05, levels as f64 - 0.05);
            let design = FilterDesign::new(m, gamma).unwrap();
            let mu = stability_margin(&design, 0.0, levels);
            let y: Vec<f64> = (0..20_000).map(|_| rng.uniform_in(-mu, mu)).collect();
            let t = run_greedy(&h_from_design(&design), &y, &Alphabet::new(levels).unwrap()).unwrap();
            assert!(t.max_abs_state() <= 1.0 + STABILITY_TOLERANCE, "m={m} L={levels}");
        }
    }

    #[test]
    fn mean_tracking() {
        for m in 1..=2 {
            let design = FilterDesign::new(m, 1.5).unwrap();
            let g1 = design.log_g1.exp();
            for &c in &[0.37, -0.21, 0.5] {
                let t = run_greedy(&h_from_design(&design), &vec![c; 4000], &Alphabet::one_bit()).unwrap();
                for &n in &[100usize, 1000, 4000] {
                    let mean: f64 = t.q[..n].iter().sum::<f64>() / n as f64;
                    assert!((mean - c).abs() <= 2.0 * g1 / n as f64 + 1e-12, "m={m} c={c} n={n}");
                }
            }
        }
    }

    #[test]
    fn csv_export() {
        let t = run_greedy(&unit_delay(), &[0.5; 2], &Alphabet::one_bit()).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("n,y,q,v"));
        assert_eq!(text.lines().count(), 3);
    }

    proptest! {
        #[test]
        fn one_bit_is_sign(y in proptest::collection::vec(-0.5f64..0.5, 1..200)) {
            let design = FilterDesign::new(2, 1.5).unwrap();
            let h = h_from_design(&design);
            let t = run_greedy(&h, &y, &Alphabet::one_bit()).unwrap();
            let d = design.d_values();
            for n in 0..y.len() {
                let s = 0.0 + d[0] * t.state(n as isize - 1) + d[1] * t.state(n as isize - 5) + y[n];
                prop_assert_eq!(t.q[n], if s >= 0.0 { 1.0 } else { -1.0 });
            }
            prop_assert_eq!(recursion_defect(&h, &t), 0.0);
            prop_assert!(t.max_abs_state() <= 1.0 + STABILITY_TOLERANCE);
        }

        #[test]
        fn quantizer_is_nearest(s in -10.0f64..10.0, l in 2usize..9) {
            let a = Alphabet::new(l).unwrap();
            let q = a.quantize(s);
            prop_assert!(a.contains(q));
            let best = a.levels().iter().map(|v| (v - s).abs()).fold(f64::INFINITY, f64::min);
            prop_assert!((q - s).abs() <= best + 1e-12);
        }
    }
}
