//! Invariant suites run as a release gate; each group reports pass/fail and
//! the worst defect it saw.

use nalgebra::DVector;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::chebyshev::{cheb_t, cheb_u, critical_point_product_closed_form, critical_point_products, extended_node};
use crate::error::Result;
use crate::export::json_number;
use crate::filters::{asymptotic_position, g_from_h, h_from_design, minimal_subordinate_sequence, FilterDesign};
use crate::modulator::{run_greedy, stability_margin, Alphabet, STABILITY_TOLERANCE};
use crate::rate::multilevel_table;
use crate::reconstruction::design_kernel;
use crate::relaxed::{
    build_b_matrix, constraint_f, gamma_from_sigma, jordan_residual, log_eta, p_vector, relaxed_minimizer,
};
use crate::rng::SplitRng;

#[derive(Debug, Clone, PartialEq)]
pub struct GroupReport {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    /// Largest defect relative to its tolerance; `≤ 1` on a pass.
    pub worst: f64,
    pub detail: String,
}

impl GroupReport {
    pub fn to_json(&self) -> Value {
        json!({
            "group": self.name,
            "passed": self.passed,
            "checks": self.checks,
            "worst": json_number(self.worst),
            "detail": self.detail,
        })
    }
}

/// Sizes for the heavier groups.
#[derive(Debug, Clone, Copy)]
pub struct ValidateConfig {
    pub seed: u64,
    pub stability_pairs: usize,
    pub stability_steps: usize,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self { seed: 0, stability_pairs: 50, stability_steps: 100_000 }
    }
}

/// Accumulates `defect / tol` ratios for one group.
struct Tally {
    checks: usize,
    worst: f64,
    detail: String,
}

impl Tally {
    fn new() -> Self {
        Self { checks: 0, worst: 0.0, detail: String::new() }
    }

    fn check(&mut self, defect: f64, tol: f64, what: impl FnOnce() -> String) {
        self.checks += 1;
        let r = if defect.is_nan() { f64::INFINITY } else { defect / tol };
        if r > self.worst {
            self.worst = r;
            if r > 1.0 {
                self.detail = what();
            }
        }
    }

    fn finish(self, name: &'static str) -> GroupReport {
        GroupReport { name, passed: self.worst <= 1.0, checks: self.checks, worst: self.worst, detail: self.detail }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn chebyshev_group() -> Result<GroupReport> {
    let mut t = Tally::new();
    for m in 2..=25 {
        for j in 0..=m {
            let z = extended_node(m, j);
            let want = if (m - j) % 2 == 0 { 1.0 } else { -1.0 };
            t.check((cheb_t(m, z) - want).abs(), 1e-12, || format!("T_{m} at node {j}"));
        }
        for k in 0..10 {
            let x = -0.95 + 0.19 * k as f64;
            let h = 1e-5;
            let fd = (cheb_t(m, x + h) - cheb_t(m, x - h)) / (2.0 * h);
            let d = m as f64 * cheb_u(m - 1, x);
            t.check((fd - d).abs() / (m * m) as f64, 1e-6, || format!("T_{m}' at {x}"));
        }
        let prods = critical_point_products(m)?;
        for (k, p) in prods.iter().enumerate() {
            let c = critical_point_product_closed_form(m, k);
            let defect = if p.sign() == c.sign() { (p.ln_abs - c.ln_abs).abs() } else { f64::INFINITY };
            t.check(defect, 1e-10, || format!("node product m={m} k={k}"));
        }
    }
    Ok(t.finish("chebyshev"))
}

pub fn relaxed_group() -> Result<GroupReport> {
    let mut t = Tally::new();
    for gamma in [1.2, 1.5, gamma_from_sigma(6.0)] {
        for m in 2..=60 {
            let sol = relaxed_minimizer(m, gamma)?;
            t.check(rel(constraint_f(&sol.point()), gamma), 1e-8, || format!("f(x_min) m={m} γ={gamma}"));
            t.check(rel(log_eta(&sol.x)?, sol.log_eta_min), 1e-10, || format!("η_min m={m} γ={gamma}"));
        }
    }
    let s = relaxed_minimizer(2, 1.5)?;
    t.check((s.beta - 2f64.ln() / 2.0).abs(), 1e-12, || "β for (2, 1.5)".into());
    t.check(rel(s.k, 4.0), 1e-10, || "K for (2, 1.5)".into());
    t.check(rel(s.log_eta_min.exp(), 5.0), 1e-10, || "η for (2, 1.5)".into());
    Ok(t.finish("relaxed"))
}

pub fn jordan_group(seed: u64) -> Result<GroupReport> {
    let mut t = Tally::new();
    let mut rng = SplitRng::child(seed, 10);
    for m in 2..=12 {
        for _ in 0..20 {
            let mut y: Vec<f64> = Vec::with_capacity(m - 1);
            while y.len() < m - 1 {
                let c = rng.uniform_in(1.5, 50.0);
                if y.iter().all(|v| (v - c).abs() >= 0.1) {
                    y.push(c);
                }
            }
            let b = build_b_matrix(&y)?;
            let scale = b.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
            let e = DVector::from_element(m, 1.0);
            t.check((&b * &e).amax() / scale, 1e-9, || format!("B e, m={m}"));
            let p = DVector::from_vec(p_vector(&y));
            let target = if m % 2 == 0 { 1.0 } else { -1.0 } / m as f64;
            let bp = &b * &p;
            let tol = 1e-9 * (scale * p.amax()).max(1.0);
            t.check(bp.iter().map(|v| (v - target).abs()).fold(0.0, f64::max), tol, || format!("B p, m={m}"));
            let rep = jordan_residual(&y)?;
            t.check(rep.residual, 1e-8, || format!("Jordan residual m={m}"));
            t.check(if rep.has_corank_one() { 0.0 } else { 2.0 }, 1.0, || format!("corank m={m}"));
        }
    }
    Ok(t.finish("jordan"))
}

pub fn filters_group() -> Result<GroupReport> {
    let mut t = Tally::new();
    for m in 1..=20 {
        for gamma in [1.2, 1.5, 2.0] {
            let d = FilterDesign::new(m, gamma)?;
            t.check((d.h_one_norm - gamma).max(0.0) / gamma, 1e-12, || format!("‖h‖₁ m={m} γ={gamma}"));
            let g = g_from_h(m, &h_from_design(&d))?;
            let g1: f64 = g.iter().map(|v| v.abs()).sum();
            t.check(rel(g1, d.log_g1.exp()), 1e-8, || format!("‖g‖₁ m={m} γ={gamma}"));
        }
    }
    let n = minimal_subordinate_sequence(2000, gamma_from_sigma(6.0))?;
    for j in 2..=10 {
        let want = asymptotic_position(6.0, j)?;
        t.check(if n[j - 1] == want { 0.0 } else { 2.0 }, 1.0, || format!("n_{j} at σ=6"));
    }
    let n = minimal_subordinate_sequence(1000, gamma_from_sigma(1.1))?;
    t.check(if n[2] == 8 && n[3] == 17 { 0.0 } else { 2.0 }, 1.0, || format!("σ=1.1: {:?}", &n[..4]));
    Ok(t.finish("filters"))
}

pub fn stability_group(cfg: &ValidateConfig) -> Result<GroupReport> {
    let results: Vec<Result<(f64, String)>> = (0..cfg.stability_pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = SplitRng::child(cfg.seed, 1000 + i as u64);
            let levels = rng.int_in(2, 6) as usize;
            let m = rng.int_in(1, 16) as usize;
            let gamma = rng.uniform_in(1.05, levels as f64 - 0.05);
            let design = FilterDesign::new(m, gamma)?;
            let mu = stability_margin(&design, 0.0, levels);
            let y: Vec<f64> = (0..cfg.stability_steps).map(|_| rng.uniform_in(-mu, mu)).collect();
            let trace = run_greedy(&h_from_design(&design), &y, &Alphabet::new(levels)?)?;
            Ok((trace.max_abs_state(), format!("pair {i}: m={m} L={levels} γ={gamma:.4}")))
        })
        .collect();
    let mut t = Tally::new();
    for r in results {
        let (v, what) = r?;
        t.check(v, 1.0 + STABILITY_TOLERANCE, || what);
    }
    Ok(t.finish("stability"))
}

pub fn rate_group() -> Result<GroupReport> {
    let mut t = Tally::new();
    let rows = multilevel_table(&[2, 3, 4, 5, 6, 8, 12, 16, 32])?;
    for r in &rows {
        let l = r.levels;
        t.check(if r.max_input > 0.0 { 0.0 } else { 2.0 }, 1.0, || format!("max input L={l}"));
        t.check(r.efficiency, 1.0 - 1e-12, || format!("efficiency L={l}"));
        let prev_ok = r.sigma == 1 || gamma_from_sigma(r.sigma as f64 - 1.0) >= l as f64;
        t.check(if prev_ok { 0.0 } else { 2.0 }, 1.0, || format!("σ not minimal for L={l}"));
    }
    Ok(t.finish("rate"))
}

pub fn kernel_group() -> Result<GroupReport> {
    let mut t = Tally::new();
    for eps in [1.0, 0.1, 0.01] {
        let k = design_kernel(0.5, eps)?;
        let (pass, stop) = k.admissibility_defect(4096);
        t.check(pass.max(stop), 1e-8, || format!("admissibility ε={eps}"));
        t.check((k.integral() - 1.0).abs(), 1e-8, || format!("∫φ ε={eps}"));
        t.check((k.phi(0.0) - 2.0 * 0.5 * (1.0 + eps / 2.0)).abs(), 1e-12, || format!("φ(0) ε={eps}"));
        for s in [3.0, 10.0, 40.0] {
            t.check(k.phi(s).abs() / k.envelope(s), 1.0, || format!("envelope at {s}, ε={eps}"));
        }
    }
    Ok(t.finish("kernel"))
}

/// Every group, in a fixed order.
pub fn run_all(cfg: &ValidateConfig) -> Result<Vec<GroupReport>> {
    Ok(vec![
        chebyshev_group()?,
        relaxed_group()?,
        jordan_group(cfg.seed)?,
        filters_group()?,
        stability_group(cfg)?,
        rate_group()?,
        kernel_group()?,
    ])
}
