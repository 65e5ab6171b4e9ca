//! Benchmark bodies shared by the criterion entry points in `benches/`.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};

use sigdelta_core::filters::{design_log_g1, g_from_h, h_from_design, minimal_subordinate_sequence, FilterDesign};
use sigdelta_core::modulator::{run_greedy, Alphabet};
use sigdelta_core::rate::DesignCache;
use sigdelta_core::reconstruction::{design_kernel, sup_error, SignalSpec};
use sigdelta_core::relaxed::{gamma_from_sigma, relaxed_minimizer};

pub fn design(c: &mut Criterion) {
    let gamma = gamma_from_sigma(6.0);
    let mut g = c.benchmark_group("design");
    for m in [20usize, 200, 2000] {
        g.bench_with_input(BenchmarkId::new("relaxed", m), &m, |b, &m| b.iter(|| relaxed_minimizer(black_box(m), gamma)));
        g.bench_with_input(BenchmarkId::new("support", m), &m, |b, &m| {
            b.iter(|| minimal_subordinate_sequence(black_box(m), gamma))
        });
        g.bench_with_input(BenchmarkId::new("log_g1", m), &m, |b, &m| b.iter(|| design_log_g1(black_box(m), gamma)));
    }
    let d = FilterDesign::new(20, 1.5).unwrap();
    let h = h_from_design(&d);
    g.bench_function("exact_g_m20", |b| b.iter(|| g_from_h(20, black_box(&h))));
    g.sample_size(10);
    g.bench_function("cache_1000", |b| b.iter(|| DesignCache::build(gamma, black_box(1000))));
    g.finish();
}

pub fn modulator(c: &mut Criterion) {
    let spec = SignalSpec::two_tone(0.5, 0.3, (0.2, 1.1)).unwrap();
    let y = spec.samples(1.0 / 128.0, 100_000);
    let mut g = c.benchmark_group("greedy_1e5");
    for m in [1usize, 4, 16] {
        let h = h_from_design(&FilterDesign::new(m, 1.5).unwrap());
        g.bench_with_input(BenchmarkId::from_parameter(m), &h, |b, h| {
            b.iter(|| run_greedy(h, black_box(&y), &Alphabet::one_bit()))
        });
    }
    g.finish();
}

pub fn reconstruction(c: &mut Criterion) {
    let k = design_kernel(0.5, 1.0).unwrap();
    let tau = 1.0 / 64.0;
    let t_max = k.radius_for(tau, 1.0, 1e-8);
    let spec = SignalSpec::two_tone(0.5, 0.3, (0.2, 1.1)).unwrap();
    let n = ((2.0 * t_max + 40.0) / tau) as usize;
    let trace = run_greedy(
        &h_from_design(&FilterDesign::new(2, 1.5).unwrap()),
        &spec.samples(tau, n),
        &Alphabet::one_bit(),
    )
    .unwrap();
    let mut g = c.benchmark_group("reconstruction");
    g.sample_size(10);
    g.bench_function("kernel_l1", |b| b.iter(|| design_kernel(0.5, black_box(0.01)).unwrap().l1_norm()));
    g.bench_function("sup_error_lambda64", |b| {
        b.iter(|| sup_error(&spec, &trace, tau, &k, t_max, (t_max + 1.0, t_max + 33.0), 8))
    });
    g.finish();
}
