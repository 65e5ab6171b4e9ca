use criterion::{criterion_group, criterion_main};

criterion_group!(benches, sigdelta_bench::design, sigdelta_bench::modulator, sigdelta_bench::reconstruction);
criterion_main!(benches);
