//! The random source used for test inputs.
//!
//! ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`) seeded from a single
//! `u64` through `SeedableRng::seed_from_u64`. Doubles are
//! `(next_u64() >> 11) · 2⁻⁵³`, uniform on `[0, 1)`. Any port that
//! reproduces this stream reproduces every trace and CSV byte for byte.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct SplitRng(ChaCha8Rng);

impl SplitRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// A generator for sub-task `index`, independent of scheduling order.
    pub fn child(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index + 1);
        Self(rng)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `lo..=hi` (modulo bias is below 2⁻⁴⁰ for the
    /// small ranges used here).
    pub fn int_in(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.0.next_u64() % (hi - lo + 1)
    }
}
