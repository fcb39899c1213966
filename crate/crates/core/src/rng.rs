//! Seeded, splittable random streams.
//!
//! Every random quantity in the crate is drawn from an [`RngState`] obtained
//! through [`derive_stream_rng`]. The generator is ChaCha8 keyed by the master
//! seed, with the 64-bit stream id selecting an independent keystream, so any
//! `(master_seed, stream_id)` pair can be reconstructed without replaying the
//! others. Trials get their own seed via [`trial_seed`] and then split that
//! seed into purpose-specific streams.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream ids used inside a single trial.
pub mod streams {
    /// Entries of the main matrix.
    pub const MATRIX: u64 = 0;
    /// Independent auxiliary vector (e.g. a fresh column `X`).
    pub const VECTOR: u64 = 1;
    /// Index choices (dropped coordinate and the like).
    pub const INDEX: u64 = 2;
    /// Second matrix in experiments that need two.
    pub const MATRIX_AUX: u64 = 3;
}

/// Reserved stream of the master seed from which per-trial seeds are drawn.
const TRIAL_SEED_STREAM_BASE: u64 = 1 << 62;

/// A value-type random stream. Cheap to clone and safe to move across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngState {
    inner: ChaCha8Rng,
}

/// Returns the stream `stream_id` of `master_seed`. Identical inputs always
/// produce identical streams.
pub fn derive_stream_rng(master_seed: u64, stream_id: u64) -> RngState {
    let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
    inner.set_stream(stream_id);
    RngState { inner }
}

/// Seed of trial `trial_id` under `master_seed`. Recorded alongside each trial
/// so that a single trial can be regenerated in isolation.
pub fn trial_seed(master_seed: u64, trial_id: u64) -> u64 {
    derive_stream_rng(master_seed, TRIAL_SEED_STREAM_BASE.wrapping_add(trial_id)).next_u64()
}

impl RngState {
    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli(`p`) draw; `p >= 1` is always true and `p <= 0` always false.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Uniform index in `0..n`. `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index range must be nonempty");
        // Lemire's nearly-divisionless method with rejection.
        let n64 = n as u64;
        let threshold = n64.wrapping_neg() % n64;
        loop {
            let x = self.inner.next_u64();
            let m = (x as u128) * (n64 as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as usize;
            }
        }
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
