//! Seeded random streams with a fixed, platform-independent output sequence.
//!
//! The generator is ChaCha8 (whose keystream is fully specified), keyed by a
//! SplitMix64 expansion of `(seed, epoch, domain)`. Bounded integers are drawn
//! by rejection from the raw 64-bit output and never go through a library
//! range sampler, so the shuffles below are stable across crate upgrades too.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Separates the stream used for epoch orderings from the one used to
/// synthesize corpora, so equal seeds do not produce correlated draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Schedule = 0x5343_4845_4455_4c45,
    Synthetic = 0x5359_4e54_4845_5449,
    Probability = 0x5052_4f42_4142_494c,
}

#[derive(Debug, Clone)]
pub struct SeqRng {
    inner: ChaCha8Rng,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SeqRng {
    /// Stream for a given seed and epoch. Each epoch gets a distinct key.
    pub fn new(domain: Domain, seed: u64, epoch: u64) -> Self {
        let mut state = domain as u64;
        let mut key = [0u8; 32];
        // Absorb the inputs one at a time so (a, b) and (b, a) differ.
        let mut seed_state = seed;
        state ^= splitmix64(&mut seed_state);
        splitmix64(&mut state);
        state ^= epoch.wrapping_mul(0xd6e8_feb8_6659_fd93);
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Self {
            inner: ChaCha8Rng::from_seed(key),
        }
    }

    pub fn schedule(seed: u64, epoch: u64) -> Self {
        Self::new(Domain::Schedule, seed, epoch)
    }

    /// Uniform integer in `0..bound`. Rejection sampling; `bound` must be > 0.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        // Largest multiple of `bound` that fits in 2^64, minus one.
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let x = self.inner.next_u64();
            if x <= zone {
                return x % bound;
            }
        }
    }

    /// Uniform float in `[0, 1)` with 53 random bits.
    pub fn unit_f64(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fisher–Yates from the last index down.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

impl RngCore for SeqRng {
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
