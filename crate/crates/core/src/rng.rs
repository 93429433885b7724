//! Pinned, portable random number generation.
//!
//! Every seeded operation in the library (train/test splitting, fold
//! assignment, fixture generation) draws from this generator so that the
//! byte stream — and therefore every derived artifact — is identical
//! across platforms and across implementations in other languages.

/// SplitMix64 generator (Steele, Lea & Flood 2014).
///
/// State advances by the golden-ratio increment; output is the
/// finalizer of the new state. Seeded directly with the user seed.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, bound)` by modulo reduction.
    ///
    /// The bias is below 2^-40 for any bound this library uses
    /// (corpus sizes, list lengths); modulo is pinned because it is the
    /// simplest reduction to reproduce bit-exactly elsewhere.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.next_u64() % bound
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// In-place Fisher–Yates shuffle driven by [`SplitMix64`].
///
/// Iterates from the last index down to 1, swapping with a uniformly
/// drawn earlier (or equal) position.
pub fn shuffle<T>(items: &mut [T], rng: &mut SplitMix64) {
    for i in (1..items.len()).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        items.swap(i, j);
    }
}
