//! The fixed pseudo-random generator used everywhere randomness is needed.
//!
//! Reproducibility across platforms and releases is part of the external
//! interface (generator specs and experiment seeds are exchanged as text),
//! so the generator is pinned here rather than taken from a third-party
//! crate whose stream might change between major versions.
//!
//! The generator is SplitMix64 (Steele, Lea, Vigna): state advances by the
//! golden-gamma constant and the output is finalized with two xor-shift
//! multiplies. Every implementation of these formulas produces the same
//! stream for the same seed.

/// SplitMix64 generator with a 64-bit state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-enough index in `0..bound` via modulo reduction.
    ///
    /// The modulo bias is below 2^-50 for every bound this library uses
    /// (bounds are sequence lengths, far below 2^32); the reduction rule is
    /// part of the pinned generator contract, so it must not be "improved".
    pub fn next_below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "next_below requires a positive bound");
        (self.next_u64() % bound as u64) as usize
    }

    /// Fisher-Yates shuffle, iterating i from len-1 down to 1 and swapping
    /// with j = next_u64() mod (i+1). This exact loop is normative: two
    /// implementations that agree on SplitMix64 and on this loop produce
    /// identical permutations.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i + 1);
            items.swap(i, j);
        }
    }
}

/// One mixing step for deriving per-cell seeds from a base seed.
///
/// Feeds `value` into the state through a multiply by the golden gamma, then
/// runs one SplitMix64 output step. Used by the experiment runner so that
/// (algorithm, size, repetition) cells get decorrelated but reproducible
/// seeds.
pub fn mix_seed(state: u64, value: u64) -> u64 {
    let mut g = SplitMix64::new(state ^ value.wrapping_mul(GOLDEN_GAMMA));
    g.next_u64()
}
