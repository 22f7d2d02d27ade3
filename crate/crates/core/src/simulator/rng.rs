//! Seeding scheme.
//!
//! Every random role of a trial has its own ChaCha8 stream: the key comes
//! from the trial seed and the 64-bit stream id from [`Stream`], so roles
//! never share state and can be drawn in any order. Trial seeds are the
//! 64-bit words of a separate ChaCha8 stream keyed by `seed0`, read at word
//! position 2i for trial i, so any trial can be regenerated on its own.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Beta = 1,
    Projection = 2,
    Train1X = 3,
    Train1Noise = 4,
    Train2X = 5,
    Train2Noise = 6,
    TestX = 7,
    TestNoise = 8,
    TrialSeeds = 9,
    /// Spectrum-only draws.
    Spectrum = 10,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Seed of trial `index` in a run keyed by `seed0`.
pub fn trial_seed(seed0: u64, index: u64) -> u64 {
    let mut rng = stream_rng(seed0, Stream::TrialSeeds);
    rng.set_word_pos(2 * index as u128);
    rng.next_u64()
}
