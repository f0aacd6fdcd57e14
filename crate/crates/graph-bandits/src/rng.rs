//! Seeding and stream derivation.
//!
//! Everything random in this crate flows from 64-bit seeds through the two
//! functions below, so a run is fully described by its master seed. The
//! scheme is deliberately simple enough to re-implement in another language:
//!
//! * [`derive_seed`]`(master, index)` — mixes a master seed with a stream
//!   index via one SplitMix64 step. Repetition `i` of an experiment uses
//!   `derive_seed(master, i)`; within a repetition the environment uses
//!   substream 0 and the policy substream 1.
//! * [`rng_from_seed`]`(seed)` — expands a 64-bit seed into a 32-byte
//!   ChaCha8 key by iterating SplitMix64 four times and concatenating the
//!   little-endian outputs.
//!
//! The generator is ChaCha8, a counter-based stream cipher RNG with a
//! stable, portable output sequence. Uniform `f64` draws use the standard
//! 53-bit construction (`next_u64 >> 11` scaled by `2^-53`), which is what
//! `rng.gen::<f64>()` produces.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used for every stochastic component in the crate.
pub type SimRng = ChaCha8Rng;

/// One step of the SplitMix64 sequence: advances `state` and returns the
/// next output. Constants are the published ones.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed for stream `index` from a master seed.
///
/// Distinct indices yield decorrelated seeds; the map is deterministic and
/// documented so runs can be reproduced outside this crate.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut state = master ^ (index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    splitmix64(&mut state)
}

/// Builds the crate RNG from a 64-bit seed.
///
/// The 32-byte ChaCha key is the concatenation of four successive
/// SplitMix64 outputs (little-endian), starting from `seed`.
pub fn rng_from_seed(seed: u64) -> SimRng {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
