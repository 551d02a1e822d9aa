//! Counter-based random streams.
//!
//! Every random draw in the crate comes from a generator keyed by
//! `(seed, stream, index)`: the ChaCha key is derived from `seed` and
//! `stream`, and `index` selects the 64-bit ChaCha stream. A sample therefore
//! depends only on its key, never on how many samples were drawn before it or
//! on which thread drew it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream identifiers; one per independent consumer of randomness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Gaussian = 1,
    Ball = 2,
    Haar = 3,
    Test = 99,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for a cell of an experiment grid, e.g. `derive_seed(seed, &[k, eps_index])`.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut state = seed;
    let mut out = splitmix64(&mut state);
    for &p in parts {
        state ^= p.wrapping_mul(0xA24B_AED4_963E_E407);
        out = splitmix64(&mut state);
    }
    out
}

/// Generator for sample `index` of `stream` under `seed`.
pub fn keyed_rng(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut state = seed ^ (stream as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}
