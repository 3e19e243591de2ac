//! Seed derivation.
//!
//! Every dataset is generated from a single 64-bit seed. The response (and any
//! per-dataset scalars such as `p_y`) come from ChaCha8 stream 0 of that seed;
//! feature `j` (0-based) draws from stream `j + 1`. Features can therefore be
//! generated in any order or in parallel with identical output. Replicate `r`
//! of a benchmark uses seed `replicate_seed(master, r)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const RESPONSE_STREAM: u64 = 0;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Dataset seed for replicate `index` under `master`.
pub fn replicate_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Independent generator for `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn feature_rng(seed: u64, feature: usize) -> ChaCha8Rng {
    stream_rng(seed, feature as u64 + 1)
}
