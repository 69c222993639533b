//! Seed-splitting RNG discipline.
//!
//! Every replication, trial or restart derives its own generator from
//! `(master seed, unit index)` instead of consuming a shared stream. Parallel
//! and sequential executions therefore produce bit-identical results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finaliser; statistically decorrelates consecutive indices.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent child seed for the `stream`-th unit of work.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream.wrapping_add(0x51ed_270b)))
}

/// The generator used across the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for one unit of work under a master seed.
pub fn stream_rng(master: u64, stream: u64) -> ChaCha8Rng {
    rng_from_seed(derive_seed(master, stream))
}

/// Uniform tag in [0,1) derived from a 64-bit value, used by selection
/// predicates that consume per-row auxiliary tags.
pub fn tag_fraction(tag: u64) -> f64 {
    (tag >> 11) as f64 / (1u64 << 53) as f64
}
