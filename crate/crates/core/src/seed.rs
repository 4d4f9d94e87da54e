//! Deterministic substream seeds.
//!
//! Every random stream in an experiment is keyed by a tuple of integers, e.g.
//! `(NETWORK, n, replicate)` or `(TRIALS, n, beta_bits, replicate, block)`.
//! The seed of a stream is the master seed folded with each tuple component
//! through SplitMix64:
//!
//! ```text
//! h = splitmix64(master)
//! for part in tuple: h = splitmix64(h ^ splitmix64(part))
//! ```
//!
//! so streams never depend on scheduling or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const NETWORK: u64 = 1;
pub const TRIALS: u64 = 2;
pub const COVER: u64 = 3;
pub const CHECK: u64 = 4;

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn substream(master: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(master), |h, &p| splitmix64(h ^ splitmix64(p)))
}

pub fn substream_rng(master: u64, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream(master, parts))
}
