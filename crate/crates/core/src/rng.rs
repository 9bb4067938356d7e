//! Deterministic random streams.
//!
//! Every replicate of every resampling procedure draws from its own ChaCha8
//! stream. The key is derived from the master seed and a procedure tag with
//! SplitMix64, and the replicate index selects the ChaCha stream id. Results
//! therefore depend only on `(master, tag, index)`, never on which thread ran
//! the replicate or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Procedure tags keeping streams of different procedures apart.
pub mod tags {
    pub const DERIVATIVE: u64 = 0x01;
    pub const UB0: u64 = 0x02;
    pub const MN_NULL: u64 = 0x03;
    pub const MN_ALT: u64 = 0x04;
    pub const PERMUTATION: u64 = 0x05;
    pub const SIMULATION: u64 = 0x06;
    pub const LIMIT: u64 = 0x07;
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream for replicate `index` of the procedure `tag` under `master`.
pub fn replicate_stream(master: u64, tag: u64, index: u64) -> Stream {
    let key = splitmix64(master ^ splitmix64(tag.wrapping_mul(0xD6E8_FEB8_6659_FD93)));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

/// Derives a child master seed, e.g. one per simulation trial.
pub fn child_seed(master: u64, tag: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ tag.rotate_left(17)) ^ index)
}
