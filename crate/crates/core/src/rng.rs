//! Seeded random streams.
//!
//! Every stochastic stage draws from its own ChaCha stream, keyed by the
//! root seed and a stage name, so that adding draws in one stage never
//! shifts the draws seen by another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// 64-bit FNV-1a over the stream name.
fn stream_id(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Independent generator for the stage `name` under `root`.
pub fn substream(root: u64, name: &str) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(stream_id(name));
    rng
}

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
