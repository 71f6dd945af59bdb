//! Seeded, splittable random streams.
//!
//! Every stochastic operation takes an explicit `u64` seed. Independent
//! sub-computations (generation `g`, learner `l`, trial `t`, ...) draw from
//! their own ChaCha8 stream, keyed by the seed and the index path, so results
//! do not depend on the order in which the sub-computations are executed.
//! The stream seeds a xoshiro256++ generator, which does the bulk sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// Leaf generator handed to each independent sub-computation.
pub type StreamRng = Xoshiro256PlusPlus;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for the stream addressed by `path` under `seed`.
pub fn stream(seed: u64, path: &[u64]) -> StreamRng {
    let mut key = 0u64;
    for &p in path {
        key = splitmix64(key ^ p.wrapping_add(0x632b_e59b_d9b4_e019));
    }
    let mut root = ChaCha8Rng::seed_from_u64(seed);
    root.set_stream(key);
    Xoshiro256PlusPlus::from_rng(&mut root)
}
