use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::folding::{Box4, Point4};

/// Samples per shard. Each shard draws from its own ChaCha stream, selected
/// by `(seed, shard index)`, so results do not depend on the thread count.
pub const SHARD_SIZE: usize = 1 << 16;

pub fn shard_rng(seed: u64, shard: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);
    rng
}

pub fn uniform_in(rng: &mut ChaCha8Rng, region: &Box4) -> Point4 {
    let mut p = [0.0; 4];
    for k in 0..4 {
        p[k] = region.lo[k] + (region.hi[k] - region.lo[k]) * rng.gen::<f64>();
    }
    p
}

/// Run `work(rng, count)` on every shard of `n` samples in parallel and
/// return the per-shard results in shard order.
pub fn sharded<T, F>(n: usize, seed: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let shards = n.div_ceil(SHARD_SIZE);
    (0..shards)
        .into_par_iter()
        .map(|s| {
            let count = SHARD_SIZE.min(n - s * SHARD_SIZE);
            work(&mut shard_rng(seed, s), count)
        })
        .collect()
}

/// Seed for the `k`-th sub-experiment of a run seeded with `seed`.
pub fn derive_seed(seed: u64, k: u64) -> u64 {
    seed ^ (k.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}
