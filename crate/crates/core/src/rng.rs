//! Deterministic seeding for parallel Monte Carlo.
//!
//! Every random quantity is drawn from a ChaCha8 stream whose 64-bit seed is
//! derived from `(master seed, index)`. Results therefore depend only on the
//! master seed and the index layout, never on how work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(GOLDEN).rotate_left(17))
}

/// Child seed along a path of indices, e.g. `(trial, purpose)`.
pub fn derive_path(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(master, |acc, &i| derive_seed(acc, i))
}

pub fn stream(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Fixed-size work chunks: `(chunk index, first item, item count)`.
pub(crate) fn chunks(total: usize, chunk: usize) -> Vec<(u64, usize, usize)> {
    (0..total.div_ceil(chunk))
        .map(|c| {
            let start = c * chunk;
            (c as u64, start, chunk.min(total - start))
        })
        .collect()
}
