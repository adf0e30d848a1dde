//! Deterministic per-replicate random streams.
//!
//! Every replicate of every cell reads its own ChaCha8 stream, addressed by
//! `(master seed, cell id, replicate)`, so results do not depend on thread
//! count or scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Words reserved for one replicate.
const WORDS_PER_REPLICATE: u128 = 1 << 36;

pub fn stream(master_seed: u64, cell: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(cell);
    rng.set_word_pos(replicate as u128 * WORDS_PER_REPLICATE);
    rng
}

/// Stable 64-bit FNV-1a hash of a cell label.
pub fn cell_id(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}
