//! Deterministic randomness: every consumer derives its own ChaCha stream
//! from the single run seed plus a label and an index, so adding a worker
//! or reordering work never changes what any component draws.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

pub fn stream(seed: u64, label: &str, index: u64) -> ChaCha12Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update([0u8]);
    hasher.update(label.as_bytes());
    hasher.update([0u8]);
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    ChaCha12Rng::from_seed(digest.into())
}
