//! Seed derivation for reproducible, order-independent substreams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derives a child seed from a master seed and a path of labels.
///
/// The mapping is a hash, so distinct paths give statistically independent
/// streams and the result never depends on the order in which work is run.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(b"rae-seed");
    hasher.update(master.to_le_bytes());
    for label in path {
        hasher.update(label.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Stable numeric label for a string tag.
pub fn label(tag: &str) -> u64 {
    let digest = Sha256::digest(tag.as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
