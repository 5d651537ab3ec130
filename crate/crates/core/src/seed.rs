//! Stable seed derivation: every random stream in an experiment is keyed by
//! the experiment seed plus a path of labels, independent of execution order.

use sha2::{Digest, Sha256};

/// Hashes `(base, labels...)` into a new 64-bit seed.
pub fn derive_seed(base: u64, labels: &[&str]) -> u64 {
    let mut h = Sha256::new();
    h.update(base.to_le_bytes());
    for l in labels {
        h.update((l.len() as u64).to_le_bytes());
        h.update(l.as_bytes());
    }
    let digest = h.finalize();
    let mut first = [0u8; 8];
    first.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(first)
}
