//! Per-stage seed derivation.
//!
//! Every random stream in the workbench is seeded from one master seed and a
//! stage name: the first eight bytes (little endian) of
//! `SHA-256(master.to_le_bytes() || stage)`. Any stage can therefore be re-run
//! in isolation and still see the same stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn derive_seed(master: u64, stage: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(stage.as_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn stage_rng(master: u64, stage: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stage))
}
