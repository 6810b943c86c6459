// SPDX-License-Identifier: Apache-2.0

//! Seed derivation for independent, reproducible RNG streams.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::prf::keyed_hash;

/// A ChaCha20 stream determined by `(seed, label, index)`. Different labels
/// or indices give unrelated streams, so games, detector runs and sweep cells
/// can be re-run individually.
pub fn stream_rng(seed: u64, label: &str, index: u64) -> ChaCha20Rng {
    let digest = keyed_hash(
        &seed.to_be_bytes(),
        0x52,
        &[label.as_bytes(), &[0], &index.to_be_bytes()],
    );
    ChaCha20Rng::from_seed(digest)
}
