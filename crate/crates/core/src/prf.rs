// SPDX-License-Identifier: Apache-2.0

//! Keyed one-bit PRF and the bitwise stream cipher built on it.
//!
//! `f(key, j)` is the low bit of `SHA-256(key ‖ j)`, with `j` written as a
//! λ-bit big-endian integer (the 64-bit value in the last eight bytes, zero
//! bytes in front). Positions are 1-based: bit `j` of a message (vector index
//! `j - 1`) is masked with `f(key, j)`.

use rand::Rng;
use sha2::{Digest, Sha256};

use crate::bits::BitString;
use crate::error::{Error, Result};

pub const DEFAULT_SECURITY: u32 = 128;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PrfKey {
    bytes: Vec<u8>,
}

impl std::fmt::Debug for PrfKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PrfKey({} bits)", self.security_bits())
    }
}

impl PrfKey {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.is_empty() {
            return Err(Error::Domain("PRF key must be non-empty".into()));
        }
        Ok(PrfKey {
            bytes: bytes.to_vec(),
        })
    }

    pub fn generate<R: Rng + ?Sized>(security: u32, rng: &mut R) -> Result<Self> {
        if security == 0 || !security.is_multiple_of(8) {
            return Err(Error::UnsupportedSecurity(security));
        }
        let mut bytes = vec![0u8; security as usize / 8];
        rng.fill(&mut bytes[..]);
        Ok(PrfKey { bytes })
    }

    pub fn security_bits(&self) -> u32 {
        self.bytes.len() as u32 * 8
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    fn index_block(&self, index: u64) -> Result<Vec<u8>> {
        let width = self.bytes.len();
        if width < 8 && index >> (8 * width) != 0 {
            return Err(Error::Domain(format!(
                "PRF index {index} not below 2^{}",
                self.security_bits()
            )));
        }
        let be = index.to_be_bytes();
        let mut block = vec![0u8; width.saturating_sub(8)];
        block.extend_from_slice(&be[8usize.saturating_sub(width)..]);
        Ok(block)
    }
}

/// SHA-256 over `key ‖ tag ‖ parts…`. Used for every derived value in the
/// crate so that one primitive backs the PRF, the Merkle digests and the
/// transparent HE masks.
pub fn keyed_hash(key: &[u8], tag: u8, parts: &[&[u8]]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(key);
    h.update([tag]);
    for p in parts {
        h.update(p);
    }
    h.finalize().into()
}

pub fn prf_bit(key: &PrfKey, index: u64) -> Result<bool> {
    let block = key.index_block(index)?;
    let digest: [u8; 32] = Sha256::new()
        .chain_update(&key.bytes)
        .chain_update(&block)
        .finalize()
        .into();
    Ok(digest[31] & 1 == 1)
}

/// `f(key, 1) … f(key, len)`.
pub fn keystream(key: &PrfKey, len: usize) -> BitString {
    (1..=len as u64)
        .map(|j| prf_bit(key, j).expect("stream position fits any key width"))
        .collect::<Vec<_>>()
        .into()
}

/// `out[j] = message[j] ⊕ f(key, j)`. Self-inverse.
pub fn stream_xor(key: &PrfKey, message: &BitString) -> BitString {
    message.xor(&keystream(key, message.len()))
}
