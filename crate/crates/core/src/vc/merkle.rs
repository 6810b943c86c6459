// SPDX-License-Identifier: Apache-2.0

//! Salted SHA-256 Merkle tree.

use rand::Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::prf::keyed_hash;

pub const DIGEST_LEN: usize = 32;
const SALT_LEN: usize = 16;
const LEAF_TAG: u8 = 0x00;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Key {
    salt: [u8; SALT_LEN],
}

pub(super) fn capacity(length: usize) -> usize {
    length.next_power_of_two()
}

impl Key {
    pub(super) fn generate<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut salt = [0u8; SALT_LEN];
        rng.fill(&mut salt);
        Key { salt }
    }

    pub(super) fn as_bytes(&self) -> &[u8] {
        &self.salt
    }

    pub(super) fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let salt = bytes.try_into().map_err(|_| Error::LengthMismatch {
            expected: SALT_LEN,
            got: bytes.len(),
        })?;
        Ok(Key { salt })
    }

    pub(super) fn leaf(&self, block: &BitString) -> Vec<u8> {
        keyed_hash(&self.salt, LEAF_TAG, &[&block.to_bytes()]).to_vec()
    }

    /// Parent digest at `level ≥ 1`; the level doubles as the domain tag.
    pub(super) fn combine(&self, level: usize, left: &[u8], right: &[u8]) -> Vec<u8> {
        keyed_hash(&self.salt, level as u8, &[left, right]).to_vec()
    }
}
