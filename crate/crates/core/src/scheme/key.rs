// SPDX-License-Identifier: Apache-2.0

//! The decoding key `dk = (pk₀, pk₁, α₀, α₁, ck₀, ck₁, Ĉ)`.
//!
//! File format: the seven components in that order, each as a `u32`
//! big-endian length followed by the component's own encoding.

use crate::error::Result;
use crate::homomorphic::{HePublicKey, IndexCiphertext};
use crate::obfuscation::ObfuscatedProgram;
use crate::ser::{Reader, Writer};
use crate::vc::CommitKey;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodingKey {
    pub pk: [HePublicKey; 2],
    pub alpha: [IndexCiphertext; 2],
    pub ck: [CommitKey; 2],
    pub program: ObfuscatedProgram,
}

impl DecodingKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.bytes(&self.pk[0].to_bytes())
            .bytes(&self.pk[1].to_bytes())
            .bytes(&self.alpha[0].to_bytes())
            .bytes(&self.alpha[1].to_bytes())
            .bytes(&self.ck[0].to_bytes())
            .bytes(&self.ck[1].to_bytes())
            .bytes(&self.program.to_bytes());
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let pk = [
            HePublicKey::from_bytes(r.bytes()?)?,
            HePublicKey::from_bytes(r.bytes()?)?,
        ];
        let alpha = [
            IndexCiphertext::from_bytes(&pk[0], r.bytes()?)?,
            IndexCiphertext::from_bytes(&pk[1], r.bytes()?)?,
        ];
        let ck = [
            CommitKey::from_bytes(r.bytes()?)?,
            CommitKey::from_bytes(r.bytes()?)?,
        ];
        let program = ObfuscatedProgram::from_bytes(r.bytes()?)?;
        r.finish()?;
        Ok(DecodingKey {
            pk,
            alpha,
            ck,
            program,
        })
    }

    /// Size of the serialized key in bits, the anonymous-channel cost `s`.
    pub fn bit_len(&self) -> usize {
        self.to_bytes().len() * 8
    }
}
