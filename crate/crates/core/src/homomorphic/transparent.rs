// SPDX-License-Identifier: Apache-2.0

//! Keyed-permutation index blinding. The same key serves as public and
//! secret key, so evaluation can decrypt internally. Insecure by design.

use rand::Rng;

use super::{BitCiphertext, TAG_TRANSPARENT};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::prf::keyed_hash;
use crate::ser::{Reader, Writer};

const NONCE_LEN: usize = 16;
pub(super) const BIT_CT_LEN: usize = 1 + NONCE_LEN + 1;

const DOMAIN_PERM: u8 = 0x10;
const DOMAIN_MASK: u8 = 0x11;
const DOMAIN_EVAL: u8 = 0x12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) struct Key(Vec<u8>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) struct IndexCt {
    pub(super) docs: usize,
    nonce: [u8; NONCE_LEN],
    blinded: u32,
}

impl Key {
    pub(super) fn generate<R: Rng + ?Sized>(security: u32, rng: &mut R) -> Self {
        let mut bytes = vec![0u8; security as usize / 8];
        rng.fill(&mut bytes[..]);
        Key(bytes)
    }

    pub(super) fn from_bytes(security: u32, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != security as usize / 8 {
            return Err(Error::LengthMismatch {
                expected: security as usize / 8,
                got: bytes.len(),
            });
        }
        Ok(Key(bytes.to_vec()))
    }

    pub(super) fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    fn offset(&self, nonce: &[u8; NONCE_LEN], docs: usize) -> usize {
        let h = keyed_hash(&self.0, DOMAIN_PERM, &[nonce, &(docs as u32).to_be_bytes()]);
        (u64::from_be_bytes(h[..8].try_into().unwrap()) % docs as u64) as usize
    }

    fn mask(&self, r: &[u8]) -> u8 {
        keyed_hash(&self.0, DOMAIN_MASK, &[r])[0] & 1
    }
}

impl IndexCt {
    pub(super) fn write(&self, w: &mut Writer) {
        w.u32(self.docs as u32).raw(&self.nonce).u32(self.blinded);
    }

    pub(super) fn read(r: &mut Reader<'_>) -> Result<Self> {
        let docs = r.u32()? as usize;
        let nonce: [u8; NONCE_LEN] = r.raw(NONCE_LEN)?.try_into().unwrap();
        let blinded = r.u32()?;
        if docs == 0 || blinded == 0 || blinded as usize > docs {
            return Err(Error::decode("transparent index ciphertext out of range"));
        }
        Ok(IndexCt {
            docs,
            nonce,
            blinded,
        })
    }
}

pub(super) fn enc_index<R: Rng + ?Sized>(
    key: &Key,
    index: usize,
    docs: usize,
    rng: &mut R,
) -> IndexCt {
    let mut nonce = [0u8; NONCE_LEN];
    rng.fill(&mut nonce);
    let off = key.offset(&nonce, docs);
    IndexCt {
        docs,
        nonce,
        blinded: (((index - 1) + off) % docs + 1) as u32,
    }
}

pub(super) fn dec_index(key: &Key, ct: &IndexCt) -> Result<usize> {
    if ct.blinded == 0 || ct.blinded as usize > ct.docs {
        return Err(Error::decode("transparent index ciphertext out of range"));
    }
    let off = key.offset(&ct.nonce, ct.docs);
    Ok((ct.blinded as usize - 1 + ct.docs - off) % ct.docs + 1)
}

fn bit_ct(key: &Key, bit: bool, r: [u8; NONCE_LEN]) -> BitCiphertext {
    let mut bytes = Vec::with_capacity(BIT_CT_LEN);
    bytes.push(TAG_TRANSPARENT);
    bytes.extend_from_slice(&r);
    bytes.push(bit as u8 ^ key.mask(&r));
    BitCiphertext(bytes)
}

pub(super) fn enc_bit<R: Rng + ?Sized>(key: &Key, bit: bool, rng: &mut R) -> BitCiphertext {
    let mut r = [0u8; NONCE_LEN];
    rng.fill(&mut r);
    bit_ct(key, bit, r)
}

pub(super) fn eval_mux(key: &Key, alpha: &IndexCt, column: &BitString) -> Result<BitCiphertext> {
    let i = dec_index(key, alpha)?;
    let mut w = Writer::new();
    alpha.write(&mut w);
    let h = keyed_hash(&key.0, DOMAIN_EVAL, &[&w.into_bytes(), &column.to_bytes()]);
    Ok(bit_ct(
        key,
        column.get(i - 1),
        h[..NONCE_LEN].try_into().unwrap(),
    ))
}

pub(super) fn dec_bit(key: &Key, beta: &BitCiphertext) -> Result<bool> {
    let b = &beta.0;
    if b.len() != BIT_CT_LEN || b[0] != TAG_TRANSPARENT {
        return Err(Error::decode("not a transparent bit ciphertext"));
    }
    match b[BIT_CT_LEN - 1] ^ key.mask(&b[1..1 + NONCE_LEN]) {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(Error::decode("masked bit byte out of range")),
    }
}
