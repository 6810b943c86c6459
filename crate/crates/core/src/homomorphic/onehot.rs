// SPDX-License-Identifier: Apache-2.0

//! One-hot index encoding under Paillier.

use num_bigint_dig::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

use super::damgard_jurik::{DjPublic, DjSecret};
use super::{BitCiphertext, TAG_ONEHOT};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::ser::{biguint_to_fixed, Reader, Writer};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) struct PublicKey {
    dj: DjPublic,
    n_len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) struct SecretKey {
    dj: DjSecret,
    n_len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) struct IndexCt {
    pub(super) cts: Vec<BigUint>,
    ct_len: usize,
}

fn n_len(security: u32) -> usize {
    super::modulus_bits(security) / 8
}

impl PublicKey {
    fn ct_len(&self) -> usize {
        2 * self.n_len
    }

    pub(super) fn bit_ct_len(&self) -> usize {
        1 + self.ct_len()
    }

    fn n_squared(&self) -> BigUint {
        self.dj.modulus(1)
    }

    pub(super) fn to_bytes(&self) -> Vec<u8> {
        biguint_to_fixed(self.dj.n(), self.n_len)
    }

    pub(super) fn from_bytes(security: u32, bytes: &[u8]) -> Result<Self> {
        let n_len = n_len(security);
        if bytes.len() != n_len {
            return Err(Error::LengthMismatch {
                expected: n_len,
                got: bytes.len(),
            });
        }
        Ok(PublicKey {
            dj: DjPublic::from_modulus(BigUint::from_bytes_be(bytes))?,
            n_len,
        })
    }

    fn read_ct(&self, bytes: &[u8]) -> Result<BigUint> {
        let c = BigUint::from_bytes_be(bytes);
        if c >= self.n_squared() {
            return Err(Error::decode("ciphertext not reduced modulo N^2"));
        }
        Ok(c)
    }

    fn bit_ct(&self, c: &BigUint) -> BitCiphertext {
        let mut bytes = Vec::with_capacity(self.bit_ct_len());
        bytes.push(TAG_ONEHOT);
        bytes.extend(biguint_to_fixed(c, self.ct_len()));
        BitCiphertext(bytes)
    }
}

impl SecretKey {
    pub(super) fn generate<R: Rng + ?Sized>(modulus_bits: usize, rng: &mut R) -> Result<Self> {
        Ok(SecretKey {
            dj: DjSecret::generate(modulus_bits, rng)?,
            n_len: modulus_bits / 8,
        })
    }

    pub(super) fn public(&self) -> PublicKey {
        PublicKey {
            dj: self.dj.public().clone(),
            n_len: self.n_len,
        }
    }

    pub(super) fn to_bytes(&self) -> Vec<u8> {
        let (p, q) = self.dj.primes();
        let mut out = biguint_to_fixed(p, self.n_len / 2);
        out.extend(biguint_to_fixed(q, self.n_len / 2));
        out
    }

    pub(super) fn from_bytes(security: u32, bytes: &[u8]) -> Result<Self> {
        let n_len = n_len(security);
        if bytes.len() != n_len {
            return Err(Error::LengthMismatch {
                expected: n_len,
                got: bytes.len(),
            });
        }
        let (p, q) = bytes.split_at(n_len / 2);
        Ok(SecretKey {
            dj: DjSecret::from_primes(BigUint::from_bytes_be(p), BigUint::from_bytes_be(q))?,
            n_len,
        })
    }

    fn dec(&self, c: &BigUint) -> Result<bool> {
        let m = self.dj.decrypt(c, 1)?;
        if m.is_zero() {
            Ok(false)
        } else if m.is_one() {
            Ok(true)
        } else {
            Err(Error::decode("plaintext is not a bit"))
        }
    }
}

impl IndexCt {
    pub(super) fn write(&self, w: &mut Writer) {
        w.u32(self.cts.len() as u32);
        for c in &self.cts {
            w.raw(&biguint_to_fixed(c, self.ct_len));
        }
    }

    pub(super) fn read(pk: &PublicKey, r: &mut Reader<'_>) -> Result<Self> {
        let docs = r.u32()? as usize;
        if docs == 0 {
            return Err(Error::decode("index ciphertext over zero documents"));
        }
        let cts = (0..docs)
            .map(|_| pk.read_ct(r.raw(pk.ct_len())?))
            .collect::<Result<Vec<_>>>()?;
        Ok(IndexCt {
            cts,
            ct_len: pk.ct_len(),
        })
    }
}

pub(super) fn enc_index<R: Rng + ?Sized>(
    pk: &PublicKey,
    index: usize,
    docs: usize,
    rng: &mut R,
) -> IndexCt {
    let cts = (1..=docs)
        .map(|k| pk.dj.encrypt(&BigUint::from((k == index) as u32), 1, rng))
        .collect();
    IndexCt {
        cts,
        ct_len: pk.ct_len(),
    }
}

pub(super) fn enc_bit<R: Rng + ?Sized>(pk: &PublicKey, bit: bool, rng: &mut R) -> BitCiphertext {
    pk.bit_ct(&pk.dj.encrypt(&BigUint::from(bit as u32), 1, rng))
}

/// `Π_{k : column[k] = 1} α_k`, an encryption of `Σ_k column[k]·e_i[k]`.
pub(super) fn eval_mux(pk: &PublicKey, alpha: &IndexCt, column: &BitString) -> BitCiphertext {
    let n2 = pk.n_squared();
    let acc = alpha
        .cts
        .iter()
        .zip(column.iter())
        .filter(|(_, bit)| *bit)
        .fold(BigUint::one(), |acc, (c, _)| (acc * c) % &n2);
    pk.bit_ct(&acc)
}

pub(super) fn dec_bit(sk: &SecretKey, beta: &BitCiphertext) -> Result<bool> {
    let pk = sk.public();
    let b = &beta.0;
    if b.len() != pk.bit_ct_len() || b[0] != TAG_ONEHOT {
        return Err(Error::decode("not a one-hot bit ciphertext"));
    }
    sk.dec(&pk.read_ct(&b[1..])?)
}

pub(super) fn dec_index(sk: &SecretKey, alpha: &IndexCt) -> Result<usize> {
    let bits = alpha
        .cts
        .iter()
        .map(|c| sk.dec(c))
        .collect::<Result<Vec<_>>>()?;
    let ones: Vec<usize> = bits
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(k, _)| k + 1)
        .collect();
    match ones.as_slice() {
        [i] => Ok(*i),
        _ => Err(Error::decode("index ciphertext is not one-hot")),
    }
}
