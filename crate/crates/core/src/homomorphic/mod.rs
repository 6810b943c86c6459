// SPDX-License-Identifier: Apache-2.0

//! Public-key encryption of a document index with deterministic homomorphic
//! evaluation of the selector `mux[t, j](i) = t_i^j`.
//!
//! Two instantiations share one interface:
//!
//! * [`HeKind::Transparent`] blinds the index with a keyed permutation. The
//!   public key embeds the secret key, so it hides nothing. It exists for fast
//!   pipeline tests.
//! * [`HeKind::OneHot`] encrypts the one-hot vector of `i` under Paillier and
//!   evaluates `mux` as the product of the ciphertexts selected by the column,
//!   i.e. the encrypted inner product. No randomness enters evaluation.
//!
//! Every serialized form starts with the instantiation tag byte.

pub mod damgard_jurik;
mod onehot;
mod transparent;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::ser::{Reader, Writer};

pub(crate) const TAG_TRANSPARENT: u8 = 0x01;
pub(crate) const TAG_ONEHOT: u8 = 0x02;

pub const MIN_SECURITY: u32 = 16;
pub const MAX_SECURITY: u32 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeKind {
    Transparent,
    OneHot,
}

impl HeKind {
    pub fn tag(self) -> u8 {
        match self {
            HeKind::Transparent => TAG_TRANSPARENT,
            HeKind::OneHot => TAG_ONEHOT,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            TAG_TRANSPARENT => Ok(HeKind::Transparent),
            TAG_ONEHOT => Ok(HeKind::OneHot),
            other => Err(Error::decode(format!("unknown HE tag {other:#04x}"))),
        }
    }

    pub fn is_insecure(self) -> bool {
        self == HeKind::Transparent
    }
}

impl fmt::Display for HeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeKind::Transparent => "transparent",
            HeKind::OneHot => "onehot",
        })
    }
}

impl FromStr for HeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transparent" => Ok(HeKind::Transparent),
            "onehot" | "one-hot" => Ok(HeKind::OneHot),
            other => Err(Error::config(format!("unknown HE instantiation {other:?}"))),
        }
    }
}

fn check_security(security: u32) -> Result<()> {
    if !(MIN_SECURITY..=MAX_SECURITY).contains(&security) || !security.is_multiple_of(8) {
        return Err(Error::UnsupportedSecurity(security));
    }
    Ok(())
}

/// Paillier modulus size used for a given security parameter.
pub fn modulus_bits(security: u32) -> usize {
    4 * security as usize
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HePublicKey {
    security: u32,
    inner: PublicInner,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum PublicInner {
    Transparent(transparent::Key),
    OneHot(onehot::PublicKey),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeSecretKey {
    security: u32,
    inner: SecretInner,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum SecretInner {
    Transparent(transparent::Key),
    OneHot(onehot::SecretKey),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexCiphertext {
    inner: IndexInner,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum IndexInner {
    Transparent(transparent::IndexCt),
    OneHot(onehot::IndexCt),
}

/// Serialized one-bit ciphertext. Its length depends only on the key.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitCiphertext(Vec<u8>);

impl BitCiphertext {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        BitCiphertext(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }

    /// The ciphertext as a bit string, the block format of the commitments.
    pub fn to_bits(&self) -> BitString {
        BitString::from_bytes(&self.0, self.0.len() * 8).expect("exact byte width")
    }

    pub fn from_bits(bits: &BitString) -> Result<Self> {
        if !bits.len().is_multiple_of(8) {
            return Err(Error::decode("bit ciphertext must be whole bytes"));
        }
        Ok(BitCiphertext(bits.to_bytes()))
    }
}

pub fn he_gen<R: Rng + ?Sized>(
    kind: HeKind,
    security: u32,
    rng: &mut R,
) -> Result<(HePublicKey, HeSecretKey)> {
    check_security(security)?;
    let (pk, sk) = match kind {
        HeKind::Transparent => {
            let key = transparent::Key::generate(security, rng);
            (
                PublicInner::Transparent(key.clone()),
                SecretInner::Transparent(key),
            )
        }
        HeKind::OneHot => {
            let sk = onehot::SecretKey::generate(modulus_bits(security), rng)?;
            (PublicInner::OneHot(sk.public()), SecretInner::OneHot(sk))
        }
    };
    Ok((
        HePublicKey {
            security,
            inner: pk,
        },
        HeSecretKey {
            security,
            inner: sk,
        },
    ))
}

pub fn he_enc_index<R: Rng + ?Sized>(
    pk: &HePublicKey,
    index: usize,
    docs: usize,
    rng: &mut R,
) -> Result<IndexCiphertext> {
    if index == 0 || index > docs {
        return Err(Error::IndexOutOfRange {
            index,
            low: 1,
            high: docs,
        });
    }
    let inner = match &pk.inner {
        PublicInner::Transparent(k) => {
            IndexInner::Transparent(transparent::enc_index(k, index, docs, rng))
        }
        PublicInner::OneHot(k) => IndexInner::OneHot(onehot::enc_index(k, index, docs, rng)),
    };
    Ok(IndexCiphertext { inner })
}

/// Fresh encryption of a single bit.
pub fn he_enc_bit<R: Rng + ?Sized>(pk: &HePublicKey, bit: bool, rng: &mut R) -> BitCiphertext {
    match &pk.inner {
        PublicInner::Transparent(k) => transparent::enc_bit(k, bit, rng),
        PublicInner::OneHot(k) => onehot::enc_bit(k, bit, rng),
    }
}

/// Deterministic evaluation of `mux[column]` on the encrypted index.
pub fn he_eval_mux(
    pk: &HePublicKey,
    alpha: &IndexCiphertext,
    column: &BitString,
) -> Result<BitCiphertext> {
    if column.len() != alpha.docs() {
        return Err(Error::LengthMismatch {
            expected: alpha.docs(),
            got: column.len(),
        });
    }
    match (&pk.inner, &alpha.inner) {
        (PublicInner::Transparent(k), IndexInner::Transparent(a)) => {
            transparent::eval_mux(k, a, column)
        }
        (PublicInner::OneHot(k), IndexInner::OneHot(a)) => Ok(onehot::eval_mux(k, a, column)),
        _ => Err(Error::decode("index ciphertext does not match key type")),
    }
}

pub fn he_dec_bit(sk: &HeSecretKey, beta: &BitCiphertext) -> Result<bool> {
    match &sk.inner {
        SecretInner::Transparent(k) => transparent::dec_bit(k, beta),
        SecretInner::OneHot(k) => onehot::dec_bit(k, beta),
    }
}

/// Decrypts an index ciphertext, validating its structure.
pub fn he_dec_index(sk: &HeSecretKey, alpha: &IndexCiphertext) -> Result<usize> {
    match (&sk.inner, &alpha.inner) {
        (SecretInner::Transparent(k), IndexInner::Transparent(a)) => transparent::dec_index(k, a),
        (SecretInner::OneHot(k), IndexInner::OneHot(a)) => onehot::dec_index(k, a),
        _ => Err(Error::decode("index ciphertext does not match key type")),
    }
}

/// White-box inspection of a transparent index ciphertext using only public
/// data. Returns `None` for secure instantiations. This is the documented
/// leak that makes the transparent instantiation unsuitable for real use.
pub fn insecure_open_index(pk: &HePublicKey, alpha: &IndexCiphertext) -> Option<usize> {
    match (&pk.inner, &alpha.inner) {
        (PublicInner::Transparent(k), IndexInner::Transparent(a)) => {
            transparent::dec_index(k, a).ok()
        }
        _ => None,
    }
}

impl HePublicKey {
    pub fn kind(&self) -> HeKind {
        match self.inner {
            PublicInner::Transparent(_) => HeKind::Transparent,
            PublicInner::OneHot(_) => HeKind::OneHot,
        }
    }

    pub fn security(&self) -> u32 {
        self.security
    }

    /// Length in bytes of every [`BitCiphertext`] under this key.
    pub fn bit_ciphertext_len(&self) -> usize {
        match &self.inner {
            PublicInner::Transparent(_) => transparent::BIT_CT_LEN,
            PublicInner::OneHot(k) => k.bit_ct_len(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u8(self.kind().tag()).u16(self.security as u16);
        match &self.inner {
            PublicInner::Transparent(k) => w.bytes(k.as_bytes()),
            PublicInner::OneHot(k) => w.bytes(&k.to_bytes()),
        };
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let kind = HeKind::from_tag(r.u8()?)?;
        let security = r.u16()? as u32;
        check_security(security)?;
        let payload = r.bytes()?;
        r.finish()?;
        let inner = match kind {
            HeKind::Transparent => {
                PublicInner::Transparent(transparent::Key::from_bytes(security, payload)?)
            }
            HeKind::OneHot => {
                PublicInner::OneHot(onehot::PublicKey::from_bytes(security, payload)?)
            }
        };
        Ok(HePublicKey { security, inner })
    }
}

impl HeSecretKey {
    pub fn kind(&self) -> HeKind {
        match self.inner {
            SecretInner::Transparent(_) => HeKind::Transparent,
            SecretInner::OneHot(_) => HeKind::OneHot,
        }
    }

    pub fn security(&self) -> u32 {
        self.security
    }

    pub fn public(&self) -> HePublicKey {
        let inner = match &self.inner {
            SecretInner::Transparent(k) => PublicInner::Transparent(k.clone()),
            SecretInner::OneHot(k) => PublicInner::OneHot(k.public()),
        };
        HePublicKey {
            security: self.security,
            inner,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u8(self.kind().tag()).u16(self.security as u16);
        match &self.inner {
            SecretInner::Transparent(k) => w.bytes(k.as_bytes()),
            SecretInner::OneHot(k) => w.bytes(&k.to_bytes()),
        };
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let kind = HeKind::from_tag(r.u8()?)?;
        let security = r.u16()? as u32;
        check_security(security)?;
        let payload = r.bytes()?;
        r.finish()?;
        let inner = match kind {
            HeKind::Transparent => {
                SecretInner::Transparent(transparent::Key::from_bytes(security, payload)?)
            }
            HeKind::OneHot => {
                SecretInner::OneHot(onehot::SecretKey::from_bytes(security, payload)?)
            }
        };
        Ok(HeSecretKey { security, inner })
    }
}

impl IndexCiphertext {
    pub fn kind(&self) -> HeKind {
        match self.inner {
            IndexInner::Transparent(_) => HeKind::Transparent,
            IndexInner::OneHot(_) => HeKind::OneHot,
        }
    }

    /// Number of documents the encrypted index ranges over.
    pub fn docs(&self) -> usize {
        match &self.inner {
            IndexInner::Transparent(a) => a.docs,
            IndexInner::OneHot(a) => a.cts.len(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u8(self.kind().tag());
        match &self.inner {
            IndexInner::Transparent(a) => a.write(&mut w),
            IndexInner::OneHot(a) => a.write(&mut w),
        }
        w.into_bytes()
    }

    /// Parses an index ciphertext for use under `pk`.
    pub fn from_bytes(pk: &HePublicKey, bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let kind = HeKind::from_tag(r.u8()?)?;
        if kind != pk.kind() {
            return Err(Error::decode("index ciphertext does not match key type"));
        }
        let inner = match &pk.inner {
            PublicInner::Transparent(_) => {
                IndexInner::Transparent(transparent::IndexCt::read(&mut r)?)
            }
            PublicInner::OneHot(k) => IndexInner::OneHot(onehot::IndexCt::read(k, &mut r)?),
        };
        r.finish()?;
        Ok(IndexCiphertext { inner })
    }
}
