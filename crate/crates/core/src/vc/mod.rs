// SPDX-License-Identifier: Apache-2.0

//! Vector commitments over `L` fixed-size blocks with per-position openings.
//!
//! Both instantiations are full binary trees over `capacity` leaves (a power
//! of two, padding leaves hold the all-zeros block) and share the generic
//! tree walk in this module. They differ in the leaf encoding and in the
//! two-to-one combiner:
//!
//! * [`VcKind::Merkle`]: salted SHA-256 digests, one domain tag per level.
//!   Computationally binding everywhere; the binding index is ignored.
//! * [`VcKind::Ssb`]: each level's combiner homomorphically selects one child
//!   under a Damgård–Jurik encryption of one bit of the hidden binding
//!   position, so the root decrypts to the leaf at that position. Openings at
//!   the binding position are statistically binding.
//!
//! Binding index `0` binds a padding position (capacity is chosen so that
//! one always exists for [`VcKind::Ssb`]), so no real block is bound.

pub mod merkle;
pub mod ssb;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::ser::{Reader, Writer};

pub const FORMAT_VERSION: u8 = 1;

const TAG_MERKLE: u8 = 0x01;
const TAG_SSB: u8 = 0x02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VcKind {
    Merkle,
    Ssb,
}

impl VcKind {
    fn tag(self) -> u8 {
        match self {
            VcKind::Merkle => TAG_MERKLE,
            VcKind::Ssb => TAG_SSB,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            TAG_MERKLE => Ok(VcKind::Merkle),
            TAG_SSB => Ok(VcKind::Ssb),
            other => Err(Error::decode(format!(
                "unknown commitment tag {other:#04x}"
            ))),
        }
    }
}

impl fmt::Display for VcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VcKind::Merkle => "merkle",
            VcKind::Ssb => "ssb",
        })
    }
}

impl FromStr for VcKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "merkle" => Ok(VcKind::Merkle),
            "ssb" => Ok(VcKind::Ssb),
            other => Err(Error::config(format!(
                "unknown commitment instantiation {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitKey {
    security: u32,
    length: usize,
    block_bits: usize,
    inner: KeyInner,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum KeyInner {
    Merkle(merkle::Key),
    Ssb(ssb::Key),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Commitment {
    kind: VcKind,
    root: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecommitProof {
    kind: VcKind,
    path: Vec<u8>,
}

/// Generates a key for `length` blocks of `block_bits` bits each, binding at
/// `binding_index ∈ [0, length]`.
pub fn vc_gen<R: Rng + ?Sized>(
    kind: VcKind,
    security: u32,
    length: usize,
    block_bits: usize,
    binding_index: usize,
    rng: &mut R,
) -> Result<CommitKey> {
    check_shape(length, block_bits, binding_index)?;
    let inner = match kind {
        VcKind::Merkle => KeyInner::Merkle(merkle::Key::generate(rng)),
        VcKind::Ssb => KeyInner::Ssb(ssb::Key::generate(
            security,
            length,
            block_bits,
            binding_index,
            rng,
        )?),
    };
    Ok(CommitKey {
        security,
        length,
        block_bits,
        inner,
    })
}

fn check_shape(length: usize, block_bits: usize, binding_index: usize) -> Result<()> {
    if length == 0 {
        return Err(Error::Domain("commitment length must be positive".into()));
    }
    if block_bits == 0 {
        return Err(Error::Domain("block size must be positive".into()));
    }
    if binding_index > length {
        return Err(Error::IndexOutOfRange {
            index: binding_index,
            low: 0,
            high: length,
        });
    }
    Ok(())
}

/// Builds an SSB key over an explicit (possibly toy) modulus.
pub fn vc_gen_ssb_with_modulus<R: Rng + ?Sized>(
    modulus: crate::homomorphic::damgard_jurik::DjPublic,
    length: usize,
    block_bits: usize,
    binding_index: usize,
    rng: &mut R,
) -> Result<CommitKey> {
    check_shape(length, block_bits, binding_index)?;
    let key = ssb::Key::with_modulus(modulus, length, block_bits, binding_index, rng)?;
    Ok(CommitKey {
        security: 0,
        length,
        block_bits,
        inner: KeyInner::Ssb(key),
    })
}

impl CommitKey {
    pub fn kind(&self) -> VcKind {
        match self.inner {
            KeyInner::Merkle(_) => VcKind::Merkle,
            KeyInner::Ssb(_) => VcKind::Ssb,
        }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn block_bits(&self) -> usize {
        self.block_bits
    }

    /// Number of leaves in the padded tree.
    pub fn capacity(&self) -> usize {
        match &self.inner {
            KeyInner::Merkle(_) => merkle::capacity(self.length),
            KeyInner::Ssb(_) => ssb::capacity(self.length),
        }
    }

    pub fn height(&self) -> usize {
        self.capacity().trailing_zeros() as usize
    }

    pub fn ssb(&self) -> Option<&ssb::Key> {
        match &self.inner {
            KeyInner::Ssb(k) => Some(k),
            KeyInner::Merkle(_) => None,
        }
    }

    /// Byte width of a node at `level` (0 = leaves).
    fn node_width(&self, level: usize) -> usize {
        match &self.inner {
            KeyInner::Merkle(_) => merkle::DIGEST_LEN,
            KeyInner::Ssb(k) => k.node_width(level),
        }
    }

    fn leaf(&self, block: &BitString) -> Vec<u8> {
        match &self.inner {
            KeyInner::Merkle(k) => k.leaf(block),
            KeyInner::Ssb(k) => k.leaf(block),
        }
    }

    /// Combines two children into their parent at `level ≥ 1`. `None` when a
    /// child is not a canonical node encoding.
    fn combine(&self, level: usize, left: &[u8], right: &[u8]) -> Option<Vec<u8>> {
        match &self.inner {
            KeyInner::Merkle(k) => Some(k.combine(level, left, right)),
            KeyInner::Ssb(k) => k.combine_bytes(level, left, right),
        }
    }

    fn check_blocks(&self, blocks: &[BitString]) -> Result<()> {
        if blocks.len() != self.length {
            return Err(Error::LengthMismatch {
                expected: self.length,
                got: blocks.len(),
            });
        }
        if let Some(b) = blocks.iter().find(|b| b.len() != self.block_bits) {
            return Err(Error::LengthMismatch {
                expected: self.block_bits,
                got: b.len(),
            });
        }
        Ok(())
    }

    pub fn proof_len(&self) -> usize {
        (0..self.height()).map(|l| self.node_width(l)).sum()
    }

    pub fn commitment_len(&self) -> usize {
        self.node_width(self.height())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u8(FORMAT_VERSION)
            .u8(self.kind().tag())
            .u16(self.security as u16)
            .u32(self.length as u32)
            .u32(self.block_bits as u32);
        match &self.inner {
            KeyInner::Merkle(k) => w.bytes(k.as_bytes()),
            KeyInner::Ssb(k) => w.bytes(&k.to_bytes()),
        };
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        r.expect_u8(FORMAT_VERSION, "commit key version")?;
        let kind = VcKind::from_tag(r.u8()?)?;
        let security = r.u16()? as u32;
        let length = r.u32()? as usize;
        let block_bits = r.u32()? as usize;
        check_shape(length, block_bits, 0)?;
        let payload = r.bytes()?;
        r.finish()?;
        let inner = match kind {
            VcKind::Merkle => KeyInner::Merkle(merkle::Key::from_bytes(payload)?),
            VcKind::Ssb => KeyInner::Ssb(ssb::Key::from_bytes(length, block_bits, payload)?),
        };
        Ok(CommitKey {
            security,
            length,
            block_bits,
            inner,
        })
    }
}

/// All tree levels for one committed vector, leaves first.
#[derive(Clone, Debug)]
pub struct CommitTree {
    kind: VcKind,
    levels: Vec<Vec<Vec<u8>>>,
}

impl CommitTree {
    pub fn build(ck: &CommitKey, blocks: &[BitString]) -> Result<Self> {
        ck.check_blocks(blocks)?;
        let pad = BitString::zeros(ck.block_bits);
        let mut leaves: Vec<Vec<u8>> = blocks.par_iter().map(|b| ck.leaf(b)).collect();
        leaves.resize(ck.capacity(), ck.leaf(&pad));
        let mut levels = vec![leaves];
        for level in 1..=ck.height() {
            let below = levels.last().unwrap();
            let next: Vec<Vec<u8>> = below
                .par_chunks(2)
                .map(|pair| {
                    ck.combine(level, &pair[0], &pair[1])
                        .expect("honest nodes are canonical")
                })
                .collect();
            levels.push(next);
        }
        Ok(CommitTree {
            kind: ck.kind(),
            levels,
        })
    }

    pub fn commitment(&self) -> Commitment {
        Commitment {
            kind: self.kind,
            root: self.levels.last().unwrap()[0].clone(),
        }
    }

    /// Opening for 1-based position `j`.
    pub fn proof(&self, j: usize) -> Result<DecommitProof> {
        let len = self.levels[0].len();
        if j == 0 || j > len {
            return Err(Error::IndexOutOfRange {
                index: j,
                low: 1,
                high: len,
            });
        }
        let mut pos = j - 1;
        let mut path = Vec::new();
        for level in &self.levels[..self.levels.len() - 1] {
            path.extend_from_slice(&level[pos ^ 1]);
            pos >>= 1;
        }
        Ok(DecommitProof {
            kind: self.kind,
            path,
        })
    }
}

pub fn vc_commit(ck: &CommitKey, blocks: &[BitString]) -> Result<Commitment> {
    Ok(CommitTree::build(ck, blocks)?.commitment())
}

pub fn vc_decommit(ck: &CommitKey, blocks: &[BitString], j: usize) -> Result<DecommitProof> {
    if j == 0 || j > ck.length {
        return Err(Error::IndexOutOfRange {
            index: j,
            low: 1,
            high: ck.length,
        });
    }
    CommitTree::build(ck, blocks)?.proof(j)
}

/// Recomputes the root implied by opening position `j` to `u` with `proof`.
/// `None` if any input is malformed.
pub fn root_from_opening(
    ck: &CommitKey,
    j: usize,
    u: &BitString,
    proof: &DecommitProof,
) -> Option<Vec<u8>> {
    if proof.kind != ck.kind()
        || j == 0
        || j > ck.length
        || u.len() != ck.block_bits
        || proof.path.len() != ck.proof_len()
    {
        return None;
    }
    let mut node = ck.leaf(u);
    let mut pos = j - 1;
    let mut offset = 0;
    for level in 0..ck.height() {
        let width = ck.node_width(level);
        let sibling = &proof.path[offset..offset + width];
        offset += width;
        node = if pos & 1 == 0 {
            ck.combine(level + 1, &node, sibling)?
        } else {
            ck.combine(level + 1, sibling, &node)?
        };
        pos >>= 1;
    }
    Some(node)
}

/// Total: malformed inputs are rejected, never reported as errors.
pub fn vc_verify(
    ck: &CommitKey,
    y: &Commitment,
    j: usize,
    u: &BitString,
    proof: &DecommitProof,
) -> bool {
    y.kind == ck.kind() && root_from_opening(ck, j, u, proof).is_some_and(|root| root == y.root)
}

impl Commitment {
    pub fn root(&self) -> &[u8] {
        &self.root
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u8(FORMAT_VERSION).u8(self.kind.tag()).bytes(&self.root);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        r.expect_u8(FORMAT_VERSION, "commitment version")?;
        let kind = VcKind::from_tag(r.u8()?)?;
        let root = r.bytes()?.to_vec();
        r.finish()?;
        Ok(Commitment { kind, root })
    }
}

impl DecommitProof {
    pub fn path(&self) -> &[u8] {
        &self.path
    }

    /// Raw path bytes with the given instantiation, used to build forgeries.
    pub fn from_path(kind: VcKind, path: Vec<u8>) -> Self {
        DecommitProof { kind, path }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u8(FORMAT_VERSION).u8(self.kind.tag()).bytes(&self.path);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        r.expect_u8(FORMAT_VERSION, "proof version")?;
        let kind = VcKind::from_tag(r.u8()?)?;
        let path = r.bytes()?.to_vec();
        r.finish()?;
        Ok(DecommitProof { kind, path })
    }
}
