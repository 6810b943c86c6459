// SPDX-License-Identifier: Apache-2.0

//! The public document vector, kept in both row and column form.
//!
//! File format (all integers big-endian):
//!
//! ```text
//! "ASTR" | version u8 | λ u16 | ℓ u32 | d u32 | d × ⌈ℓ/8⌉ bytes
//! ```
//!
//! Each document is packed MSB-first into its own `⌈ℓ/8⌉` bytes with zero
//! fill in the last byte.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::ser::{Reader, Writer};

pub const MAGIC: &[u8; 4] = b"ASTR";
pub const FORMAT_VERSION: u8 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    rows: Vec<BitString>,
    columns: Vec<BitString>,
}

impl Transcript {
    pub fn new(rows: Vec<BitString>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::Domain(
                "transcript needs at least one document".into(),
            ));
        };
        let bits = first.len();
        if bits == 0 {
            return Err(Error::Domain("documents must be non-empty".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != bits) {
            return Err(Error::LengthMismatch {
                expected: bits,
                got: bad.len(),
            });
        }
        let columns = (0..bits)
            .map(|j| rows.iter().map(|r| r.get(j)).collect::<Vec<_>>().into())
            .collect();
        Ok(Transcript { rows, columns })
    }

    pub fn docs(&self) -> usize {
        self.rows.len()
    }

    pub fn doc_bits(&self) -> usize {
        self.columns.len()
    }

    pub fn rows(&self) -> &[BitString] {
        &self.rows
    }

    /// Document `i`, 1-based.
    pub fn document(&self, i: usize) -> &BitString {
        &self.rows[i - 1]
    }

    /// Bit `j` of every document, 1-based.
    pub fn column(&self, j: usize) -> &BitString {
        &self.columns[j - 1]
    }

    /// Copy with document `i` (1-based) replaced.
    pub fn with_document(&self, i: usize, doc: BitString) -> Result<Self> {
        if i == 0 || i > self.docs() {
            return Err(Error::IndexOutOfRange {
                index: i,
                low: 1,
                high: self.docs(),
            });
        }
        let mut rows = self.rows.clone();
        rows[i - 1] = doc;
        Transcript::new(rows)
    }

    pub fn to_bytes(&self, security: u32) -> Vec<u8> {
        let mut w = Writer::new();
        w.raw(MAGIC)
            .u8(FORMAT_VERSION)
            .u16(security as u16)
            .u32(self.doc_bits() as u32)
            .u32(self.docs() as u32);
        for r in &self.rows {
            w.raw(&r.to_bytes());
        }
        w.into_bytes()
    }

    /// Parses a transcript file, returning it with its recorded λ.
    pub fn from_bytes(bytes: &[u8]) -> Result<(Self, u32)> {
        let mut r = Reader::new(bytes);
        if r.raw(4)? != MAGIC {
            return Err(Error::decode("bad transcript magic"));
        }
        r.expect_u8(FORMAT_VERSION, "transcript version")?;
        let security = r.u16()? as u32;
        let bits = r.u32()? as usize;
        let docs = r.u32()? as usize;
        let width = bits.div_ceil(8);
        let rows = (0..docs)
            .map(|_| {
                let raw = r.raw(width)?;
                let doc = BitString::from_bytes(raw, bits)?;
                if doc.to_bytes() != raw {
                    return Err(Error::decode("non-zero fill bits in document"));
                }
                Ok(doc)
            })
            .collect::<Result<Vec<_>>>()?;
        r.finish()?;
        Ok((Transcript::new(rows)?, security))
    }
}
