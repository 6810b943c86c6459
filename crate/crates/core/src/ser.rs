// SPDX-License-Identifier: Apache-2.0

//! Length-prefixed binary encoding shared by every on-disk and on-wire format.
//!
//! Integers are big-endian. A length prefix is a `u32`. Readers are strict:
//! [`Reader::finish`] fails if any input is left unconsumed.

use num_bigint_dig::BigUint;

use crate::error::{Error, Result};

#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.buf.push(v);
        self
    }

    pub fn u16(&mut self, v: u16) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn u32(&mut self, v: u32) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn raw(&mut self, bytes: &[u8]) -> &mut Self {
        self.buf.extend_from_slice(bytes);
        self
    }

    /// `u32` length followed by the bytes.
    pub fn bytes(&mut self, bytes: &[u8]) -> &mut Self {
        self.u32(bytes.len() as u32);
        self.raw(bytes)
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

pub struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Reader { data, pos: 0 }
    }

    pub fn raw(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.data.len() - self.pos < n {
            return Err(Error::decode(format!(
                "truncated input: wanted {n} bytes at offset {}",
                self.pos
            )));
        }
        let out = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.raw(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_be_bytes(self.raw(2)?.try_into().unwrap()))
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.raw(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(self.raw(8)?.try_into().unwrap()))
    }

    pub fn bytes(&mut self) -> Result<&'a [u8]> {
        let n = self.u32()? as usize;
        self.raw(n)
    }

    pub fn expect_u8(&mut self, want: u8, what: &str) -> Result<()> {
        let got = self.u8()?;
        if got != want {
            return Err(Error::decode(format!(
                "{what}: expected 0x{want:02x}, found 0x{got:02x}"
            )));
        }
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(Error::decode(format!(
                "{} trailing bytes",
                self.data.len() - self.pos
            )));
        }
        Ok(())
    }
}

/// Big-endian encoding left-padded to exactly `width` bytes.
pub fn biguint_to_fixed(v: &BigUint, width: usize) -> Vec<u8> {
    let raw = v.to_bytes_be();
    let raw: &[u8] = if raw == [0] { &[] } else { &raw };
    assert!(raw.len() <= width, "integer wider than its fixed encoding");
    let mut out = vec![0u8; width - raw.len()];
    out.extend_from_slice(raw);
    out
}

pub fn byte_width(modulus: &BigUint) -> usize {
    modulus.bits().div_ceil(8)
}
