// SPDX-License-Identifier: Apache-2.0

use rand::RngCore;

use super::{GameShape, ReactiveScheme, StreamingDecoder};
use crate::bits::BitString;
use crate::error::{Error, Result};

/// The leaker behaves like everyone else. `Dec` XORs the first ℓ′ bits of
/// every document, so its output on a game is uniform and independent of
/// the message.
#[derive(Clone, Copy, Debug)]
pub struct NullScheme {
    doc_bits: usize,
    msg_bits: usize,
}

impl NullScheme {
    pub fn new(doc_bits: usize, msg_bits: usize) -> Result<Self> {
        if doc_bits == 0 || msg_bits == 0 || msg_bits > doc_bits || msg_bits > 64 {
            return Err(Error::config(format!(
                "null scheme needs 0 < ℓ′ ≤ min(ℓ, 64), got ℓ = {doc_bits}, ℓ′ = {msg_bits}"
            )));
        }
        Ok(NullScheme { doc_bits, msg_bits })
    }
}

impl ReactiveScheme for NullScheme {
    type State = ();

    fn name(&self) -> &'static str {
        "null"
    }

    fn doc_bits(&self) -> usize {
        self.doc_bits
    }

    fn msg_bits(&self) -> usize {
        self.msg_bits
    }

    fn key_bits(&self) -> usize {
        0
    }

    fn init(&self, _x: &BitString, _shape: &GameShape, _rng: &mut dyn RngCore) -> Result<()> {
        Ok(())
    }

    fn encode(&self, _prefix: &[BitString], _state: &mut (), rng: &mut dyn RngCore) -> BitString {
        BitString::random(self.doc_bits, rng)
    }

    fn extract_key(
        &self,
        _t: &[BitString],
        _state: &(),
        _rng: &mut dyn RngCore,
    ) -> Result<BitString> {
        Ok(BitString::zeros(0))
    }

    fn decode(&self, dk: &BitString, t: &[BitString]) -> BitString {
        let summary = t
            .iter()
            .enumerate()
            .fold(self.start(), |acc, (k, doc)| self.absorb(&acc, k + 1, doc));
        self.finish(&summary, dk)
    }
}

impl StreamingDecoder for NullScheme {
    /// Running XOR of the document prefixes, as an integer.
    type Summary = u64;

    fn start(&self) -> u64 {
        0
    }

    fn absorb(&self, summary: &u64, _round: usize, doc: &BitString) -> u64 {
        summary ^ doc.slice(0..self.msg_bits).to_u64()
    }

    fn finish(&self, summary: &u64, _dk: &BitString) -> BitString {
        BitString::from_u64(*summary, self.msg_bits)
    }
}
