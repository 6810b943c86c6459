// SPDX-License-Identifier: Apache-2.0

use rand::RngCore;

use super::{GameShape, ReactiveScheme};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::prf::keyed_hash;

pub const MAGIC: u16 = 0xA5C3;
pub const MAGIC_BITS: usize = 16;

/// The leaker's first document is `MAGIC ‖ (x ⊕ pad(dk))` and the decoder
/// reads the first document carrying the magic prefix. With `s = 0` the pad
/// is zero and the leaker reveals herself to anyone reading the transcript.
#[derive(Clone, Copy, Debug)]
pub struct DirectScheme {
    doc_bits: usize,
    key_bits: usize,
}

#[derive(Clone, Debug)]
pub struct DirectState {
    x: BitString,
    dk: BitString,
    sent: bool,
}

impl DirectScheme {
    pub fn new(doc_bits: usize, key_bits: usize) -> Result<Self> {
        if doc_bits <= MAGIC_BITS {
            return Err(Error::config(format!(
                "direct scheme needs ℓ > {MAGIC_BITS}, got {doc_bits}"
            )));
        }
        Ok(DirectScheme { doc_bits, key_bits })
    }

    fn magic() -> BitString {
        BitString::from_u64(MAGIC as u64, MAGIC_BITS)
    }

    fn pad(&self, dk: &BitString) -> BitString {
        let len = self.msg_bits();
        if dk.is_empty() {
            return BitString::zeros(len);
        }
        let mut bits = Vec::with_capacity(len);
        let mut counter = 0u32;
        while bits.len() < len {
            let block = keyed_hash(
                &dk.to_bytes(),
                0x44,
                &[&(dk.len() as u32).to_be_bytes(), &counter.to_be_bytes()],
            );
            let chunk = BitString::from_bytes(&block, 256).expect("256-bit digest");
            bits.extend(chunk.iter().take(len - bits.len()));
            counter += 1;
        }
        BitString::new(bits)
    }
}

impl ReactiveScheme for DirectScheme {
    type State = DirectState;

    fn name(&self) -> &'static str {
        "direct"
    }

    fn doc_bits(&self) -> usize {
        self.doc_bits
    }

    fn msg_bits(&self) -> usize {
        self.doc_bits - MAGIC_BITS
    }

    fn key_bits(&self) -> usize {
        self.key_bits
    }

    fn init(
        &self,
        x: &BitString,
        _shape: &GameShape,
        rng: &mut dyn RngCore,
    ) -> Result<DirectState> {
        Ok(DirectState {
            x: x.clone(),
            dk: BitString::random(self.key_bits, rng),
            sent: false,
        })
    }

    fn encode(
        &self,
        _prefix: &[BitString],
        state: &mut DirectState,
        rng: &mut dyn RngCore,
    ) -> BitString {
        if state.sent {
            return BitString::random(self.doc_bits, rng);
        }
        state.sent = true;
        Self::magic().concat(&state.x.xor(&self.pad(&state.dk)))
    }

    fn extract_key(
        &self,
        _t: &[BitString],
        state: &DirectState,
        _rng: &mut dyn RngCore,
    ) -> Result<BitString> {
        Ok(state.dk.clone())
    }

    fn decode(&self, dk: &BitString, t: &[BitString]) -> BitString {
        let magic = Self::magic();
        match t.iter().find(|doc| doc.slice(0..MAGIC_BITS) == magic) {
            Some(doc) => doc.slice(MAGIC_BITS..self.doc_bits).xor(&self.pad(dk)),
            None => BitString::zeros(self.msg_bits()),
        }
    }

    fn diagnostics(&self, state: &DirectState) -> super::Diagnostics {
        super::Diagnostics {
            committed: state.sent,
            ..Default::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reactive::{run_game, run_game_with_leaker};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn leaker_document_carries_magic() {
        let scheme = DirectScheme::new(32, 0).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let x = BitString::random(16, &mut rng);
        let shape = GameShape {
            players: 3,
            rounds: 7,
            leaker: 2,
        };
        let record = run_game_with_leaker(&scheme, shape, &x, &mut rng).unwrap();
        assert_eq!(record.transcript[1].slice(0..16).to_u64(), MAGIC as u64);
        assert_eq!(record.transcript[1].slice(16..32), x);
        assert!(record.correct);
    }

    #[test]
    fn keyed_variant_round_trips() {
        let scheme = DirectScheme::new(40, 12).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x = BitString::random(24, &mut rng);
            let record = run_game(&scheme, 2, 6, &x, &mut rng).unwrap();
            assert_eq!(record.dk.len(), 12);
            assert!(record.correct);
        }
    }

    #[test]
    fn short_documents_rejected() {
        assert!(DirectScheme::new(16, 0).is_err());
    }
}
