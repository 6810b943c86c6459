// SPDX-License-Identifier: Apache-2.0

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::{GameShape, ReactiveScheme};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::prf::keyed_hash;
use crate::scheme::{self, DecodingKey, EncodingKey, SchemeParams, Transcript};

/// A static scheme run as a reactive one: the leaker posts `enc(ek, x)` on
/// her first turn and uniform documents afterwards, then extracts `dk` for
/// her own round index. The channel carries the serialized decoding key.
#[derive(Clone, Debug)]
pub struct WrappedStatic {
    params: SchemeParams,
    key_bits: usize,
}

#[derive(Clone, Debug)]
pub struct WrappedState {
    x: BitString,
    ek: EncodingKey,
    round: usize,
    sent: bool,
}

impl WrappedStatic {
    /// Builds the wrapper and measures `s` with a dry run of `KeyEx`.
    pub fn new(params: SchemeParams) -> Result<Self> {
        params.validate()?;
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let ek = scheme::gen(&params, &mut rng)?;
        let rows = (0..params.docs)
            .map(|_| BitString::random(params.doc_bits, &mut rng))
            .collect();
        let t = Transcript::new(rows)?;
        let dk = scheme::key_extract(&params, &ek, &t, 1, &mut rng)?;
        Ok(WrappedStatic {
            params,
            key_bits: dk.bit_len(),
        })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    /// Decoder output when `dk` does not parse or `Dec` returns ⊥: a hash of
    /// the inputs, so that `Dec` stays a total deterministic function.
    fn fallback(&self, dk: &BitString, t: &[BitString]) -> BitString {
        let mut parts: Vec<Vec<u8>> = vec![dk.to_bytes()];
        parts.extend(t.iter().map(BitString::to_bytes));
        let refs: Vec<&[u8]> = parts.iter().map(Vec::as_slice).collect();
        let len = self.msg_bits();
        let mut bits = Vec::with_capacity(len);
        let mut counter = 0u32;
        while bits.len() < len {
            let tag = [
                counter.to_be_bytes().as_slice(),
                &(len as u32).to_be_bytes(),
            ]
            .concat();
            let block = keyed_hash(&tag, 0x57, &refs);
            bits.extend(
                BitString::from_bytes(&block, 256)
                    .expect("256-bit digest")
                    .iter()
                    .take(len - bits.len()),
            );
            counter += 1;
        }
        BitString::new(bits)
    }
}

impl ReactiveScheme for WrappedStatic {
    type State = WrappedState;

    fn name(&self) -> &'static str {
        "wrapped-static"
    }

    fn doc_bits(&self) -> usize {
        self.params.doc_bits
    }

    fn msg_bits(&self) -> usize {
        self.params.msg_bits()
    }

    fn key_bits(&self) -> usize {
        self.key_bits
    }

    fn validate(&self, shape: &GameShape) -> Result<()> {
        if shape.rounds != self.params.docs {
            return Err(Error::LengthMismatch {
                expected: self.params.docs,
                got: shape.rounds,
            });
        }
        if shape.players > shape.rounds {
            return Err(Error::config(
                "wrapped scheme needs every player to own a round (n ≤ d)",
            ));
        }
        Ok(())
    }

    fn init(
        &self,
        x: &BitString,
        shape: &GameShape,
        rng: &mut dyn RngCore,
    ) -> Result<WrappedState> {
        self.validate(shape)?;
        Ok(WrappedState {
            x: x.clone(),
            ek: scheme::gen(&self.params, rng)?,
            round: shape.leaker,
            sent: false,
        })
    }

    fn encode(
        &self,
        _prefix: &[BitString],
        state: &mut WrappedState,
        rng: &mut dyn RngCore,
    ) -> BitString {
        if state.sent {
            return BitString::random(self.doc_bits(), rng);
        }
        state.sent = true;
        scheme::enc(&state.ek, &state.x)
    }

    fn extract_key(
        &self,
        t: &[BitString],
        state: &WrappedState,
        rng: &mut dyn RngCore,
    ) -> Result<BitString> {
        let transcript = Transcript::new(t.to_vec())?;
        let dk = scheme::key_extract(&self.params, &state.ek, &transcript, state.round, rng)?;
        let bytes = dk.to_bytes();
        BitString::from_bytes(&bytes, bytes.len() * 8)
    }

    fn decode(&self, dk: &BitString, t: &[BitString]) -> BitString {
        let decoded = (|| {
            if !dk.len().is_multiple_of(8) {
                return None;
            }
            let key = DecodingKey::from_bytes(&dk.to_bytes()).ok()?;
            let transcript = Transcript::new(t.to_vec()).ok()?;
            scheme::dec(&key, &transcript)
        })();
        decoded.unwrap_or_else(|| self.fallback(dk, t))
    }
}
