// SPDX-License-Identifier: Apache-2.0

//! The anonymity game and a white-box inspector for the reference
//! instantiations.

use rand::Rng;

use super::{enc, gen, key_extract, DecodingKey, SchemeParams, Transcript};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::homomorphic::{he_dec_index, insecure_open_index};
use crate::obfuscation::Circuit;

/// Challenger output. `b` and `positions` belong to the harness; the
/// adversary's view is `(dk, transcript)`.
#[derive(Clone, Debug)]
pub struct AnonymityChallenge {
    pub dk: DecodingKey,
    pub transcript: Transcript,
    pub b: bool,
    pub positions: (usize, usize),
}

/// Runs the challenger with adversary inputs `x`, `i₀ ≠ i₁` and the `d - 2`
/// remaining documents `others` (placed in order at the other positions).
/// The adversary does not see `ek`.
pub fn anonymity_game<R: Rng + ?Sized>(
    params: &SchemeParams,
    x: &BitString,
    i0: usize,
    i1: usize,
    others: &[BitString],
    rng: &mut R,
) -> Result<AnonymityChallenge> {
    let d = params.docs;
    if i0 == i1 || i0 == 0 || i1 == 0 || i0 > d || i1 > d {
        return Err(Error::config(
            "challenge positions must be distinct and in [1, d]",
        ));
    }
    if others.len() != d - 2 {
        return Err(Error::LengthMismatch {
            expected: d - 2,
            got: others.len(),
        });
    }
    if x.len() != params.msg_bits() {
        return Err(Error::LengthMismatch {
            expected: params.msg_bits(),
            got: x.len(),
        });
    }
    let b: bool = rng.gen();
    let (ib, other_pos) = if b { (i1, i0) } else { (i0, i1) };
    let ek = gen(params, rng)?;
    let mut rest = others.iter();
    let rows = (1..=d)
        .map(|k| {
            if k == ib {
                enc(&ek, x)
            } else if k == other_pos {
                BitString::random(params.doc_bits, rng)
            } else {
                rest.next().unwrap().clone()
            }
        })
        .collect();
    let transcript = Transcript::new(rows)?;
    let dk = key_extract(params, &ek, &transcript, ib, rng)?;
    Ok(AnonymityChallenge {
        dk,
        transcript,
        b,
        positions: (i0, i1),
    })
}

/// Recovers the leaker position from a decoding key by reading secrets the
/// reference instantiations fail to hide: the secret key interpreted by the
/// identity obfuscator, or the key embedded in a transparent HE public key.
pub fn white_box_recover_index(dk: &DecodingKey) -> Option<usize> {
    if let Circuit::Decode(p) = dk.program.circuit() {
        if let Ok(i) = he_dec_index(&p.sk_sigma, &dk.alpha[p.sigma as usize]) {
            return Some(i);
        }
    }
    insecure_open_index(&dk.pk[0], &dk.alpha[0])
}
