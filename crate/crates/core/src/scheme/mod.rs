// SPDX-License-Identifier: Apache-2.0

//! The anonymous steganography scheme `(Gen, Enc, KeyEx, Dec)`.
//!
//! * `Gen` samples a PRF key `ek`.
//! * `Enc` masks the message bitwise, `c^j = x^j ⊕ f_ek(j)`.
//! * `KeyEx`, given the full transcript and the leaker's position `i`,
//!   encrypts `i` under two fresh HE keys, evaluates `mux[t, j]` on both
//!   encryptions for every bit `j`, commits to each resulting ciphertext
//!   vector, and obfuscates a circuit that checks both openings and unmasks
//!   one of the two ciphertexts.
//! * `Dec` recomputes the ciphertexts, commitments and openings from public
//!   data and runs the circuit on every bit.
//!
//! `HE.Eval` is deterministic, so the ciphertexts recomputed by `Dec` are
//! byte-identical to those committed during `KeyEx`.

mod game;
mod hybrid;
mod key;
mod transcript;

pub use game::{anonymity_game, white_box_recover_index, AnonymityChallenge};
pub use hybrid::HybridSetup;
pub use key::DecodingKey;
pub use transcript::Transcript;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::homomorphic::{
    he_enc_index, he_eval_mux, he_gen, BitCiphertext, HeKind, HePublicKey, IndexCiphertext,
};
use crate::obfuscation::{obfuscate, Circuit, CircuitInput, CircuitOutput, DecodeCircuitParams};
use crate::prf::{stream_xor, PrfKey};
use crate::vc::{vc_gen, CommitTree, Commitment, VcKind};

pub type EncodingKey = PrfKey;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeParams {
    /// Security parameter λ.
    pub security: u32,
    /// Document length ℓ, equal to the message length.
    pub doc_bits: usize,
    /// Number of documents d.
    pub docs: usize,
    pub he: HeKind,
    pub vc: VcKind,
}

impl SchemeParams {
    pub fn new(
        security: u32,
        doc_bits: usize,
        docs: usize,
        he: HeKind,
        vc: VcKind,
    ) -> Result<Self> {
        let p = SchemeParams {
            security,
            doc_bits,
            docs,
            he,
            vc,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.security == 0 || !self.security.is_multiple_of(8) || self.security > 1024 {
            return Err(Error::UnsupportedSecurity(self.security));
        }
        if self.doc_bits == 0 || self.docs == 0 {
            return Err(Error::config("document length and count must be positive"));
        }
        Ok(())
    }

    /// Message length ℓ′.
    pub fn msg_bits(&self) -> usize {
        self.doc_bits
    }

    fn check_transcript(&self, t: &Transcript) -> Result<()> {
        if t.docs() != self.docs {
            return Err(Error::LengthMismatch {
                expected: self.docs,
                got: t.docs(),
            });
        }
        if t.doc_bits() != self.doc_bits {
            return Err(Error::LengthMismatch {
                expected: self.doc_bits,
                got: t.doc_bits(),
            });
        }
        Ok(())
    }
}

pub fn gen<R: Rng + ?Sized>(params: &SchemeParams, rng: &mut R) -> Result<EncodingKey> {
    PrfKey::generate(params.security, rng)
}

pub fn enc(ek: &EncodingKey, x: &BitString) -> BitString {
    stream_xor(ek, x)
}

/// Everything `KeyEx` derives, for inspection by tests and experiments.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub dk: DecodingKey,
    /// `β^j_u` for `j ∈ [ℓ]`, indexed `[u][j-1]`.
    pub beta: [Vec<BitCiphertext>; 2],
    pub gamma: [Commitment; 2],
    pub sigma: bool,
}

/// `β^j = HE.Eval_pk(mux[t, j], α)` for every `j ∈ [ℓ]`.
pub fn eval_columns(
    pk: &HePublicKey,
    alpha: &IndexCiphertext,
    t: &Transcript,
) -> Result<Vec<BitCiphertext>> {
    (1..=t.doc_bits())
        .into_par_iter()
        .map(|j| he_eval_mux(pk, alpha, t.column(j)))
        .collect()
}

pub fn blocks_of(beta: &[BitCiphertext]) -> Vec<BitString> {
    beta.iter().map(BitCiphertext::to_bits).collect()
}

pub fn key_extract<R: Rng + ?Sized>(
    params: &SchemeParams,
    ek: &EncodingKey,
    t: &Transcript,
    i: usize,
    rng: &mut R,
) -> Result<DecodingKey> {
    Ok(key_extract_traced(params, ek, t, i, rng)?.dk)
}

pub fn key_extract_traced<R: Rng + ?Sized>(
    params: &SchemeParams,
    ek: &EncodingKey,
    t: &Transcript,
    i: usize,
    rng: &mut R,
) -> Result<Extraction> {
    params.validate()?;
    params.check_transcript(t)?;
    if i == 0 || i > params.docs {
        return Err(Error::IndexOutOfRange {
            index: i,
            low: 1,
            high: params.docs,
        });
    }
    // step 1
    let (pk0, sk0) = he_gen(params.he, params.security, rng)?;
    let (pk1, sk1) = he_gen(params.he, params.security, rng)?;
    let alpha = [
        he_enc_index(&pk0, i, params.docs, rng)?,
        he_enc_index(&pk1, i, params.docs, rng)?,
    ];
    let pk = [pk0, pk1];
    // step 2
    let beta = [
        eval_columns(&pk[0], &alpha[0], t)?,
        eval_columns(&pk[1], &alpha[1], t)?,
    ];
    // step 3
    let block_bits = 8 * pk[0].bit_ciphertext_len();
    let ck = [
        vc_gen(
            params.vc,
            params.security,
            params.doc_bits,
            block_bits,
            0,
            rng,
        )?,
        vc_gen(
            params.vc,
            params.security,
            params.doc_bits,
            block_bits,
            0,
            rng,
        )?,
    ];
    let gamma = [
        CommitTree::build(&ck[0], &blocks_of(&beta[0]))?.commitment(),
        CommitTree::build(&ck[1], &blocks_of(&beta[1]))?.commitment(),
    ];
    // steps 4-6
    let sigma: bool = rng.gen();
    let sk_sigma = if sigma { sk1 } else { sk0 };
    let program = obfuscate(Circuit::Decode(DecodeCircuitParams {
        ek: ek.clone(),
        sigma,
        sk_sigma,
        ck: ck.clone(),
        gamma: gamma.clone(),
    }));
    // step 7
    Ok(Extraction {
        dk: DecodingKey {
            pk,
            alpha,
            ck,
            program,
        },
        beta,
        gamma,
        sigma,
    })
}

/// Public recomputation performed by `Dec`.
#[derive(Clone, Debug)]
pub struct DecodeTrace {
    pub beta: [Vec<BitCiphertext>; 2],
    pub gamma: [Commitment; 2],
    pub outputs: Vec<CircuitOutput>,
}

impl DecodeTrace {
    /// The decoded message, or `None` (⊥) if any bit evaluated to ⊥.
    pub fn message(&self) -> Option<BitString> {
        self.outputs
            .iter()
            .map(|o| o.bit())
            .collect::<Option<Vec<_>>>()
            .map(BitString::new)
    }
}

/// `Dec(dk, t)`. `None` is ⊥.
pub fn dec(dk: &DecodingKey, t: &Transcript) -> Option<BitString> {
    dec_traced(dk, t).ok()?.message()
}

/// `Dec` with its intermediate values. Structural mismatches between `dk`
/// and `t` (wrong `d` or `ℓ`) are reported as errors.
pub fn dec_traced(dk: &DecodingKey, t: &Transcript) -> Result<DecodeTrace> {
    for u in 0..2 {
        if dk.alpha[u].docs() != t.docs() {
            return Err(Error::LengthMismatch {
                expected: dk.alpha[u].docs(),
                got: t.docs(),
            });
        }
        if dk.ck[u].length() != t.doc_bits() {
            return Err(Error::LengthMismatch {
                expected: dk.ck[u].length(),
                got: t.doc_bits(),
            });
        }
    }
    // step 2
    let beta = [
        eval_columns(&dk.pk[0], &dk.alpha[0], t)?,
        eval_columns(&dk.pk[1], &dk.alpha[1], t)?,
    ];
    // steps 3-4
    let trees = [
        CommitTree::build(&dk.ck[0], &blocks_of(&beta[0]))?,
        CommitTree::build(&dk.ck[1], &blocks_of(&beta[1]))?,
    ];
    let gamma = [trees[0].commitment(), trees[1].commitment()];
    // step 5
    let outputs = (1..=t.doc_bits())
        .into_par_iter()
        .map(|j| {
            let proof = [trees[0].proof(j)?, trees[1].proof(j)?];
            Ok(dk.program.eval(&CircuitInput {
                beta: [&beta[0][j - 1], &beta[1][j - 1]],
                proof: [&proof[0], &proof[1]],
                j,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecodeTrace {
        beta,
        gamma,
        outputs,
    })
}
