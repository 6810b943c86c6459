// SPDX-License-Identifier: Apache-2.0

//! Setup for the hybrid-circuit equivalence checks of the anonymity
//! argument. In this setup the two index encryptions point at different
//! documents, `α_σ → i₀` and `α_{1-σ} → i₁`, and both documents encode the
//! same message under independent keys `ek` and `ek′`.

use rand::Rng;

use super::{blocks_of, enc, eval_columns, gen, EncodingKey, SchemeParams, Transcript};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::homomorphic::{
    he_enc_index, he_gen, BitCiphertext, HePublicKey, HeSecretKey, IndexCiphertext,
};
use crate::obfuscation::{DecodeCircuitParams, HybridCircuitParams};
use crate::vc::{vc_gen, CommitKey, CommitTree, Commitment, DecommitProof};

#[derive(Clone, Debug)]
pub struct HybridSetup {
    pub params: SchemeParams,
    pub x: BitString,
    pub positions: (usize, usize),
    pub ek: EncodingKey,
    pub ek_prime: EncodingKey,
    pub sigma: bool,
    pub pk: [HePublicKey; 2],
    pub sk: [HeSecretKey; 2],
    pub alpha: [IndexCiphertext; 2],
    pub transcript: Transcript,
    pub beta: [Vec<BitCiphertext>; 2],
    pub binding_index: usize,
    pub ck: [CommitKey; 2],
    pub gamma: [Commitment; 2],
    trees: [CommitTree; 2],
}

impl HybridSetup {
    #[allow(clippy::too_many_arguments)]
    pub fn new<R: Rng + ?Sized>(
        params: &SchemeParams,
        x: &BitString,
        i0: usize,
        i1: usize,
        others: &[BitString],
        binding_index: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let d = params.docs;
        if i0 == i1 || i0 == 0 || i1 == 0 || i0 > d || i1 > d || others.len() + 2 != d {
            return Err(Error::config(
                "invalid hybrid positions or filler documents",
            ));
        }
        let ek = gen(params, rng)?;
        let ek_prime = gen(params, rng)?;
        let mut rest = others.iter();
        let rows = (1..=d)
            .map(|k| match k {
                k if k == i0 => enc(&ek, x),
                k if k == i1 => enc(&ek_prime, x),
                _ => rest.next().unwrap().clone(),
            })
            .collect();
        let transcript = Transcript::new(rows)?;
        let sigma: bool = rng.gen();
        let (pk0, sk0) = he_gen(params.he, params.security, rng)?;
        let (pk1, sk1) = he_gen(params.he, params.security, rng)?;
        let pk = [pk0, pk1];
        let s = sigma as usize;
        let mut targets = [0; 2];
        targets[s] = i0;
        targets[1 - s] = i1;
        let alpha = [
            he_enc_index(&pk[0], targets[0], d, rng)?,
            he_enc_index(&pk[1], targets[1], d, rng)?,
        ];
        let beta = [
            eval_columns(&pk[0], &alpha[0], &transcript)?,
            eval_columns(&pk[1], &alpha[1], &transcript)?,
        ];
        let (ck, trees) = commit_pair(params, &pk[0], &beta, binding_index, rng)?;
        Ok(HybridSetup {
            params: *params,
            x: x.clone(),
            positions: (i0, i1),
            ek,
            ek_prime,
            sigma,
            pk,
            sk: [sk0, sk1],
            alpha,
            transcript,
            beta,
            binding_index,
            gamma: [trees[0].commitment(), trees[1].commitment()],
            ck,
            trees,
        })
    }

    /// Regenerates both commitment keys statistically binding at `index`.
    pub fn rebind<R: Rng + ?Sized>(&mut self, index: usize, rng: &mut R) -> Result<()> {
        let (ck, trees) = commit_pair(&self.params, &self.pk[0], &self.beta, index, rng)?;
        self.gamma = [trees[0].commitment(), trees[1].commitment()];
        self.ck = ck;
        self.trees = trees;
        self.binding_index = index;
        Ok(())
    }

    /// Honest opening of `β^j_u`.
    pub fn proof(&self, u: usize, j: usize) -> DecommitProof {
        self.trees[u].proof(j).expect("j in range")
    }

    /// `C[ek, σ, sk_σ, ck₀, ck₁, γ₀, γ₁]`.
    pub fn decode_circuit(&self) -> DecodeCircuitParams {
        DecodeCircuitParams {
            ek: self.ek.clone(),
            sigma: self.sigma,
            sk_sigma: self.sk[self.sigma as usize].clone(),
            ck: self.ck.clone(),
            gamma: self.gamma.clone(),
        }
    }

    /// `C[ek′, 1-σ, sk_{1-σ}, ck₀, ck₁, γ₀, γ₁]`.
    pub fn swapped_decode_circuit(&self) -> DecodeCircuitParams {
        DecodeCircuitParams {
            ek: self.ek_prime.clone(),
            sigma: !self.sigma,
            sk_sigma: self.sk[1 - self.sigma as usize].clone(),
            ck: self.ck.clone(),
            gamma: self.gamma.clone(),
        }
    }

    /// `C′[τ, ek, ek′, σ, sk₀, sk₁, ck₀, ck₁, γ₀, γ₁]`.
    pub fn hybrid_circuit(&self, tau: usize) -> HybridCircuitParams {
        HybridCircuitParams {
            tau,
            ek: self.ek.clone(),
            ek_prime: self.ek_prime.clone(),
            sigma: self.sigma,
            sk: self.sk.clone(),
            ck: self.ck.clone(),
            gamma: self.gamma.clone(),
        }
    }
}

type CommitPair = ([CommitKey; 2], [CommitTree; 2]);

fn commit_pair<R: Rng + ?Sized>(
    p: &SchemeParams,
    pk: &HePublicKey,
    beta: &[Vec<BitCiphertext>; 2],
    index: usize,
    rng: &mut R,
) -> Result<CommitPair> {
    let block_bits = 8 * pk.bit_ciphertext_len();
    let ck = [
        vc_gen(p.vc, p.security, p.doc_bits, block_bits, index, rng)?,
        vc_gen(p.vc, p.security, p.doc_bits, block_bits, index, rng)?,
    ];
    let trees = [
        CommitTree::build(&ck[0], &blocks_of(&beta[0]))?,
        CommitTree::build(&ck[1], &blocks_of(&beta[1]))?,
    ];
    Ok((ck, trees))
}
