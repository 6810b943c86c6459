// SPDX-License-Identifier: Apache-2.0

//! The decode circuit `C[ek, σ, sk_σ, ck₀, ck₁, γ₀, γ₁]`, its hybrid variant
//! `C′[τ, ek, ek′, σ, sk₀, sk₁, …]`, and a reference obfuscator.
//!
//! The reference obfuscator is the identity: it serializes the circuit
//! parameters, pads them to the size of the larger of the two circuit
//! shapes, and evaluates by interpretation. It hides nothing, and every
//! serialized program carries an `insecure` flag.
//!
//! Circuit size is the byte length of the serialized parameter block,
//! including its one-byte interpreter tag.

use crate::error::{Error, Result};
use crate::homomorphic::{he_dec_bit, BitCiphertext, HeSecretKey};
use crate::prf::{prf_bit, PrfKey};
use crate::ser::{Reader, Writer};
use crate::vc::{vc_verify, CommitKey, Commitment, DecommitProof};

pub const FORMAT_VERSION: u8 = 1;

const TAG_DECODE: u8 = b'C';
const TAG_HYBRID: u8 = b'H';

/// Result of one circuit evaluation. `Bottom` is the in-band failure symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CircuitOutput {
    Bit(bool),
    Bottom,
}

impl CircuitOutput {
    pub fn bit(self) -> Option<bool> {
        match self {
            CircuitOutput::Bit(b) => Some(b),
            CircuitOutput::Bottom => None,
        }
    }
}

/// One evaluation input: the two claimed ciphertexts for bit `j` with their
/// openings against `γ₀` and `γ₁`.
#[derive(Clone, Copy, Debug)]
pub struct CircuitInput<'a> {
    pub beta: [&'a BitCiphertext; 2],
    pub proof: [&'a DecommitProof; 2],
    pub j: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeCircuitParams {
    pub ek: PrfKey,
    pub sigma: bool,
    pub sk_sigma: HeSecretKey,
    pub ck: [CommitKey; 2],
    pub gamma: [Commitment; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HybridCircuitParams {
    pub tau: usize,
    pub ek: PrfKey,
    pub ek_prime: PrfKey,
    pub sigma: bool,
    pub sk: [HeSecretKey; 2],
    pub ck: [CommitKey; 2],
    pub gamma: [Commitment; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Circuit {
    Decode(DecodeCircuitParams),
    Hybrid(HybridCircuitParams),
}

fn openings_verify(ck: &[CommitKey; 2], gamma: &[Commitment; 2], input: &CircuitInput<'_>) -> bool {
    (0..2).all(|u| {
        vc_verify(
            &ck[u],
            &gamma[u],
            input.j,
            &input.beta[u].to_bits(),
            input.proof[u],
        )
    })
}

/// `HE.D_sk(β) ⊕ f_ek(j)`, with any decryption or PRF domain failure as ⊥.
fn unmask(sk: &HeSecretKey, beta: &BitCiphertext, ek: &PrfKey, j: usize) -> CircuitOutput {
    match (he_dec_bit(sk, beta), prf_bit(ek, j as u64)) {
        (Ok(b), Ok(k)) => CircuitOutput::Bit(b ^ k),
        _ => CircuitOutput::Bottom,
    }
}

pub fn eval_decode_circuit(p: &DecodeCircuitParams, input: &CircuitInput<'_>) -> CircuitOutput {
    if !openings_verify(&p.ck, &p.gamma, input) {
        return CircuitOutput::Bottom;
    }
    unmask(&p.sk_sigma, input.beta[p.sigma as usize], &p.ek, input.j)
}

pub fn eval_hybrid_circuit(p: &HybridCircuitParams, input: &CircuitInput<'_>) -> CircuitOutput {
    if !openings_verify(&p.ck, &p.gamma, input) {
        return CircuitOutput::Bottom;
    }
    if input.j > p.tau {
        hybrid_upper_branch(p, input)
    } else {
        hybrid_lower_branch(p, input)
    }
}

/// Branch taken for `j > τ`: decrypt `β_σ` and unmask with `ek`.
pub fn hybrid_upper_branch(p: &HybridCircuitParams, input: &CircuitInput<'_>) -> CircuitOutput {
    let s = p.sigma as usize;
    unmask(&p.sk[s], input.beta[s], &p.ek, input.j)
}

/// Branch taken for `j ≤ τ`: decrypt `β_{1-σ}` and unmask with `ek′`.
pub fn hybrid_lower_branch(p: &HybridCircuitParams, input: &CircuitInput<'_>) -> CircuitOutput {
    let s = 1 - p.sigma as usize;
    unmask(&p.sk[s], input.beta[s], &p.ek_prime, input.j)
}

impl Circuit {
    pub fn eval(&self, input: &CircuitInput<'_>) -> CircuitOutput {
        match self {
            Circuit::Decode(p) => eval_decode_circuit(p, input),
            Circuit::Hybrid(p) => eval_hybrid_circuit(p, input),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        match self {
            Circuit::Decode(p) => {
                w.u8(TAG_DECODE)
                    .bytes(p.ek.as_bytes())
                    .u8(p.sigma as u8)
                    .bytes(&p.sk_sigma.to_bytes());
                write_commitments(&mut w, &p.ck, &p.gamma);
            }
            Circuit::Hybrid(p) => {
                w.u8(TAG_HYBRID)
                    .u32(p.tau as u32)
                    .bytes(p.ek.as_bytes())
                    .bytes(p.ek_prime.as_bytes())
                    .u8(p.sigma as u8)
                    .bytes(&p.sk[0].to_bytes())
                    .bytes(&p.sk[1].to_bytes());
                write_commitments(&mut w, &p.ck, &p.gamma);
            }
        }
        w.into_bytes()
    }

    fn read(r: &mut Reader<'_>) -> Result<Self> {
        match r.u8()? {
            TAG_DECODE => {
                let ek = PrfKey::from_bytes(r.bytes()?)?;
                let sigma = read_bit(r)?;
                let sk_sigma = HeSecretKey::from_bytes(r.bytes()?)?;
                let (ck, gamma) = read_commitments(r)?;
                Ok(Circuit::Decode(DecodeCircuitParams {
                    ek,
                    sigma,
                    sk_sigma,
                    ck,
                    gamma,
                }))
            }
            TAG_HYBRID => {
                let tau = r.u32()? as usize;
                let ek = PrfKey::from_bytes(r.bytes()?)?;
                let ek_prime = PrfKey::from_bytes(r.bytes()?)?;
                let sigma = read_bit(r)?;
                let sk = [
                    HeSecretKey::from_bytes(r.bytes()?)?,
                    HeSecretKey::from_bytes(r.bytes()?)?,
                ];
                let (ck, gamma) = read_commitments(r)?;
                Ok(Circuit::Hybrid(HybridCircuitParams {
                    tau,
                    ek,
                    ek_prime,
                    sigma,
                    sk,
                    ck,
                    gamma,
                }))
            }
            other => Err(Error::decode(format!("unknown circuit tag {other:#04x}"))),
        }
    }

    pub fn size(&self) -> usize {
        self.to_bytes().len()
    }

    /// Sizes of the decode-shaped and hybrid-shaped circuits over the same
    /// key material. The shapes differ by `τ` and one extra PRF key and HE
    /// secret key, each length-prefixed; all keys have fixed widths.
    pub fn shape_sizes(&self) -> (usize, usize) {
        let size = self.size();
        let extra = |ek: &PrfKey, sk: &HeSecretKey| {
            4 + (4 + ek.as_bytes().len()) + (4 + sk.to_bytes().len())
        };
        match self {
            Circuit::Decode(p) => (size, size + extra(&p.ek, &p.sk_sigma)),
            Circuit::Hybrid(p) => (size - extra(&p.ek, &p.sk[0]), size),
        }
    }

    pub fn padded_size(&self) -> usize {
        let (c, c_prime) = self.shape_sizes();
        c.max(c_prime)
    }
}

fn read_bit(r: &mut Reader<'_>) -> Result<bool> {
    match r.u8()? {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(Error::decode(format!("selector byte {other} is not a bit"))),
    }
}

fn write_commitments(w: &mut Writer, ck: &[CommitKey; 2], gamma: &[Commitment; 2]) {
    w.bytes(&ck[0].to_bytes())
        .bytes(&ck[1].to_bytes())
        .bytes(&gamma[0].to_bytes())
        .bytes(&gamma[1].to_bytes());
}

fn read_commitments(r: &mut Reader<'_>) -> Result<([CommitKey; 2], [Commitment; 2])> {
    let ck = [
        CommitKey::from_bytes(r.bytes()?)?,
        CommitKey::from_bytes(r.bytes()?)?,
    ];
    let gamma = [
        Commitment::from_bytes(r.bytes()?)?,
        Commitment::from_bytes(r.bytes()?)?,
    ];
    Ok((ck, gamma))
}

/// Output of the reference obfuscator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObfuscatedProgram {
    circuit: Circuit,
    padded_size: usize,
}

pub fn obfuscate(circuit: Circuit) -> ObfuscatedProgram {
    let padded_size = circuit.padded_size();
    ObfuscatedProgram {
        circuit,
        padded_size,
    }
}

impl ObfuscatedProgram {
    pub fn eval(&self, input: &CircuitInput<'_>) -> CircuitOutput {
        self.circuit.eval(input)
    }

    pub fn is_insecure(&self) -> bool {
        true
    }

    pub fn padded_size(&self) -> usize {
        self.padded_size
    }

    /// The interpreted circuit. Exposed because the reference obfuscator
    /// provides no hiding.
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut block = self.circuit.to_bytes();
        block.resize(self.padded_size, 0);
        let mut w = Writer::new();
        w.u8(FORMAT_VERSION)
            .u8(self.is_insecure() as u8)
            .bytes(&block);
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        r.expect_u8(FORMAT_VERSION, "program version")?;
        r.expect_u8(1, "insecure flag")?;
        let block = r.bytes()?;
        r.finish()?;
        let mut br = Reader::new(block);
        let circuit = Circuit::read(&mut br)?;
        let used = circuit.size();
        if block[used..].iter().any(|&b| b != 0) {
            return Err(Error::decode("non-zero padding after circuit"));
        }
        if block.len() != circuit.padded_size() {
            return Err(Error::decode("padded size does not match circuit shape"));
        }
        Ok(ObfuscatedProgram {
            circuit,
            padded_size: block.len(),
        })
    }
}
