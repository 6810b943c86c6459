// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::time::Instant;

use clap::Args;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{write_json, CliError, CliResult, EXIT_FAILURE, EXIT_OK, SCHEMA_VERSION};
use crate::bits::BitString;
use crate::homomorphic::{he_dec_bit, he_dec_index, he_enc_index, he_eval_mux, he_gen, HeKind};
use crate::rng::stream_rng;
use crate::vc::{vc_gen, vc_verify, CommitTree, VcKind};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VcTestArgs {
    #[arg(long, default_value = "merkle")]
    pub vc: VcKind,
    #[arg(long, default_value_t = 128)]
    pub security: u32,
    /// Number of blocks L.
    #[arg(long, default_value_t = 16)]
    pub length: usize,
    #[arg(long, default_value_t = 8)]
    pub block_bits: usize,
    /// Binding index in [0, L]; 0 binds nowhere.
    #[arg(long, default_value_t = 1)]
    pub binding_index: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct HeTestArgs {
    #[arg(long, default_value = "transparent")]
    pub he: HeKind,
    #[arg(long, default_value_t = 128)]
    pub security: u32,
    /// Index range d.
    #[arg(long, default_value_t = 8)]
    pub docs: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Serialize)]
struct VcReport<'a> {
    schema_version: u32,
    command: &'static str,
    version: &'static str,
    config: &'a VcTestArgs,
    honest_accepted: u64,
    honest_total: u64,
    tampered_at_binding_rejected: u64,
    tampered_at_binding_total: u64,
    commitment_bytes: usize,
    proof_bytes: usize,
    passed: bool,
}

/// Commits random vectors, checks every honest opening verifies and that a
/// flipped block at the binding index is rejected.
pub fn run_vc(args: VcTestArgs, out: &mut dyn Write) -> CliResult<i32> {
    let start = Instant::now();
    let mut rng = stream_rng(args.seed, "vc-test", 0);
    let ck = vc_gen(
        args.vc,
        args.security,
        args.length,
        args.block_bits,
        args.binding_index,
        &mut rng,
    )?;
    let (mut ok, mut total, mut rejected, mut tampered) = (0, 0, 0, 0);
    for _ in 0..args.trials {
        let blocks: Vec<BitString> = (0..args.length)
            .map(|_| BitString::random(args.block_bits, &mut rng))
            .collect();
        let tree = CommitTree::build(&ck, &blocks)?;
        let y = tree.commitment();
        let j = rng.gen_range(1..=args.length);
        let proof = tree.proof(j)?;
        total += 1;
        ok += u64::from(vc_verify(&ck, &y, j, &blocks[j - 1], &proof));
        if args.binding_index > 0 {
            let b = args.binding_index;
            let proof = tree.proof(b)?;
            let mut u = blocks[b - 1].clone();
            u.flip(rng.gen_range(0..args.block_bits));
            tampered += 1;
            rejected += u64::from(!vc_verify(&ck, &y, b, &u, &proof));
        }
    }
    eprintln!("vc-test: {:.3} s", start.elapsed().as_secs_f64());
    let passed = ok == total && rejected == tampered;
    write_json(
        out,
        &VcReport {
            schema_version: SCHEMA_VERSION,
            command: "vc-test",
            version: env!("CARGO_PKG_VERSION"),
            config: &args,
            honest_accepted: ok,
            honest_total: total,
            tampered_at_binding_rejected: rejected,
            tampered_at_binding_total: tampered,
            commitment_bytes: ck.commitment_len(),
            proof_bytes: ck.proof_len(),
            passed,
        },
    )?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILURE })
}

#[derive(Serialize)]
struct HeReport<'a> {
    schema_version: u32,
    command: &'static str,
    version: &'static str,
    config: &'a HeTestArgs,
    insecure: bool,
    mux_correct: u64,
    index_correct: u64,
    trials: u64,
    passed: bool,
}

/// Checks `dec(eval_mux(enc(i), column)) = column[i]` on random inputs.
pub fn run_he(args: HeTestArgs, out: &mut dyn Write) -> CliResult<i32> {
    if args.docs == 0 {
        return Err(CliError::Invalid("--docs must be positive".into()));
    }
    let start = Instant::now();
    let mut rng = stream_rng(args.seed, "he-test", 0);
    let (pk, sk) = he_gen(args.he, args.security, &mut rng)?;
    if args.he.is_insecure() {
        log::warn!(
            "the {} instantiation hides nothing; use it for testing only",
            args.he
        );
    }
    let (mut mux_ok, mut index_ok) = (0, 0);
    for _ in 0..args.trials {
        let i = rng.gen_range(1..=args.docs);
        let column = BitString::random(args.docs, &mut rng);
        let alpha = he_enc_index(&pk, i, args.docs, &mut rng)?;
        let beta = he_eval_mux(&pk, &alpha, &column)?;
        mux_ok += u64::from(he_dec_bit(&sk, &beta)? == column.get(i - 1));
        index_ok += u64::from(he_dec_index(&sk, &alpha)? == i);
    }
    eprintln!("he-test: {:.3} s", start.elapsed().as_secs_f64());
    let passed = mux_ok == args.trials && index_ok == args.trials;
    write_json(
        out,
        &HeReport {
            schema_version: SCHEMA_VERSION,
            command: "he-test",
            version: env!("CARGO_PKG_VERSION"),
            config: &args,
            insecure: args.he.is_insecure(),
            mux_correct: mux_ok,
            index_correct: index_ok,
            trials: args.trials,
            passed,
        },
    )?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILURE })
}
