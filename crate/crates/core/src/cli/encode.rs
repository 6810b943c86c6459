// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::{write_json, CliError, CliResult, EXIT_FAILURE, EXIT_OK, SCHEMA_VERSION};
use crate::bits::BitString;
use crate::homomorphic::HeKind;
use crate::scheme::{self, DecodingKey, SchemeParams, Transcript};
use crate::vc::VcKind;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EncodeDecodeArgs {
    /// Security parameter λ (multiple of 8).
    #[arg(long, default_value_t = 128)]
    pub security: u32,
    /// Document length ℓ, which is also the message length.
    #[arg(long, default_value_t = 32)]
    pub doc_bits: usize,
    /// Number of documents d.
    #[arg(long, default_value_t = 8)]
    pub docs: usize,
    /// Leaker position in [1, d]; random if omitted.
    #[arg(long)]
    pub index: Option<usize>,
    /// Homomorphic encryption instantiation: transparent or onehot.
    #[arg(long, default_value = "transparent")]
    pub he: HeKind,
    /// Vector commitment instantiation: merkle or ssb.
    #[arg(long, default_value = "merkle")]
    pub vc: VcKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Message as a 0/1 string; random if omitted.
    #[arg(long)]
    pub message: Option<String>,
    /// Write `transcript.bin` and `dk.bin` into this directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Decode-only mode: transcript file to decode (requires --dk).
    #[arg(long, requires = "dk")]
    pub transcript: Option<PathBuf>,
    /// Decode-only mode: decoding-key file.
    #[arg(long, requires = "transcript")]
    pub dk: Option<PathBuf>,
}

#[derive(Serialize)]
struct EncodeReport {
    schema_version: u32,
    command: &'static str,
    version: &'static str,
    config: EncodeDecodeArgs,
    index: usize,
    message: BitString,
    decoded: Option<BitString>,
    success: bool,
    dk_bits: usize,
    transcript_bits: usize,
    insecure: bool,
}

#[derive(Serialize)]
struct DecodeReport {
    schema_version: u32,
    command: &'static str,
    version: &'static str,
    security: u32,
    docs: usize,
    doc_bits: usize,
    decoded: Option<BitString>,
    success: bool,
    dk_bits: usize,
}

fn warn_insecure(he: HeKind) {
    log::warn!(
        "the reference obfuscator is the identity: decoding keys expose every hard-wired secret"
    );
    if he.is_insecure() {
        log::warn!("transparent HE embeds its secret key in the public key");
    }
}

pub fn run(args: EncodeDecodeArgs, out: &mut dyn Write) -> CliResult<i32> {
    if let (Some(t), Some(dk)) = (&args.transcript, &args.dk) {
        return decode_files(t, dk, out);
    }
    let params = SchemeParams::new(args.security, args.doc_bits, args.docs, args.he, args.vc)?;
    warn_insecure(args.he);
    log::info!(
        "config: {}",
        serde_json::to_string(&args).unwrap_or_default()
    );
    let mut rng = ChaCha20Rng::seed_from_u64(args.seed);
    let x = match &args.message {
        Some(m) => BitString::parse(m).map_err(|e| CliError::Invalid(e.to_string()))?,
        None => BitString::random(params.msg_bits(), &mut rng),
    };
    if x.len() != params.msg_bits() {
        return Err(CliError::Invalid(format!(
            "message has {} bits, expected ℓ = {}",
            x.len(),
            params.msg_bits()
        )));
    }
    let index = match args.index {
        Some(i) if i == 0 || i > params.docs => {
            return Err(CliError::Invalid(format!(
                "index {i} outside [1, {}]",
                params.docs
            )))
        }
        Some(i) => i,
        None => rng.gen_range(1..=params.docs),
    };

    let start = Instant::now();
    let ek = scheme::gen(&params, &mut rng)?;
    let rows = (1..=params.docs)
        .map(|k| {
            if k == index {
                scheme::enc(&ek, &x)
            } else {
                BitString::random(params.doc_bits, &mut rng)
            }
        })
        .collect();
    let t = Transcript::new(rows)?;
    let dk = scheme::key_extract(&params, &ek, &t, index, &mut rng)?;
    let extracted = start.elapsed();
    let decoded = scheme::dec(&dk, &t);
    eprintln!(
        "timing: key extraction {:.3} ms, decoding {:.3} ms",
        extracted.as_secs_f64() * 1e3,
        (start.elapsed() - extracted).as_secs_f64() * 1e3
    );

    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("transcript.bin"), t.to_bytes(params.security))?;
        std::fs::write(dir.join("dk.bin"), dk.to_bytes())?;
    }
    let success = decoded.as_ref() == Some(&x);
    let report = EncodeReport {
        schema_version: SCHEMA_VERSION,
        command: "encode-decode",
        version: env!("CARGO_PKG_VERSION"),
        index,
        message: x,
        decoded,
        success,
        dk_bits: dk.bit_len(),
        transcript_bits: params.docs * params.doc_bits,
        insecure: true,
        config: args,
    };
    write_json(out, &report)?;
    Ok(if success { EXIT_OK } else { EXIT_FAILURE })
}

fn decode_files(t_path: &PathBuf, dk_path: &PathBuf, out: &mut dyn Write) -> CliResult<i32> {
    let dk_bytes = std::fs::read(dk_path)?;
    let t_bytes = std::fs::read(t_path)?;
    let dk = DecodingKey::from_bytes(&dk_bytes)
        .map_err(|e| CliError::Failure(format!("{}: {e}", dk_path.display())))?;
    warn_insecure(dk.pk[0].kind());
    let (decoded, security, docs, doc_bits) = match Transcript::from_bytes(&t_bytes) {
        Ok((t, security)) => (scheme::dec(&dk, &t), security, t.docs(), t.doc_bits()),
        Err(e) => {
            log::warn!("{}: {e}; reporting ⊥", t_path.display());
            (None, 0, 0, 0)
        }
    };
    let success = decoded.is_some();
    if !success {
        eprintln!("decoding returned ⊥");
    }
    write_json(
        out,
        &DecodeReport {
            schema_version: SCHEMA_VERSION,
            command: "encode-decode",
            version: env!("CARGO_PKG_VERSION"),
            security,
            docs,
            doc_bits,
            decoded,
            success,
            dk_bits: dk.bit_len(),
        },
    )?;
    Ok(if success { EXIT_OK } else { EXIT_FAILURE })
}
