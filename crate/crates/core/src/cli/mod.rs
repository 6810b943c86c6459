// SPDX-License-Identifier: Apache-2.0

//! The `anonsteg` experiment runner.
//!
//! Reports are JSON (sweeps are CSV) with a `schema_version` field. Logs,
//! warnings and timings go to stderr. Exit codes: 0 success, 1 decoding
//! returned ⊥ or a runtime failure, 2 invalid configuration, 3 a run refused
//! by the sample budget.

mod detect;
mod encode;
mod inspect;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::Error;

pub use detect::{DetectArgs, ProfileMode, SweepArgs};
pub use encode::EncodeDecodeArgs;
pub use inspect::{HeTestArgs, VcTestArgs};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "anonsteg",
    version,
    about = "Anonymous steganography experiments"
)]
pub struct Cli {
    /// TOML file with one table per subcommand (e.g. `[detect]`) whose keys
    /// are the long flag names with `-` replaced by `_`. Values in the file
    /// take precedence over flags given on the command line.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run gen / enc / key extraction / dec once, or decode saved files.
    EncodeDecode(EncodeDecodeArgs),
    /// Play reactive games and run the multiplicative detector and the
    /// additive baseline on each.
    Detect(DetectArgs),
    /// Detector tournament over a parameter grid, one CSV row per cell.
    Sweep(SweepArgs),
    /// Check honest openings and binding-index tampering on random vectors.
    VcTest(VcTestArgs),
    /// Check homomorphic mux evaluation on random indices and columns.
    HeTest(HeTestArgs),
}

/// Failure classes, mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Budget(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failure(_) => EXIT_FAILURE,
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::Budget(m) | CliError::Failure(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Budget { .. } => CliError::Budget(e.to_string()),
            Error::Config(_)
            | Error::UnsupportedSecurity(_)
            | Error::LengthMismatch { .. }
            | Error::IndexOutOfRange { .. } => CliError::Invalid(e.to_string()),
            Error::Domain(_) | Error::Decode(_) | Error::Io(_) => CliError::Failure(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Overlays the `[section]` table of a TOML config file onto parsed flags.
fn apply_config<T: Serialize + DeserializeOwned>(
    args: T,
    config: Option<&Path>,
    section: &str,
) -> CliResult<T> {
    let Some(path) = config else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
    let table: toml::Table = toml::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))?;
    let Some(overrides) = table.get(section) else {
        return Ok(args);
    };
    let mut value = serde_json::to_value(&args).map_err(|e| CliError::Failure(e.to_string()))?;
    let overrides =
        serde_json::to_value(overrides).map_err(|e| CliError::Invalid(e.to_string()))?;
    let (Some(target), Some(source)) = (value.as_object_mut(), overrides.as_object()) else {
        return Err(CliError::Invalid(format!(
            "config section [{section}] must be a table"
        )));
    };
    for (key, v) in source {
        if !target.contains_key(key) {
            return Err(CliError::Invalid(format!(
                "unknown key {key:?} in config section [{section}]"
            )));
        }
        target.insert(key.clone(), v.clone());
    }
    serde_json::from_value(value)
        .map_err(|e| CliError::Invalid(format!("config section [{section}]: {e}")))
}

/// Runs `work` on a pool of `jobs` threads (0 = rayon's default).
fn with_jobs<T: Send>(jobs: usize, work: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Failure(e.to_string()))?;
    Ok(pool.install(work))
}

fn write_json(out: &mut dyn Write, value: &impl Serialize) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::Failure(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

/// Parses and runs one invocation, writing the report to `out`. Returns the
/// process exit code.
pub fn run_with_args<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<i32> {
    let config = cli.config.as_deref();
    log::info!("anonsteg {}", env!("CARGO_PKG_VERSION"));
    match cli.command {
        Command::EncodeDecode(a) => encode::run(apply_config(a, config, "encode-decode")?, out),
        Command::Detect(a) => detect::run_detect(apply_config(a, config, "detect")?, out),
        Command::Sweep(a) => detect::run_sweep(apply_config(a, config, "sweep")?, out),
        Command::VcTest(a) => inspect::run_vc(apply_config(a, config, "vc-test")?, out),
        Command::HeTest(a) => inspect::run_he(apply_config(a, config, "he-test")?, out),
    }
}

/// Entry point for the binary.
pub fn main() -> std::process::ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let code = run_with_args(std::env::args_os(), &mut lock);
    let _ = lock.flush();
    std::process::ExitCode::from(code as u8)
}
