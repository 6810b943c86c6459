// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{with_jobs, write_json, CliError, CliResult, EXIT_OK, SCHEMA_VERSION};
use crate::bits::BitString;
use crate::detector::{
    additive_baseline, detect_with_profile, estimate_profile, DetectorParams, DetectorReport,
    ExactOracle, GuessRule, NormalizedScheme, ProbabilityProfile, DEFAULT_BUDGET,
};
use crate::error::Error;
use crate::homomorphic::HeKind;
use crate::reactive::{
    run_game, DirectScheme, GameRecord, NullScheme, ReactiveScheme, ResetScheme, SchemeKind,
    StreamingDecoder, WrappedStatic, MAGIC_BITS,
};
use crate::rng::stream_rng;
use crate::scheme::SchemeParams;
use crate::stats::Proportion;
use crate::vc::VcKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileMode {
    /// Monte-Carlo estimates with `N` samples per prefix.
    Sampled,
    /// Exhaustive dynamic programming (null and reset-example, small ℓ).
    Exact,
}

impl fmt::Display for ProfileMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProfileMode::Sampled => "sampled",
            ProfileMode::Exact => "exact",
        })
    }
}

impl FromStr for ProfileMode {
    type Err = Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "sampled" => Ok(ProfileMode::Sampled),
            "exact" => Ok(ProfileMode::Exact),
            other => Err(Error::Config(format!("unknown profile mode {other:?}"))),
        }
    }
}

/// Scheme and game shape shared by `detect` and `sweep`.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SchemeArgs {
    /// Reactive scheme: null, direct, reset-example or wrapped-static.
    #[arg(long, default_value = "reset-example")]
    pub scheme: SchemeKind,
    /// Number of players n.
    #[arg(long, default_value_t = 2)]
    pub players: usize,
    /// Document length ℓ. Defaults to ℓ′ + 16 for direct and ℓ′ for the
    /// static wrapper, and to 8 otherwise.
    #[arg(long)]
    pub doc_bits: Option<usize>,
    /// Pad decoder output with a public uniform string carried in the first
    /// document.
    #[arg(long, default_value_t = false)]
    pub normalize: bool,
    /// Fixed target message as a 0/1 string; random per game if omitted.
    #[arg(long)]
    pub message: Option<String>,
    /// Security parameter for wrapped-static.
    #[arg(long, default_value_t = 128)]
    pub security: u32,
    /// HE instantiation for wrapped-static.
    #[arg(long, default_value = "transparent")]
    pub he: HeKind,
    /// Commitment instantiation for wrapped-static.
    #[arg(long, default_value = "merkle")]
    pub vc: VcKind,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DetectArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub scheme: SchemeArgs,
    /// Rounds d.
    #[arg(long, default_value_t = 40)]
    pub rounds: usize,
    /// Message length ℓ′ (null, direct and wrapped-static).
    #[arg(long)]
    pub msg_bits: Option<usize>,
    /// Anonymous-channel length s (direct only).
    #[arg(long, default_value_t = 0)]
    pub key_bits: usize,
    #[arg(long, default_value_t = 100)]
    pub games: u64,
    /// Detector slack ε.
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, default_value = "sampled")]
    pub profile: ProfileMode,
    /// Samples per prefix instead of the formula's N. Voids the detector's
    /// accuracy guarantee.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Largest N that runs without an override.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Write one JSON line per game (record, detector report, baseline guess).
    #[arg(long)]
    pub games_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(
    after_help = "CSV columns: schema_version, cell, cell_seed, scheme, players, rounds, key_bits, \
epsilon, msg_bits, doc_bits, games, samples, samples_overridden, correctness, guess_rate, guess_ci_low, \
guess_ci_high, fallback_rate, baseline_rate"
)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub scheme: SchemeArgs,
    /// Comma-separated values of d.
    #[arg(long, value_delimiter = ',', default_value = "4,6")]
    pub rounds: Vec<usize>,
    /// Comma-separated values of s (direct only; ignored otherwise).
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub key_bits: Vec<usize>,
    /// Comma-separated values of ε.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub epsilon: Vec<f64>,
    /// Comma-separated values of ℓ′ (ignored by reset-example).
    #[arg(long, value_delimiter = ',', default_value = "16")]
    pub msg_bits: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub games: u64,
    #[arg(long, default_value = "sampled")]
    pub profile: ProfileMode,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// CSV output path; stdout if omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// One tournament cell.
#[derive(Debug, Clone, Serialize)]
pub struct CellConfig {
    pub scheme: SchemeKind,
    pub players: usize,
    pub rounds: usize,
    pub doc_bits: usize,
    pub msg_bits: usize,
    pub key_bits: usize,
    pub epsilon: f64,
    pub games: u64,
    pub profile: ProfileMode,
    pub samples: Option<u64>,
    pub budget: u64,
    pub seed: u64,
    pub normalize: bool,
    pub message: Option<BitString>,
    pub security: u32,
    pub he: HeKind,
    pub vc: VcKind,
}

#[derive(Debug, Clone, Serialize)]
pub struct GameOutcome {
    pub game: u64,
    pub record: GameRecord,
    pub report: DetectorReport,
    pub baseline_guess: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub correctness: Proportion,
    pub detector: Proportion,
    pub uniform_fallbacks: u64,
    pub baseline: Proportion,
    /// Games with at least one leaker reset where the baseline blamed the
    /// non-leaker.
    pub baseline_blames_non_leaker_after_reset: Proportion,
}

pub struct Tournament {
    pub params: DetectorParams,
    pub warnings: Vec<String>,
    pub outcomes: Vec<GameOutcome>,
    pub aggregate: Aggregate,
}

fn resolve_cell(
    s: &SchemeArgs,
    rounds: usize,
    msg_bits: Option<usize>,
    key_bits: usize,
) -> CliResult<(usize, usize, usize)> {
    let invalid = |m: String| CliError::Invalid(m);
    match s.scheme {
        SchemeKind::Null => {
            let doc = s.doc_bits.or(msg_bits).unwrap_or(8);
            Ok((doc, msg_bits.unwrap_or(doc), 0))
        }
        SchemeKind::Direct => {
            let doc = match (s.doc_bits, msg_bits) {
                (Some(d), Some(m)) if d != m + MAGIC_BITS => {
                    return Err(invalid(format!(
                        "direct scheme needs ℓ = ℓ′ + {MAGIC_BITS}"
                    )))
                }
                (Some(d), _) => d,
                (None, Some(m)) => m + MAGIC_BITS,
                (None, None) => 32,
            };
            Ok((doc, doc.saturating_sub(MAGIC_BITS), key_bits))
        }
        SchemeKind::ResetExample => Ok((s.doc_bits.unwrap_or(8), 1, 0)),
        SchemeKind::WrappedStatic => {
            let doc = s.doc_bits.or(msg_bits).unwrap_or(8);
            if msg_bits.is_some_and(|m| m != doc) {
                return Err(invalid("wrapped-static needs ℓ′ = ℓ".into()));
            }
            let _ = rounds;
            Ok((doc, doc, 0))
        }
    }
}

fn parse_message(m: &Option<String>) -> CliResult<Option<BitString>> {
    m.as_deref()
        .map(BitString::parse)
        .transpose()
        .map_err(|e| CliError::Invalid(e.to_string()))
}

fn play<S: ReactiveScheme + ?Sized>(
    scheme: &S,
    cell: &CellConfig,
) -> CliResult<Vec<(BitString, GameRecord)>> {
    (0..cell.games)
        .into_par_iter()
        .map(|g| {
            let mut rng = stream_rng(cell.seed, "game", g);
            let x = match &cell.message {
                Some(m) => m.clone(),
                None => BitString::random(scheme.msg_bits(), &mut rng),
            };
            let record = run_game(scheme, cell.players, cell.rounds, &x, &mut rng)?;
            Ok((x, record))
        })
        .collect::<crate::Result<Vec<_>>>()
        .map_err(CliError::from)
}

fn judge(
    cell: &CellConfig,
    params: &DetectorParams,
    games: Vec<(BitString, GameRecord)>,
    profiles: Vec<ProbabilityProfile>,
) -> (Vec<GameOutcome>, Aggregate) {
    let outcomes: Vec<GameOutcome> = games
        .into_iter()
        .zip(profiles)
        .enumerate()
        .map(|(g, ((_, record), profile))| {
            let mut rng = stream_rng(cell.seed, "guess", g as u64);
            let baseline_guess = additive_baseline(&profile, cell.players, &mut rng);
            let report = detect_with_profile(profile, cell.players, params, &mut rng);
            GameOutcome {
                game: g as u64,
                record,
                report,
                baseline_guess,
            }
        })
        .collect();
    let n = outcomes.len() as u64;
    let count = |f: &dyn Fn(&GameOutcome) -> bool| outcomes.iter().filter(|o| f(o)).count() as u64;
    let reset_games = count(&|o| o.record.diagnostics.resets > 0);
    let aggregate = Aggregate {
        correctness: Proportion::new(count(&|o| o.record.correct), n),
        detector: Proportion::new(count(&|o| o.report.guess == o.record.shape.leaker), n),
        uniform_fallbacks: count(&|o| o.report.rule == GuessRule::UniformFallback),
        baseline: Proportion::new(count(&|o| o.baseline_guess == o.record.shape.leaker), n),
        baseline_blames_non_leaker_after_reset: Proportion::new(
            count(&|o| {
                o.record.diagnostics.resets > 0 && o.baseline_guess != o.record.shape.leaker
            }),
            reset_games,
        ),
    };
    (outcomes, aggregate)
}

fn sampled<S: ReactiveScheme + ?Sized>(
    scheme: &S,
    cell: &CellConfig,
    params: &DetectorParams,
) -> CliResult<(Vec<GameOutcome>, Aggregate)> {
    params.check_budget()?;
    let games = play(scheme, cell)?;
    let profiles = games
        .iter()
        .enumerate()
        .map(|(g, (x, record))| {
            let seed = stream_rng(cell.seed, "profile", g as u64).next_u64();
            estimate_profile(scheme, &record.transcript, x, params.samples, seed)
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(judge(cell, params, games, profiles))
}

fn exact<S: ReactiveScheme + StreamingDecoder>(
    scheme: &S,
    cell: &CellConfig,
    params: &DetectorParams,
) -> CliResult<(Vec<GameOutcome>, Aggregate)> {
    let games = play(scheme, cell)?;
    let mut targets: Vec<BitString> = games.iter().map(|(x, _)| x.clone()).collect();
    targets.sort();
    targets.dedup();
    let oracles: HashMap<BitString, ExactOracle<'_, S>> = targets
        .into_iter()
        .map(|x| {
            let oracle = ExactOracle::new(
                scheme,
                scheme.doc_bits(),
                scheme.key_bits(),
                cell.rounds,
                &x,
            )?;
            Ok((x, oracle))
        })
        .collect::<crate::Result<_>>()?;
    let profiles = games
        .iter()
        .map(|(x, record)| oracles[x].profile(&record.transcript))
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(judge(cell, params, games, profiles))
}

fn streaming<S: ReactiveScheme + StreamingDecoder>(
    inner: S,
    cell: &CellConfig,
    params: &DetectorParams,
) -> CliResult<(Vec<GameOutcome>, Aggregate)> {
    match (cell.profile, cell.normalize) {
        (ProfileMode::Sampled, false) => sampled(&inner, cell, params),
        (ProfileMode::Sampled, true) => sampled(&NormalizedScheme::new(inner), cell, params),
        (ProfileMode::Exact, false) => exact(&inner, cell, params),
        (ProfileMode::Exact, true) => exact(&NormalizedScheme::new(inner), cell, params),
    }
}

fn sampled_only<S: ReactiveScheme>(
    inner: S,
    cell: &CellConfig,
    params: &DetectorParams,
) -> CliResult<(Vec<GameOutcome>, Aggregate)> {
    if cell.profile == ProfileMode::Exact {
        return Err(CliError::Invalid(format!(
            "exact profiles are not available for {}",
            cell.scheme
        )));
    }
    if cell.normalize {
        sampled(&NormalizedScheme::new(inner), cell, params)
    } else {
        sampled(&inner, cell, params)
    }
}

type Runner<'a> = dyn Fn(&DetectorParams) -> CliResult<(Vec<GameOutcome>, Aggregate)> + 'a;

/// Plays `cell.games` games and judges each with both detectors.
pub fn tournament(cell: &CellConfig) -> CliResult<Tournament> {
    let mut warnings = Vec::new();
    let (key_bits, run): (usize, Box<Runner<'_>>) = match cell.scheme {
        SchemeKind::Null => {
            let s = NullScheme::new(cell.doc_bits, cell.msg_bits)?;
            (0, Box::new(move |p| streaming(s, cell, p)))
        }
        SchemeKind::ResetExample => {
            let s = ResetScheme::new(cell.doc_bits)?;
            (0, Box::new(move |p| streaming(s, cell, p)))
        }
        SchemeKind::Direct => {
            let s = DirectScheme::new(cell.doc_bits, cell.key_bits)?;
            (cell.key_bits, Box::new(move |p| sampled_only(s, cell, p)))
        }
        SchemeKind::WrappedStatic => {
            let sp =
                SchemeParams::new(cell.security, cell.doc_bits, cell.rounds, cell.he, cell.vc)?;
            let s = WrappedStatic::new(sp)?;
            warnings.push(format!(
                    "wrapped-static key is s = {} bits; exact enumeration and the sample formula are out of reach",
                    s.key_bits()
                ));
            (
                s.key_bits(),
                Box::new(move |p| sampled_only(s.clone(), cell, p)),
            )
        }
    };
    let mut params =
        DetectorParams::new(cell.rounds, key_bits, cell.epsilon)?.with_budget(cell.budget);
    if let Some(n) = cell.samples {
        params = params.with_samples(n);
        if params.overridden {
            warnings.push(format!(
                "sample count overridden to {n} (formula N = {}); the detector's accuracy guarantee does not apply",
                params.required_samples
            ));
        }
    }
    if let Some(w) = params.admissibility_warning(cell.msg_bits) {
        warnings.push(w);
    }
    if key_bits > 0 && (key_bits as f64) > 4.0 * (cell.security as f64).log2() {
        warnings.push(format!(
            "s = {key_bits} is outside the short-channel regime s = O(log λ)"
        ));
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    log::info!(
        "formulas: m0 = {}, p_min = {:e}, N = {} (using {}), seed = {}",
        params.m0,
        params.p_min,
        params.required_samples,
        params.samples,
        cell.seed
    );
    let (outcomes, aggregate) = run(&params)?;
    Ok(Tournament {
        params,
        warnings,
        outcomes,
        aggregate,
    })
}

#[derive(Serialize)]
struct DetectReport<'a> {
    schema_version: u32,
    command: &'static str,
    version: &'static str,
    config: &'a CellConfig,
    formulas: &'a DetectorParams,
    warnings: &'a [String],
    aggregate: &'a Aggregate,
}

pub fn run_detect(args: DetectArgs, out: &mut dyn Write) -> CliResult<i32> {
    let (doc_bits, msg_bits, key_bits) =
        resolve_cell(&args.scheme, args.rounds, args.msg_bits, args.key_bits)?;
    let cell = CellConfig {
        scheme: args.scheme.scheme,
        players: args.scheme.players,
        rounds: args.rounds,
        doc_bits,
        msg_bits,
        key_bits,
        epsilon: args.epsilon,
        games: args.games,
        profile: args.profile,
        samples: args.samples,
        budget: args.budget,
        seed: args.seed,
        normalize: args.scheme.normalize,
        message: parse_message(&args.scheme.message)?,
        security: args.scheme.security,
        he: args.scheme.he,
        vc: args.scheme.vc,
    };
    log::info!(
        "config: {}",
        serde_json::to_string(&cell).unwrap_or_default()
    );
    let t = with_jobs(args.jobs, || tournament(&cell))??;
    if let Some(path) = &args.games_out {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        for o in &t.outcomes {
            serde_json::to_writer(&mut file, o).map_err(|e| CliError::Failure(e.to_string()))?;
            writeln!(file)?;
        }
        file.flush()?;
    }
    write_json(
        out,
        &DetectReport {
            schema_version: SCHEMA_VERSION,
            command: "detect",
            version: env!("CARGO_PKG_VERSION"),
            config: &cell,
            formulas: &t.params,
            warnings: &t.warnings,
            aggregate: &t.aggregate,
        },
    )?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SweepRow {
    schema_version: u32,
    cell: usize,
    cell_seed: u64,
    scheme: String,
    players: usize,
    rounds: usize,
    key_bits: usize,
    epsilon: f64,
    msg_bits: usize,
    doc_bits: usize,
    games: u64,
    samples: u64,
    samples_overridden: bool,
    correctness: f64,
    guess_rate: f64,
    guess_ci_low: f64,
    guess_ci_high: f64,
    fallback_rate: f64,
    baseline_rate: f64,
}

pub fn run_sweep(args: SweepArgs, out: &mut dyn Write) -> CliResult<i32> {
    let message = parse_message(&args.scheme.message)?;
    let mut cells = Vec::new();
    for &rounds in &args.rounds {
        for &key_bits in &args.key_bits {
            for &epsilon in &args.epsilon {
                for &msg in &args.msg_bits {
                    let (doc_bits, msg_bits, key_bits) =
                        resolve_cell(&args.scheme, rounds, Some(msg), key_bits)?;
                    let index = cells.len();
                    cells.push(CellConfig {
                        scheme: args.scheme.scheme,
                        players: args.scheme.players,
                        rounds,
                        doc_bits,
                        msg_bits,
                        key_bits,
                        epsilon,
                        games: args.games,
                        profile: args.profile,
                        samples: args.samples,
                        budget: args.budget,
                        seed: stream_rng(args.seed, "cell", index as u64).gen(),
                        normalize: args.scheme.normalize,
                        message: message.clone(),
                        security: args.scheme.security,
                        he: args.scheme.he,
                        vc: args.scheme.vc,
                    });
                }
            }
        }
    }
    log::info!("sweep over {} cells, seed {}", cells.len(), args.seed);
    let results = with_jobs(args.jobs, || {
        cells.iter().map(tournament).collect::<CliResult<Vec<_>>>()
    })??;

    let mut buf: Vec<u8> = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for (i, (cell, t)) in cells.iter().zip(&results).enumerate() {
            let a = &t.aggregate;
            w.serialize(SweepRow {
                schema_version: SCHEMA_VERSION,
                cell: i,
                cell_seed: cell.seed,
                scheme: cell.scheme.to_string(),
                players: cell.players,
                rounds: cell.rounds,
                key_bits: cell.key_bits,
                epsilon: cell.epsilon,
                msg_bits: cell.msg_bits,
                doc_bits: cell.doc_bits,
                games: cell.games,
                samples: if cell.profile == ProfileMode::Exact {
                    0
                } else {
                    t.params.samples
                },
                samples_overridden: t.params.overridden,
                correctness: a.correctness.rate,
                guess_rate: a.detector.rate,
                guess_ci_low: a.detector.ci_low,
                guess_ci_high: a.detector.ci_high,
                fallback_rate: a.uniform_fallbacks as f64 / cell.games.max(1) as f64,
                baseline_rate: a.baseline.rate,
            })
            .map_err(|e| CliError::Failure(e.to_string()))?;
        }
        w.flush()?;
    }
    match &args.output {
        Some(path) => std::fs::write(path, &buf)?,
        None => out.write_all(&buf)?,
    }
    eprintln!("{}", trend_summary(&cells, &results));
    Ok(EXIT_OK)
}

/// Whether the guess rate is non-increasing in `s` within each group of
/// cells that differ only in `s`. Reported, not enforced.
fn trend_summary(cells: &[CellConfig], results: &[Tournament]) -> String {
    let mut groups: HashMap<(usize, u64, usize), Vec<(usize, f64)>> = HashMap::new();
    for (c, t) in cells.iter().zip(results) {
        groups
            .entry((c.rounds, c.epsilon.to_bits(), c.msg_bits))
            .or_default()
            .push((c.key_bits, t.aggregate.detector.rate));
    }
    let mut multi: Vec<_> = groups.into_values().filter(|g| g.len() > 1).collect();
    if multi.is_empty() {
        return "trend: single value of s per group, no trend to report".into();
    }
    let total = multi.len();
    let monotone = multi
        .iter_mut()
        .map(|g| {
            g.sort_by_key(|&(s, _)| s);
            g.windows(2).all(|w| w[1].1 <= w[0].1)
        })
        .filter(|&m| m)
        .count();
    format!("trend: guess rate non-increasing in s for {monotone}/{total} groups")
}
