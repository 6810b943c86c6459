// SPDX-License-Identifier: Apache-2.0

//! Reactive schemes: `n` players post one document per round for `d` rounds,
//! player `j` owning rounds `j, j+n, j+2n, …`. Non-leakers post uniform
//! documents. The leaker's documents come from a stateful encoder that sees
//! the transcript so far; at the end she sends an `s`-bit key over the
//! anonymous channel and anyone can decode the transcript with it.

mod direct;
mod null;
mod reset;
mod wrapped;

pub use direct::{DirectScheme, DirectState, MAGIC, MAGIC_BITS};
pub use null::NullScheme;
pub use reset::{ResetPhase, ResetScheme, ResetState, ResetSummary};
pub use wrapped::{WrappedState, WrappedStatic};

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Player posting round `k` (both 1-based).
pub fn player_of_round(k: usize, players: usize) -> usize {
    (k - 1) % players + 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameShape {
    pub players: usize,
    pub rounds: usize,
    pub leaker: usize,
}

impl GameShape {
    pub fn leaker_rounds(&self) -> impl Iterator<Item = usize> + '_ {
        (self.leaker..=self.rounds).step_by(self.players)
    }
}

/// Per-game events a scheme reports for experiments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Leaker turns that deliberately reset the decoder's pending outcome.
    pub resets: u32,
    /// The leaker could not take the role her strategy needs and fell back
    /// to uniform documents.
    pub leader_failed: bool,
    pub committed: bool,
}

pub trait ReactiveScheme: Send + Sync {
    type State: Send;

    fn name(&self) -> &'static str;
    /// Document length ℓ.
    fn doc_bits(&self) -> usize;
    /// Message length ℓ′.
    fn msg_bits(&self) -> usize;
    /// Anonymous-channel key length s.
    fn key_bits(&self) -> usize;

    /// Rejects game shapes the scheme is not defined for.
    fn validate(&self, _shape: &GameShape) -> Result<()> {
        Ok(())
    }

    fn init(&self, x: &BitString, shape: &GameShape, rng: &mut dyn RngCore) -> Result<Self::State>;

    /// The leaker's document for round `prefix.len() + 1`.
    fn encode(
        &self,
        prefix: &[BitString],
        state: &mut Self::State,
        rng: &mut dyn RngCore,
    ) -> BitString;

    fn extract_key(
        &self,
        t: &[BitString],
        state: &Self::State,
        rng: &mut dyn RngCore,
    ) -> Result<BitString>;

    /// Deterministic decoder. Must accept any `s`-bit key and any transcript
    /// of ℓ-bit documents.
    fn decode(&self, dk: &BitString, t: &[BitString]) -> BitString;

    fn diagnostics(&self, _state: &Self::State) -> Diagnostics {
        Diagnostics::default()
    }
}

/// A decoder that reads the transcript left to right through a small
/// summary, which lets exact continuation probabilities be computed by
/// dynamic programming over summaries instead of transcripts.
pub trait StreamingDecoder: Sync {
    type Summary: Clone + Eq + Hash + Send + Sync;

    fn start(&self) -> Self::Summary;
    fn absorb(&self, summary: &Self::Summary, round: usize, doc: &BitString) -> Self::Summary;
    fn finish(&self, summary: &Self::Summary, dk: &BitString) -> BitString;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRecord {
    pub scheme: String,
    pub shape: GameShape,
    pub x: BitString,
    pub transcript: Vec<BitString>,
    pub dk: BitString,
    pub decoded: BitString,
    pub correct: bool,
    pub diagnostics: Diagnostics,
}

/// Plays one game with a uniformly chosen leaker.
pub fn run_game<S: ReactiveScheme + ?Sized>(
    scheme: &S,
    players: usize,
    rounds: usize,
    x: &BitString,
    rng: &mut dyn RngCore,
) -> Result<GameRecord> {
    if players < 2 {
        return Err(Error::config("a game needs at least two players"));
    }
    let leaker = rng.gen_range(1..=players);
    run_game_with_leaker(
        scheme,
        GameShape {
            players,
            rounds,
            leaker,
        },
        x,
        rng,
    )
}

pub fn run_game_with_leaker<S: ReactiveScheme + ?Sized>(
    scheme: &S,
    shape: GameShape,
    x: &BitString,
    rng: &mut dyn RngCore,
) -> Result<GameRecord> {
    if shape.players < 2 || shape.rounds == 0 {
        return Err(Error::config("a game needs n ≥ 2 players and d ≥ 1 rounds"));
    }
    if shape.leaker == 0 || shape.leaker > shape.players {
        return Err(Error::IndexOutOfRange {
            index: shape.leaker,
            low: 1,
            high: shape.players,
        });
    }
    if x.len() != scheme.msg_bits() {
        return Err(Error::LengthMismatch {
            expected: scheme.msg_bits(),
            got: x.len(),
        });
    }
    scheme.validate(&shape)?;
    let mut state = scheme.init(x, &shape, rng)?;
    let mut transcript: Vec<BitString> = Vec::with_capacity(shape.rounds);
    for k in 1..=shape.rounds {
        let doc = if player_of_round(k, shape.players) == shape.leaker {
            scheme.encode(&transcript, &mut state, rng)
        } else {
            BitString::random(scheme.doc_bits(), rng)
        };
        if doc.len() != scheme.doc_bits() {
            return Err(Error::Domain(format!(
                "{} emitted a {}-bit document in round {k}, expected {}",
                scheme.name(),
                doc.len(),
                scheme.doc_bits()
            )));
        }
        transcript.push(doc);
    }
    let dk = scheme.extract_key(&transcript, &state, rng)?;
    if dk.len() != scheme.key_bits() {
        return Err(Error::LengthMismatch {
            expected: scheme.key_bits(),
            got: dk.len(),
        });
    }
    let decoded = scheme.decode(&dk, &transcript);
    Ok(GameRecord {
        scheme: scheme.name().to_string(),
        shape,
        correct: &decoded == x,
        x: x.clone(),
        transcript,
        dk,
        decoded,
        diagnostics: scheme.diagnostics(&state),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Null,
    Direct,
    ResetExample,
    WrappedStatic,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Null => "null",
            SchemeKind::Direct => "direct",
            SchemeKind::ResetExample => "reset-example",
            SchemeKind::WrappedStatic => "wrapped-static",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "null" => Ok(SchemeKind::Null),
            "direct" => Ok(SchemeKind::Direct),
            "reset-example" => Ok(SchemeKind::ResetExample),
            "wrapped-static" => Ok(SchemeKind::WrappedStatic),
            other => Err(Error::config(format!("unknown reactive scheme {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_ownership() {
        let owners: Vec<usize> = (1..=7).map(|k| player_of_round(k, 3)).collect();
        assert_eq!(owners, vec![1, 2, 3, 1, 2, 3, 1]);
        let shape = GameShape {
            players: 3,
            rounds: 8,
            leaker: 2,
        };
        assert_eq!(shape.leaker_rounds().collect::<Vec<_>>(), vec![2, 5, 8]);
    }

    #[test]
    fn scheme_names_parse() {
        for kind in [
            SchemeKind::Null,
            SchemeKind::Direct,
            SchemeKind::ResetExample,
            SchemeKind::WrappedStatic,
        ] {
            assert_eq!(kind.to_string().parse::<SchemeKind>().unwrap(), kind);
        }
    }
}
