// SPDX-License-Identifier: Apache-2.0

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{player_of_round, Diagnostics, GameShape, ReactiveScheme, StreamingDecoder};
use crate::bits::BitString;
use crate::error::{Error, Result};

/// The two-player reset protocol with a one-bit message and no anonymous
/// channel. The leaker claims the leader role with `0^ℓ`, then waits for the
/// other player's document to end in `x` and commits with `0^{ℓ-1}1`,
/// sending `0^ℓ` again (a reset) whenever she is not ready.
#[derive(Clone, Copy, Debug)]
pub struct ResetScheme {
    doc_bits: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResetPhase {
    Leading,
    Committed,
    /// The other player sent `0^ℓ` first.
    Failed,
}

#[derive(Clone, Debug)]
pub struct ResetState {
    x: bool,
    leaker: usize,
    phase: ResetPhase,
    turns: u32,
    resets: u32,
}

impl ResetState {
    pub fn phase(&self) -> ResetPhase {
        self.phase
    }
}

/// Decoder state after reading a prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResetSummary {
    Start,
    /// `t_1` was read and is non-zero.
    AfterT1 {
        t1_last: bool,
    },
    /// Neither of the first two documents is zero; the answer is the first
    /// bit of `t_3`.
    AwaitThird,
    /// `leader` has sent only zeros so far; `other_last` is the last bit of
    /// the other player's latest document.
    Leader {
        leader: u8,
        other_last: Option<bool>,
    },
    Done(bool),
}

impl ResetScheme {
    pub fn new(doc_bits: usize) -> Result<Self> {
        if doc_bits == 0 || doc_bits > 64 {
            return Err(Error::config(format!(
                "reset example supports 1 ≤ ℓ ≤ 64, got {doc_bits}"
            )));
        }
        Ok(ResetScheme { doc_bits })
    }

    fn commit_doc(&self) -> BitString {
        let mut doc = BitString::zeros(self.doc_bits);
        doc.set(self.doc_bits - 1, true);
        doc
    }

    /// Whether a leader document of value `v` keeps (rather than flips) the
    /// last bit of the preceding document: `v < 9/10 · 2^ℓ`.
    pub fn keeps_bit(&self, v: u64) -> bool {
        (v as u128) * 10 < 9u128 << self.doc_bits
    }

    /// Reference decoder operating directly on a complete transcript.
    pub fn raw_decode(&self, t: &[BitString]) -> bool {
        if t.len() < 3 {
            return false;
        }
        if !t[0].is_zero() && !t[1].is_zero() {
            return t[2].get(0);
        }
        let leader = if t[0].is_zero() { 1 } else { 2 };
        for k in 1..=t.len() {
            if player_of_round(k, 2) == leader && !t[k - 1].is_zero() {
                let b = t[k - 2].last().unwrap_or(false);
                return if self.keeps_bit(t[k - 1].to_u64()) {
                    b
                } else {
                    !b
                };
            }
        }
        let other_last = (1..=t.len())
            .rev()
            .find(|&k| player_of_round(k, 2) != leader)
            .map(|k| t[k - 1].last().unwrap_or(false));
        other_last.unwrap_or(false)
    }
}

impl ReactiveScheme for ResetScheme {
    type State = ResetState;

    fn name(&self) -> &'static str {
        "reset-example"
    }

    fn doc_bits(&self) -> usize {
        self.doc_bits
    }

    fn msg_bits(&self) -> usize {
        1
    }

    fn key_bits(&self) -> usize {
        0
    }

    fn validate(&self, shape: &GameShape) -> Result<()> {
        if shape.players != 2 {
            return Err(Error::config("reset example is a two-player protocol"));
        }
        if shape.rounds < 3 {
            return Err(Error::config("reset example needs d ≥ 3"));
        }
        Ok(())
    }

    fn init(&self, x: &BitString, shape: &GameShape, _rng: &mut dyn RngCore) -> Result<ResetState> {
        self.validate(shape)?;
        Ok(ResetState {
            x: x.get(0),
            leaker: shape.leaker,
            phase: ResetPhase::Leading,
            turns: 0,
            resets: 0,
        })
    }

    fn encode(
        &self,
        prefix: &[BitString],
        state: &mut ResetState,
        rng: &mut dyn RngCore,
    ) -> BitString {
        state.turns += 1;
        let first = state.turns == 1;
        if first && state.leaker == 2 && prefix[0].is_zero() {
            state.phase = ResetPhase::Failed;
        }
        match state.phase {
            ResetPhase::Failed => BitString::random(self.doc_bits, rng),
            ResetPhase::Committed => self.commit_doc(),
            ResetPhase::Leading if first => BitString::zeros(self.doc_bits),
            ResetPhase::Leading => {
                let other = 3 - state.leaker;
                let history = prefix
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| player_of_round(k + 1, 2) == other)
                    .map(|(_, doc)| doc.last() == Some(state.x));
                let (good, bad) =
                    history.fold(
                        (0u32, 0u32),
                        |(g, b), hit| {
                            if hit {
                                (g + 1, b)
                            } else {
                                (g, b + 1)
                            }
                        },
                    );
                let ready = prefix.last().and_then(BitString::last) == Some(state.x);
                if ready && good > bad {
                    state.phase = ResetPhase::Committed;
                    self.commit_doc()
                } else {
                    state.resets += 1;
                    BitString::zeros(self.doc_bits)
                }
            }
        }
    }

    fn extract_key(
        &self,
        _t: &[BitString],
        _state: &ResetState,
        _rng: &mut dyn RngCore,
    ) -> Result<BitString> {
        Ok(BitString::zeros(0))
    }

    fn decode(&self, dk: &BitString, t: &[BitString]) -> BitString {
        let summary = t
            .iter()
            .enumerate()
            .fold(self.start(), |acc, (k, doc)| self.absorb(&acc, k + 1, doc));
        self.finish(&summary, dk)
    }

    fn diagnostics(&self, state: &ResetState) -> Diagnostics {
        Diagnostics {
            resets: state.resets,
            leader_failed: state.phase == ResetPhase::Failed,
            committed: state.phase == ResetPhase::Committed,
        }
    }
}

impl StreamingDecoder for ResetScheme {
    type Summary = ResetSummary;

    fn start(&self) -> ResetSummary {
        ResetSummary::Start
    }

    fn absorb(&self, summary: &ResetSummary, round: usize, doc: &BitString) -> ResetSummary {
        match *summary {
            ResetSummary::Start => {
                if doc.is_zero() {
                    ResetSummary::Leader {
                        leader: 1,
                        other_last: None,
                    }
                } else {
                    ResetSummary::AfterT1 {
                        t1_last: doc.last().unwrap_or(false),
                    }
                }
            }
            ResetSummary::AfterT1 { t1_last } => {
                if doc.is_zero() {
                    ResetSummary::Leader {
                        leader: 2,
                        other_last: Some(t1_last),
                    }
                } else {
                    ResetSummary::AwaitThird
                }
            }
            ResetSummary::AwaitThird => ResetSummary::Done(doc.get(0)),
            ResetSummary::Leader { leader, other_last } => {
                if player_of_round(round, 2) == leader as usize {
                    if doc.is_zero() {
                        *summary
                    } else {
                        let b = other_last.unwrap_or(false);
                        ResetSummary::Done(if self.keeps_bit(doc.to_u64()) { b } else { !b })
                    }
                } else {
                    ResetSummary::Leader {
                        leader,
                        other_last: doc.last(),
                    }
                }
            }
            ResetSummary::Done(_) => *summary,
        }
    }

    fn finish(&self, summary: &ResetSummary, _dk: &BitString) -> BitString {
        let bit = match *summary {
            ResetSummary::Done(b) => b,
            ResetSummary::Leader { other_last, .. } => other_last.unwrap_or(false),
            _ => false,
        };
        BitString::new(vec![bit])
    }
}
