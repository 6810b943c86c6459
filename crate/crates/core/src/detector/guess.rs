// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::factors::MultiplicativeFactors;
use super::params::DetectorParams;
use super::profile::ProbabilityProfile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuessRule {
    /// Exactly one factor exceeded `m₀`.
    UniqueExceedance,
    /// Zero or several factors exceeded `m₀`; the guess is uniform.
    UniformFallback,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorReport {
    /// Guessed leaker in `1..=n`.
    pub guess: usize,
    pub rule: GuessRule,
    pub m0: f64,
    pub factors: MultiplicativeFactors,
    pub profile: ProbabilityProfile,
}

/// Guesses the unique player whose factor exceeds `m₀`, or a uniform player.
pub fn guess_leaker(
    mf: MultiplicativeFactors,
    profile: ProbabilityProfile,
    params: &DetectorParams,
    rng: &mut dyn RngCore,
) -> DetectorReport {
    let players = mf.factors.len();
    let above: Vec<usize> = (1..=players).filter(|&j| mf.get(j) > params.m0).collect();
    let (guess, rule) = match above.as_slice() {
        [only] => (*only, GuessRule::UniqueExceedance),
        _ => (rng.gen_range(1..=players), GuessRule::UniformFallback),
    };
    DetectorReport {
        guess,
        rule,
        m0: params.m0,
        factors: mf,
        profile,
    }
}
