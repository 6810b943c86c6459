// SPDX-License-Identifier: Apache-2.0

//! Leaker identification for reactive schemes.
//!
//! For a transcript `t` and a target message `x`, the detector estimates the
//! continuation probabilities `p_k`, multiplies each player's ratios
//! `p_k / p_{k−1}` into a factor `mf_j`, and blames the unique player whose
//! factor exceeds `m₀`. For non-leakers the factor is a non-negative
//! martingale, so a large value singles out the leaker whenever the
//! anonymous key is too short to hide her influence on `p_k`.

mod baseline;
mod factors;
mod guess;
mod normalize;
mod params;
mod profile;

pub use baseline::{additive_baseline, additive_scores, TIE_TOLERANCE};
pub use factors::{
    bad_estimate, bad_event, cutoff, mf_interval, multiplicative_factors, MultiplicativeFactors,
};
pub use guess::{guess_leaker, DetectorReport, GuessRule};
pub use normalize::{NormalizedScheme, NormalizedState};
pub use params::{DetectorParams, DEFAULT_BUDGET};
pub use profile::{
    estimate_profile, ExactOracle, ProbabilityProfile, MAX_EXACT_DOC_BITS, MAX_EXACT_KEY_BITS,
};

use rand::RngCore;

use crate::bits::BitString;
use crate::error::Result;
use crate::reactive::ReactiveScheme;

/// Factors and guess for an already computed profile.
pub fn detect_with_profile(
    profile: ProbabilityProfile,
    players: usize,
    params: &DetectorParams,
    rng: &mut dyn RngCore,
) -> DetectorReport {
    let mf = multiplicative_factors(&profile, players, params);
    guess_leaker(mf, profile, params, rng)
}

/// The full sampled detector. Refuses to run when `params.samples` exceeds
/// the budget.
pub fn detect<S: ReactiveScheme + ?Sized>(
    scheme: &S,
    t: &[BitString],
    x: &BitString,
    players: usize,
    params: &DetectorParams,
    seed: u64,
    rng: &mut dyn RngCore,
) -> Result<DetectorReport> {
    params.check_budget()?;
    let profile = estimate_profile(scheme, t, x, params.samples, seed)?;
    Ok(detect_with_profile(profile, players, params, rng))
}
