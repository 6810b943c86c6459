// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, RngCore};

use super::profile::ProbabilityProfile;
use crate::reactive::player_of_round;

/// Absolute tolerance under which two additive scores count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// `Σ_{k ≡ j} (p̂_k − p̂_{k−1})` for each player `j`.
pub fn additive_scores(profile: &ProbabilityProfile, players: usize) -> Vec<f64> {
    let mut scores = vec![0.0; players];
    for k in 1..=profile.rounds() {
        scores[player_of_round(k, players) - 1] += profile.get(k) - profile.get(k - 1);
    }
    scores
}

/// Guesses the player with the largest additive score, ties broken uniformly.
pub fn additive_baseline(
    profile: &ProbabilityProfile,
    players: usize,
    rng: &mut dyn RngCore,
) -> usize {
    let scores = additive_scores(profile, players);
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let top: Vec<usize> = (1..=players)
        .filter(|&j| best - scores[j - 1] <= TIE_TOLERANCE)
        .collect();
    top[rng.gen_range(0..top.len())]
}
