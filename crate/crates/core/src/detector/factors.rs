// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::params::DetectorParams;
use super::profile::ProbabilityProfile;
use crate::reactive::player_of_round;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicativeFactors {
    /// `mf_j` for players `j = 1..=n`, at index `j - 1`.
    pub factors: Vec<f64>,
    /// Smallest `k` with `p̂_{k'} ≥ p_min` for every `k' ≥ k`; `None` if
    /// `p̂_d` itself is below the floor, in which case every factor is 1.
    pub k0: Option<usize>,
    /// Player charged with the floor correction at `k₀`.
    pub corrected_player: Option<usize>,
    /// A ratio past `k₀` had a zero denominator and its player saturated.
    pub degenerate: bool,
}

impl MultiplicativeFactors {
    pub fn get(&self, player: usize) -> f64 {
        self.factors[player - 1]
    }

    /// The largest factor among players other than `player`.
    pub fn max_excluding(&self, player: usize) -> f64 {
        self.factors
            .iter()
            .enumerate()
            .filter(|(j, _)| j + 1 != player)
            .map(|(_, &f)| f)
            .fold(0.0, f64::max)
    }
}

pub fn cutoff(profile: &ProbabilityProfile, p_min: f64) -> Option<usize> {
    let d = profile.rounds();
    let mut k0 = None;
    for k in (0..=d).rev() {
        if profile.get(k) >= p_min {
            k0 = Some(k);
        } else {
            break;
        }
    }
    k0
}

/// `p̂_k / p̂_{k−1}`, with a zero denominator mapped to `+∞` (or 1 when the
/// numerator is also zero).
fn ratio(num: f64, den: f64) -> (f64, bool) {
    if den > 0.0 {
        (num / den, false)
    } else if num > 0.0 {
        (f64::INFINITY, true)
    } else {
        (1.0, true)
    }
}

/// `∏_{k ∈ [k_start+1, k_end], k ≡ player (mod n)} p̂_k / p̂_{k−1}`.
pub fn mf_interval(
    estimates: &[f64],
    players: usize,
    player: usize,
    k_start: usize,
    k_end: usize,
) -> f64 {
    (k_start + 1..=k_end)
        .filter(|&k| player_of_round(k, players) == player)
        .map(|k| ratio(estimates[k], estimates[k - 1]).0)
        .product()
}

/// Multiplicative factors over `[k₀+1, d]`. The player who sent document
/// `k₀` additionally gets `p̂_{k₀} / ((1 − 1/(2d))^{-1} · p_min)`, the ratio
/// that results from pretending `p̂_{k₀−1}` sat just above the floor.
pub fn multiplicative_factors(
    profile: &ProbabilityProfile,
    players: usize,
    params: &DetectorParams,
) -> MultiplicativeFactors {
    let d = profile.rounds();
    let Some(k0) = cutoff(profile, params.p_min) else {
        return MultiplicativeFactors {
            factors: vec![1.0; players],
            k0: None,
            corrected_player: None,
            degenerate: false,
        };
    };
    let mut factors = vec![1.0f64; players];
    let mut degenerate = false;
    for k in k0 + 1..=d {
        let (r, zero) = ratio(profile.get(k), profile.get(k - 1));
        degenerate |= zero;
        factors[player_of_round(k, players) - 1] *= r;
    }
    let corrected_player = (k0 >= 1).then(|| player_of_round(k0, players));
    if let Some(j) = corrected_player {
        let floor = params.p_min / (1.0 - 1.0 / (2.0 * d as f64));
        let (r, zero) = ratio(profile.get(k0), floor);
        degenerate |= zero;
        factors[j - 1] *= r;
    }
    MultiplicativeFactors {
        factors,
        k0: Some(k0),
        corrected_player,
        degenerate,
    }
}

/// Whether `estimate` is a bad estimate of `truth`: `truth` is above the
/// floor but `estimate` falls outside `(1 ± 1/(2d)) · truth`.
pub fn bad_estimate(truth: f64, estimate: f64, params: &DetectorParams) -> bool {
    let band = 1.0 / (2.0 * params.rounds as f64);
    truth >= params.p_min && ((estimate - truth).abs() > band * truth)
}

/// The bad event `E` for one game: some estimate is bad, or some non-leaker's
/// true factor over `[k₀, d]` reaches `m₀/2`.
pub fn bad_event(
    truth: &ProbabilityProfile,
    estimate: &ProbabilityProfile,
    players: usize,
    leaker: usize,
    params: &DetectorParams,
) -> bool {
    let bad_est = truth
        .estimates
        .iter()
        .zip(&estimate.estimates)
        .any(|(&p, &q)| bad_estimate(p, q, params));
    let k0 = cutoff(truth, params.p_min);
    let large = match k0 {
        Some(k0) => (1..=players).filter(|&j| j != leaker).any(|j| {
            mf_interval(&truth.estimates, players, j, k0, truth.rounds()) >= params.m0 / 2.0
        }),
        None => false,
    };
    bad_est || large
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: usize) -> DetectorParams {
        DetectorParams::new(d, 0, 0.5).unwrap()
    }

    #[test]
    fn constant_profile_has_unit_factors() {
        let p = ProbabilityProfile::from_estimates(vec![0.3; 7]);
        let mf = multiplicative_factors(&p, 3, &params(6));
        assert_eq!(mf.k0, Some(0));
        assert_eq!(mf.factors, vec![1.0; 3]);
    }

    #[test]
    fn doublings_charged_to_their_player() {
        let p = ProbabilityProfile::from_estimates(vec![0.05, 0.05, 0.1, 0.1, 0.2]);
        let mf = multiplicative_factors(&p, 2, &params(4));
        assert_eq!(mf.factors, vec![1.0, 4.0]);
    }

    #[test]
    fn cutoff_correction_goes_to_sender_of_k0() {
        let pr = params(4);
        let p = ProbabilityProfile::from_estimates(vec![0.0, 0.0, 0.5, 0.5, 1.0]);
        let mf = multiplicative_factors(&p, 2, &pr);
        assert_eq!(mf.k0, Some(2));
        assert_eq!(mf.corrected_player, Some(2));
        let expected = 0.5 / (pr.p_min / (1.0 - 1.0 / 8.0)) * 2.0;
        assert!((mf.get(2) - expected).abs() < 1e-9 * expected);
        assert_eq!(mf.get(1), 1.0);
    }

    #[test]
    fn final_estimate_below_floor_disables_detection() {
        let p = ProbabilityProfile::from_estimates(vec![0.5, 0.5, 0.0]);
        let mf = multiplicative_factors(&p, 2, &params(2));
        assert_eq!(mf.k0, None);
        assert_eq!(mf.factors, vec![1.0, 1.0]);
    }

    #[test]
    fn zero_denominator_saturates() {
        let mut pr = params(2);
        pr.p_min = 0.0;
        let p = ProbabilityProfile::from_estimates(vec![0.5, 0.0, 1.0]);
        let mf = multiplicative_factors(&p, 2, &pr);
        assert!(mf.degenerate);
        assert_eq!(mf.get(2), f64::INFINITY);
    }

    #[test]
    fn bad_estimates_use_relative_band() {
        let pr = params(5);
        assert!(!bad_estimate(0.5, 0.54, &pr));
        assert!(bad_estimate(0.5, 0.56, &pr));
        assert!(!bad_estimate(0.0, 0.3, &pr));
    }
}
