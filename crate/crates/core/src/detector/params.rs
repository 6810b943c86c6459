// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on samples per prefix estimate.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    /// Rounds `d`.
    pub rounds: usize,
    /// Anonymous-channel length `s`.
    pub key_bits: usize,
    /// Slack `ε`.
    pub epsilon: f64,
    /// Suspicion threshold `m₀ = 8d/ε`.
    pub m0: f64,
    /// Estimate floor `p_min = ε² / (2^{s+7} d²)`.
    pub p_min: f64,
    /// `N = 3 · 2^{s+9} d⁴ / ε² · ln(4d/ε)`, rounded up, saturating.
    pub required_samples: u64,
    /// Samples actually drawn per prefix.
    pub samples: u64,
    /// Set when `samples` was chosen by hand instead of by the formula.
    pub overridden: bool,
    pub budget: u64,
}

fn formula_samples(rounds: usize, key_bits: usize, epsilon: f64) -> f64 {
    let d = rounds as f64;
    3.0 * 2f64.powi(key_bits as i32 + 9) * d.powi(4) / (epsilon * epsilon)
        * (4.0 * d / epsilon).ln()
}

fn saturate(n: f64) -> u64 {
    if n >= u64::MAX as f64 {
        u64::MAX
    } else {
        n.ceil() as u64
    }
}

impl DetectorParams {
    pub fn new(rounds: usize, key_bits: usize, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::config(format!("ε must be positive, got {epsilon}")));
        }
        if rounds == 0 {
            return Err(Error::config("detector needs d ≥ 1"));
        }
        let d = rounds as f64;
        let required = saturate(formula_samples(rounds, key_bits, epsilon));
        Ok(DetectorParams {
            rounds,
            key_bits,
            epsilon,
            m0: 8.0 * d / epsilon,
            p_min: epsilon * epsilon / (2f64.powi(key_bits as i32 + 7) * d * d),
            required_samples: required,
            samples: required,
            overridden: false,
            budget: DEFAULT_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Draws `samples` per prefix instead of the formula's `N`. The detector's
    /// accuracy guarantee no longer applies.
    pub fn with_samples(mut self, samples: u64) -> Self {
        self.samples = samples;
        self.overridden = samples != self.required_samples;
        self
    }

    /// Refuses runs whose sample count exceeds the budget.
    pub fn check_budget(&self) -> Result<()> {
        if self.samples <= self.budget {
            return Ok(());
        }
        Err(Error::Budget {
            required: self.samples,
            budget: self.budget,
            suggestion: self.suggestion(),
        })
    }

    fn suggestion(&self) -> String {
        let fits =
            |d: usize, eps: f64| formula_samples(d, self.key_bits, eps) <= self.budget as f64;
        let max_d = (1..=self.rounds).rev().find(|&d| fits(d, self.epsilon));
        let (mut lo, mut hi) = (self.epsilon, self.epsilon.max(1.0));
        while !fits(self.rounds, hi) && hi < 1e6 {
            hi *= 2.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if fits(self.rounds, mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let by_d = match max_d {
            Some(d) => format!("use d ≤ {d} at ε = {}", self.epsilon),
            None => format!("no d fits at ε = {}", self.epsilon),
        };
        format!(
            "{by_d}, or ε ≥ {hi:.4} at d = {}, or pass an explicit sample override",
            self.rounds
        )
    }

    /// Warning text when `ℓ′ < s + 7 + 2 log₂ d − 2 log₂ ε`, the message
    /// length below which the detector's guarantee is not claimed.
    pub fn admissibility_warning(&self, msg_bits: usize) -> Option<String> {
        let bound = self.key_bits as f64 + 7.0 + 2.0 * (self.rounds as f64).log2()
            - 2.0 * self.epsilon.log2();
        if (msg_bits as f64) < bound {
            Some(format!(
                "ℓ′ = {msg_bits} is below s + 7 + 2·log₂d − 2·log₂ε = {bound:.3}; detection guarantee does not apply"
            ))
        } else {
            None
        }
    }
}
