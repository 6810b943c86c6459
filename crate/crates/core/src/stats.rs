// SPDX-License-Identifier: Apache-2.0

//! Small statistics helpers shared by the experiment runners and tests.

use serde::Serialize;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Proportion {
    pub fn new(successes: u64, trials: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z95);
        let rate = if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        };
        Proportion {
            successes,
            trials,
            rate,
            ci_low,
            ci_high,
        }
    }

    /// Standard error of the sample proportion.
    pub fn std_error(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        (self.rate * (1.0 - self.rate) / self.trials as f64).sqrt()
    }
}

/// Wilson score interval for `successes / trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Pearson chi-square statistic of observed counts against a uniform expectation.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let diff = c as f64 - expected;
            diff * diff / expected
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_value() {
        // 8/10 at 95%: reference interval (0.4902, 0.9433)
        let (lo, hi) = wilson_interval(8, 10, Z95);
        assert!((lo - 0.4902).abs() < 1e-4, "{lo}");
        assert!((hi - 0.9433).abs() < 1e-4, "{hi}");
    }

    #[test]
    fn wilson_extremes_stay_in_unit_interval() {
        let (lo, hi) = wilson_interval(0, 50, Z95);
        assert!(lo.abs() < 1e-12);
        assert!(hi > 0.0 && hi < 0.1);
        let (lo, hi) = wilson_interval(50, 50, Z95);
        assert!(lo > 0.9 && (hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_square_of_flat_counts_is_zero() {
        assert_eq!(chi_square_uniform(&[5, 5, 5, 5]), 0.0);
        assert!((chi_square_uniform(&[6, 4]) - 0.4).abs() < 1e-12);
    }
}
