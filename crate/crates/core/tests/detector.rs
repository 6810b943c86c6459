// SPDX-License-Identifier: Apache-2.0

use anonsteg::detector::{
    cutoff, detect, detect_with_profile, estimate_profile, multiplicative_factors, DetectorParams,
    ExactOracle, GuessRule, NormalizedScheme, ProbabilityProfile,
};
use anonsteg::reactive::{
    run_game, DirectScheme, NullScheme, ReactiveScheme, ResetScheme, MAGIC_BITS,
};
use anonsteg::rng::stream_rng;
use anonsteg::stats::wilson_interval;
use anonsteg::{BitString, Error};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[test]
fn sampled_profile_agrees_with_exact_oracle() {
    let s = ResetScheme::new(4).unwrap();
    let x = BitString::new(vec![true]);
    let rounds = 8;
    let oracle = ExactOracle::new(&s, 4, 0, rounds, &x).unwrap();
    let samples = 4000;
    let mut misses = 0;
    for g in 0..6 {
        let r = run_game(&s, 2, rounds, &x, &mut stream_rng(1, "game", g)).unwrap();
        let exact = oracle.profile(&r.transcript).unwrap();
        let sampled = estimate_profile(&s, &r.transcript, &x, samples, g).unwrap();
        for k in 0..=rounds {
            let (lo, hi) = wilson_interval(sampled.successes[k], samples, 3.29);
            misses += u32::from(!(lo..=hi).contains(&exact.get(k)));
        }
    }
    // 99.9% intervals over 54 prefixes.
    assert!(
        misses <= 1,
        "{misses} exact values outside the sampled intervals"
    );
}

#[test]
fn profile_is_independent_of_thread_count() {
    let s = ResetScheme::new(6).unwrap();
    let x = BitString::new(vec![false]);
    let r = run_game(&s, 2, 10, &x, &mut ChaCha20Rng::seed_from_u64(4)).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_profile(&s, &r.transcript, &x, 500, 9).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn exact_profile_endpoints() {
    let s = NullScheme::new(3, 2).unwrap();
    let x = BitString::parse("01").unwrap();
    let oracle = ExactOracle::new(&s, 3, 0, 4, &x).unwrap();
    let t: Vec<BitString> = ["010", "000", "110", "101"]
        .iter()
        .map(|d| BitString::parse(d).unwrap())
        .collect();
    let p = oracle.profile(&t).unwrap();
    // Uniform continuations give a uniform XOR fold.
    assert!((p.get(0) - 0.25).abs() < 1e-12);
    assert!((p.get(3) - 0.25).abs() < 1e-12);
    // XOR of the first two bits: 01 ^ 00 ^ 11 ^ 10 = 00.
    assert_eq!(p.get(4), 0.0);
    assert!(ExactOracle::new(&s, 17, 0, 4, &x).is_err());
}

#[test]
fn normalized_scheme_stays_correct_and_exact() {
    let s = NormalizedScheme::new(ResetScheme::new(4).unwrap());
    assert_eq!(s.doc_bits(), 5);
    assert_eq!(s.msg_bits(), 1);
    let x = BitString::new(vec![true]);
    let oracle = ExactOracle::new(&s, s.doc_bits(), 0, 6, &x).unwrap();
    for g in 0..20 {
        let r = run_game(&s, 2, 6, &x, &mut stream_rng(2, "game", g)).unwrap();
        let p = oracle.profile(&r.transcript).unwrap();
        // Before any document the pad makes every message equally likely.
        assert!((p.get(0) - 0.5).abs() < 1e-12);
        assert_eq!(p.get(6), if r.correct { 1.0 } else { 0.0 });
    }
}

#[test]
fn direct_scheme_is_caught_with_override() {
    let s = DirectScheme::new(MAGIC_BITS + 16, 0).unwrap();
    let params = DetectorParams::new(4, 0, 0.5).unwrap().with_samples(300);
    let mut caught = 0;
    for g in 0..30 {
        let mut rng = stream_rng(5, "game", g);
        let x = BitString::random(16, &mut rng);
        let r = run_game(&s, 2, 4, &x, &mut rng).unwrap();
        let report = detect(&s, &r.transcript, &x, 2, &params, g, &mut rng).unwrap();
        caught += u32::from(report.guess == r.shape.leaker);
    }
    assert!(caught >= 28, "caught {caught}/30");
}

#[test]
fn detect_refuses_over_budget() {
    let s = DirectScheme::new(MAGIC_BITS + 16, 0).unwrap();
    let params = DetectorParams::new(6, 0, 0.5).unwrap();
    let x = BitString::zeros(16);
    let t = vec![BitString::zeros(MAGIC_BITS + 16); 6];
    let err = detect(
        &s,
        &t,
        &x,
        2,
        &params,
        0,
        &mut ChaCha20Rng::seed_from_u64(0),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Budget { .. }), "{err}");
    assert!(err.to_string().contains("d ≤"));
}

#[test]
fn flat_profile_falls_back_to_uniform_guess() {
    let params = DetectorParams::new(6, 0, 0.5).unwrap();
    let profile = ProbabilityProfile::from_estimates(vec![0.5; 7]);
    let mut counts = [0u32; 3];
    for seed in 0..300 {
        let report = detect_with_profile(
            profile.clone(),
            3,
            &params,
            &mut ChaCha20Rng::seed_from_u64(seed),
        );
        assert_eq!(report.rule, GuessRule::UniformFallback);
        counts[report.guess - 1] += 1;
    }
    assert!(counts.iter().all(|&c| c > 70), "{counts:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn factors_multiply_to_profile_ratio(estimates in proptest::collection::vec(0.05f64..1.0, 2..12), players in 2usize..=4) {
        let d = estimates.len() - 1;
        let params = DetectorParams::new(d, 0, 0.5).unwrap();
        let profile = ProbabilityProfile::from_estimates(estimates.clone());
        let mf = multiplicative_factors(&profile, players, &params);
        prop_assume!(!mf.degenerate);
        let k0 = cutoff(&profile, params.p_min).unwrap_or(0);
        let product: f64 = mf.factors.iter().product();
        let base = if k0 == 0 { estimates[0] } else { params.p_min / (1.0 - 1.0 / (2.0 * d as f64)) };
        let ratio = estimates[d] / base;
        prop_assert!((product - ratio).abs() <= 1e-9 * ratio.max(1.0), "{} vs {}", product, ratio);
    }
}
