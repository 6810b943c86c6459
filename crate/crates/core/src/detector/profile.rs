// SPDX-License-Identifier: Apache-2.0

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::reactive::{ReactiveScheme, StreamingDecoder};
use crate::rng::stream_rng;

/// Continuation probabilities `p_k = Pr[Dec_{dk′}(T′) = x | T′^k = t^k]` for
/// `k = 0..=d`, with `T′` completed uniformly and `dk′` uniform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityProfile {
    pub estimates: Vec<f64>,
    /// Successful samples per prefix; empty for exact profiles.
    pub successes: Vec<u64>,
    /// Samples per prefix; zero for exact profiles.
    pub samples: u64,
    pub exact: bool,
}

impl ProbabilityProfile {
    pub fn from_estimates(estimates: Vec<f64>) -> Self {
        ProbabilityProfile {
            estimates,
            successes: Vec::new(),
            samples: 0,
            exact: true,
        }
    }

    pub fn rounds(&self) -> usize {
        self.estimates.len() - 1
    }

    /// `p̂_k`.
    pub fn get(&self, k: usize) -> f64 {
        self.estimates[k]
    }
}

/// Monte-Carlo profile with `samples` draws per prefix. Prefix `k` uses its
/// own RNG stream, so results do not depend on thread scheduling.
pub fn estimate_profile<S: ReactiveScheme + ?Sized>(
    scheme: &S,
    t: &[BitString],
    x: &BitString,
    samples: u64,
    seed: u64,
) -> Result<ProbabilityProfile> {
    if x.len() != scheme.msg_bits() {
        return Err(Error::LengthMismatch {
            expected: scheme.msg_bits(),
            got: x.len(),
        });
    }
    if samples == 0 {
        return Err(Error::config("at least one sample per prefix is required"));
    }
    let d = t.len();
    let successes: Vec<u64> = (0..=d)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, "profile", k as u64);
            let mut buf: Vec<BitString> = t.to_vec();
            let mut hits = 0u64;
            for _ in 0..samples {
                for doc in buf.iter_mut().skip(k) {
                    *doc = BitString::random(scheme.doc_bits(), &mut rng);
                }
                let dk = BitString::random(scheme.key_bits(), &mut rng);
                if &scheme.decode(&dk, &buf) == x {
                    hits += 1;
                }
            }
            hits
        })
        .collect();
    Ok(ProbabilityProfile {
        estimates: successes
            .iter()
            .map(|&c| c as f64 / samples as f64)
            .collect(),
        successes,
        samples,
        exact: false,
    })
}

/// Exact continuation probabilities for a streaming decoder, by dynamic
/// programming over decoder summaries. All `2^ℓ` documents and `2^s` keys are
/// enumerated, so this is only usable for small `ℓ` and `s`.
pub struct ExactOracle<'a, D: StreamingDecoder> {
    decoder: &'a D,
    doc_bits: usize,
    rounds: usize,
    docs: Vec<BitString>,
    /// `values[k][summary]` is `p` for any prefix of length `k` that reaches
    /// `summary`.
    values: Vec<HashMap<D::Summary, f64>>,
}

/// Largest document length the oracle will enumerate.
pub const MAX_EXACT_DOC_BITS: usize = 16;
/// Largest key length the oracle will enumerate.
pub const MAX_EXACT_KEY_BITS: usize = 12;

impl<'a, D: StreamingDecoder> ExactOracle<'a, D> {
    pub fn new(
        decoder: &'a D,
        doc_bits: usize,
        key_bits: usize,
        rounds: usize,
        x: &BitString,
    ) -> Result<Self> {
        if doc_bits > MAX_EXACT_DOC_BITS || key_bits > MAX_EXACT_KEY_BITS {
            return Err(Error::config(format!(
                "exact profile needs ℓ ≤ {MAX_EXACT_DOC_BITS} and s ≤ {MAX_EXACT_KEY_BITS}"
            )));
        }
        let docs: Vec<BitString> = (0..1u64 << doc_bits)
            .map(|v| BitString::from_u64(v, doc_bits))
            .collect();
        let keys: Vec<BitString> = (0..1u64 << key_bits)
            .map(|v| BitString::from_u64(v, key_bits))
            .collect();

        let mut levels: Vec<Vec<D::Summary>> = vec![vec![decoder.start()]];
        for k in 1..=rounds {
            let mut seen: HashSet<D::Summary> = HashSet::new();
            let mut next = Vec::new();
            for summary in &levels[k - 1] {
                for doc in &docs {
                    let s = decoder.absorb(summary, k, doc);
                    if seen.insert(s.clone()) {
                        next.push(s);
                    }
                }
            }
            levels.push(next);
        }

        let mut values: Vec<HashMap<D::Summary, f64>> = vec![HashMap::new(); rounds + 1];
        values[rounds] = levels[rounds]
            .par_iter()
            .map(|s| {
                let hits = keys.iter().filter(|dk| &decoder.finish(s, dk) == x).count();
                (s.clone(), hits as f64 / keys.len() as f64)
            })
            .collect();
        for k in (0..rounds).rev() {
            let after = &values[k + 1];
            values[k] = levels[k]
                .par_iter()
                .map(|s| {
                    let total: f64 = docs
                        .iter()
                        .map(|doc| after[&decoder.absorb(s, k + 1, doc)])
                        .sum();
                    (s.clone(), total / docs.len() as f64)
                })
                .collect();
        }
        Ok(ExactOracle {
            decoder,
            doc_bits,
            rounds,
            docs,
            values,
        })
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn decoder(&self) -> &D {
        self.decoder
    }

    /// `p` for any prefix of length `k` whose summary is `summary`, or `None`
    /// if no such prefix exists.
    pub fn value(&self, k: usize, summary: &D::Summary) -> Option<f64> {
        self.values.get(k)?.get(summary).copied()
    }

    /// All `2^ℓ` documents, in numeric order.
    pub fn documents(&self) -> &[BitString] {
        &self.docs
    }

    /// `p_0, …, p_k` for a prefix of length `k ≤ d`.
    pub fn prefix_probabilities(&self, prefix: &[BitString]) -> Result<Vec<f64>> {
        if prefix.len() > self.rounds {
            return Err(Error::LengthMismatch {
                expected: self.rounds,
                got: prefix.len(),
            });
        }
        let mut summary = self.decoder.start();
        let mut out = vec![self.values[0][&summary]];
        for (k, doc) in prefix.iter().enumerate() {
            if doc.len() != self.doc_bits {
                return Err(Error::LengthMismatch {
                    expected: self.doc_bits,
                    got: doc.len(),
                });
            }
            summary = self.decoder.absorb(&summary, k + 1, doc);
            out.push(self.values[k + 1][&summary]);
        }
        Ok(out)
    }

    pub fn profile(&self, t: &[BitString]) -> Result<ProbabilityProfile> {
        if t.len() != self.rounds {
            return Err(Error::LengthMismatch {
                expected: self.rounds,
                got: t.len(),
            });
        }
        Ok(ProbabilityProfile::from_estimates(
            self.prefix_probabilities(t)?,
        ))
    }
}
