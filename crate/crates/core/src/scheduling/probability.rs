//! How often two fixed sequences share a bin under shuffle-then-partition.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bin_sizes;
use crate::rng::{Domain, SeqRng};
use crate::{Error, Result};

const TRIALS_PER_CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub corpus_size: usize,
    pub n_bins: usize,
    pub trials: u64,
    pub hits: u64,
    pub estimate: f64,
    pub standard_error: f64,
    /// `sum s_b (s_b - 1) / (M (M - 1))` over the bin sizes `s_b`; reduces to
    /// `(M/N - 1) / (M - 1)` for equal bins.
    pub exact: f64,
    /// `1 / (N (N - 1))`, reported for comparison only; undefined for N = 1.
    pub claimed: Option<f64>,
}

/// Exact probability that two distinct sequences land in the same bin.
pub fn same_bin_exact(corpus_size: usize, n_bins: usize) -> f64 {
    let m = corpus_size as f64;
    let pairs: f64 = bin_sizes(corpus_size, n_bins)
        .into_iter()
        .map(|s| s as f64 * (s as f64 - 1.0))
        .sum();
    pairs / (m * (m - 1.0))
}

/// Monte Carlo estimate over `trials` independent shuffles of `corpus_size`
/// sequences cut into `n_bins` bins. Trials run in fixed-size chunks, each
/// with its own stream, so the result does not depend on thread count.
pub fn same_bin_probability(
    corpus_size: usize,
    n_bins: usize,
    trials: u64,
    seed: u64,
) -> Result<ProbabilityEstimate> {
    if corpus_size < 2 {
        return Err(Error::InvalidParameter(
            "corpus_size must be at least 2".into(),
        ));
    }
    if n_bins == 0 {
        return Err(Error::InvalidParameter("n_bins must be at least 1".into()));
    }
    if n_bins > corpus_size {
        return Err(Error::TooManyBins {
            strategy: format!("alternated-{n_bins}"),
            n_bins,
            corpus_size,
        });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }

    let mut bin_of_position = Vec::with_capacity(corpus_size);
    for (b, size) in bin_sizes(corpus_size, n_bins).into_iter().enumerate() {
        bin_of_position.extend(std::iter::repeat_n(b, size));
    }

    let chunks = trials.div_ceil(TRIALS_PER_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = SeqRng::new(Domain::Probability, seed, chunk);
            let count = TRIALS_PER_CHUNK.min(trials - chunk * TRIALS_PER_CHUNK);
            let mut order: Vec<usize> = (0..corpus_size).collect();
            let mut hits = 0u64;
            for _ in 0..count {
                rng.shuffle(&mut order);
                // Sequences 0 and 1 are the tracked pair.
                let mut positions = [0usize; 2];
                for (pos, &item) in order.iter().enumerate() {
                    if item < 2 {
                        positions[item] = pos;
                    }
                }
                if bin_of_position[positions[0]] == bin_of_position[positions[1]] {
                    hits += 1;
                }
            }
            hits
        })
        .sum();

    let estimate = hits as f64 / trials as f64;
    let standard_error = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    let claimed = (n_bins > 1).then(|| 1.0 / (n_bins as f64 * (n_bins as f64 - 1.0)));
    Ok(ProbabilityEstimate {
        corpus_size,
        n_bins,
        trials,
        hits,
        estimate,
        standard_error,
        exact: same_bin_exact(corpus_size, n_bins),
        claimed,
    })
}
