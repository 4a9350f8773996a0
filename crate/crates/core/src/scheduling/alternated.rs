use serde::{Deserialize, Serialize};

use super::{sort_by_length, EpochOrdering, SortDirection, StrategyConfig};
use crate::corpus::Corpus;
use crate::rng::SeqRng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlternatedSpec {
    pub n_bins: usize,
}

/// Sizes of `n_bins` contiguous bins covering `len` items. Sizes differ by at
/// most one; the first `len % n_bins` bins hold the extra item.
pub fn bin_sizes(len: usize, n_bins: usize) -> Vec<usize> {
    assert!(n_bins > 0, "n_bins must be positive");
    let base = len / n_bins;
    let extra = len % n_bins;
    (0..n_bins).map(|b| base + usize::from(b < extra)).collect()
}

/// Shuffle, cut into `n_bins` bins, then sort bin 1, 3, 5, ... ascending and
/// bin 2, 4, 6, ... descending. Equal lengths keep their shuffled order.
pub fn plan_alternated(
    corpus: &Corpus,
    spec: &AlternatedSpec,
    seed: u64,
    epoch: u64,
) -> Result<EpochOrdering> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let strategy = StrategyConfig::Alternated(*spec);
    if spec.n_bins == 0 {
        return Err(Error::InvalidParameter(format!(
            "{}: n_bins must be at least 1",
            strategy.label()
        )));
    }
    if spec.n_bins > corpus.len() {
        return Err(Error::TooManyBins {
            strategy: strategy.label(),
            n_bins: spec.n_bins,
            corpus_size: corpus.len(),
        });
    }

    let mut indices: Vec<usize> = (0..corpus.len()).collect();
    SeqRng::schedule(seed, epoch).shuffle(&mut indices);

    let mut start = 0;
    for (b, size) in bin_sizes(indices.len(), spec.n_bins)
        .into_iter()
        .enumerate()
    {
        let number = b + 1;
        let direction = if number % 2 == 1 {
            SortDirection::Ascending
        } else {
            SortDirection::Descending
        };
        sort_by_length(&mut indices[start..start + size], corpus, direction);
        start += size;
    }

    Ok(EpochOrdering {
        indices,
        strategy,
        epoch,
        seed,
    })
}
