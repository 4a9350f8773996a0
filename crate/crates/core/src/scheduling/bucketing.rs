//! Length-range bucketing with random bucket selection.

use serde::{Deserialize, Serialize};

use crate::batching::{Batch, BatchPolicy, EpochPlan};
use crate::corpus::Corpus;
use crate::rng::SeqRng;
use crate::scheduling::StrategyConfig;
use crate::{Error, Result};

/// Half-open length ranges `[1, b1), [b1, b2), ..., [bk, inf)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BucketSpec {
    /// Explicit boundaries `b1 < b2 < ...`, each greater than 1.
    Boundaries(Vec<u32>),
    /// Ranges of `w` lengths each: `[1, w+1), [w+1, 2w+1), ...`.
    UniformWidth(u32),
}

impl BucketSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            BucketSpec::UniformWidth(0) => Err(Error::InvalidBuckets(
                "uniform width must be at least 1".into(),
            )),
            BucketSpec::UniformWidth(_) => Ok(()),
            BucketSpec::Boundaries(bounds) => {
                if bounds.first().is_some_and(|&b| b <= 1) {
                    return Err(Error::InvalidBuckets(
                        "first boundary must exceed 1 (the first range starts at 1)".into(),
                    ));
                }
                if bounds.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidBuckets(
                        "boundaries must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// The k-th boundary (0-based), or `None` past the last one.
    pub fn boundary(&self, k: usize) -> Option<u64> {
        match self {
            BucketSpec::Boundaries(bounds) => bounds.get(k).map(|&b| u64::from(b)),
            BucketSpec::UniformWidth(w) => Some((k as u64 + 1) * u64::from(*w) + 1),
        }
    }
}

/// Bucket index for `length`: the number of boundaries `<= length`, found by
/// binary search over the boundary sequence.
pub fn assign_bucket(length: u32, spec: &BucketSpec) -> usize {
    let length = u64::from(length);
    // Exclusive upper bound on the answer.
    let mut hi = match spec {
        BucketSpec::Boundaries(bounds) => bounds.len(),
        BucketSpec::UniformWidth(w) => (length / u64::from((*w).max(1))) as usize + 1,
    };
    let mut lo = 0usize;
    // Invariant: boundaries before `lo` are <= length, those at or after `hi`
    // are > length.
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match spec.boundary(mid) {
            Some(b) if b <= length => lo = mid + 1,
            _ => hi = mid,
        }
    }
    lo
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BucketSelection {
    /// Probability proportional to the bucket's remaining count.
    #[default]
    Weighted,
    /// Uniform over buckets that still hold sequences.
    Uniform,
}

/// One epoch of bucketed batches.
///
/// Every bucket is shuffled once (buckets in ascending index order, all from
/// the epoch's stream). Batches are then drawn by picking a non-empty bucket
/// per `selection` and taking the next consecutive span from it, sized by
/// `policy`. The epoch ends when every bucket is exhausted.
pub fn plan_bucketing(
    corpus: &Corpus,
    spec: &BucketSpec,
    selection: BucketSelection,
    policy: &BatchPolicy,
    seed: u64,
    epoch: u64,
) -> Result<EpochPlan> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    spec.validate()?;
    policy.validate(corpus)?;

    let mut buckets: Vec<Vec<usize>> = Vec::new();
    for (i, utt) in corpus.utterances().iter().enumerate() {
        let b = assign_bucket(utt.length, spec);
        if b >= buckets.len() {
            buckets.resize_with(b + 1, Vec::new);
        }
        buckets[b].push(i);
    }
    let mut buckets: Vec<Vec<usize>> = buckets.into_iter().filter(|b| !b.is_empty()).collect();

    let mut rng = SeqRng::schedule(seed, epoch);
    for bucket in &mut buckets {
        rng.shuffle(bucket);
    }

    let mut cursor = vec![0usize; buckets.len()];
    let mut remaining: usize = corpus.len();
    let mut batches = Vec::new();
    while remaining > 0 {
        let chosen = match selection {
            BucketSelection::Weighted => {
                let mut ticket = rng.below(remaining as u64) as usize;
                let mut pick = 0;
                for (b, bucket) in buckets.iter().enumerate() {
                    let left = bucket.len() - cursor[b];
                    if ticket < left {
                        pick = b;
                        break;
                    }
                    ticket -= left;
                }
                pick
            }
            BucketSelection::Uniform => {
                let open: Vec<usize> = (0..buckets.len())
                    .filter(|&b| cursor[b] < buckets[b].len())
                    .collect();
                open[rng.below(open.len() as u64) as usize]
            }
        };
        let bucket = &buckets[chosen];
        let span = policy.take_span(&bucket[cursor[chosen]..], corpus);
        batches.push(Batch::new(span.to_vec(), corpus));
        cursor[chosen] += span.len();
        remaining -= span.len();
    }

    Ok(EpochPlan {
        batches,
        strategy: StrategyConfig::Bucketing {
            buckets: spec.clone(),
            selection,
        },
        policy: policy.clone(),
        seed,
        epoch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::batching::batch_by_count;
    use crate::rng::SeqRng;
    use crate::scheduling::plan_random;

    fn linear_scan(length: u32, bounds: &[u32]) -> usize {
        let mut bucket = 0;
        for &b in bounds {
            if length >= b {
                bucket += 1;
            }
        }
        bucket
    }

    #[test]
    fn width_250_boundary_convention() {
        let spec = BucketSpec::UniformWidth(250);
        assert_eq!(assign_bucket(1, &spec), 0);
        assert_eq!(assign_bucket(250, &spec), 0);
        assert_eq!(assign_bucket(251, &spec), 1);
        assert_eq!(assign_bucket(500, &spec), 1);
        assert_eq!(assign_bucket(501, &spec), 2);
    }

    #[test]
    fn minimum_length_is_bucket_zero() {
        for spec in [
            BucketSpec::UniformWidth(1),
            BucketSpec::UniformWidth(7),
            BucketSpec::Boundaries(vec![2, 3]),
            BucketSpec::Boundaries(vec![]),
        ] {
            assert_eq!(assign_bucket(1, &spec), 0);
        }
    }

    #[test]
    fn binary_search_matches_linear_scan() {
        let mut rng = SeqRng::schedule(2024, 0);
        for _ in 0..20 {
            let mut bounds: Vec<u32> = (0..7).map(|_| 2 + rng.below(2000) as u32).collect();
            bounds.sort_unstable();
            bounds.dedup();
            let spec = BucketSpec::Boundaries(bounds.clone());
            for _ in 0..1000 {
                let len = 1 + rng.below(3000) as u32;
                assert_eq!(assign_bucket(len, &spec), linear_scan(len, &bounds));
            }
        }
    }

    #[test]
    fn uniform_width_matches_division() {
        for w in [1u32, 3, 250] {
            let spec = BucketSpec::UniformWidth(w);
            for len in 1..=2000u32 {
                assert_eq!(assign_bucket(len, &spec), ((len - 1) / w) as usize);
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert!(BucketSpec::UniformWidth(0).validate().is_err());
        assert!(BucketSpec::Boundaries(vec![1, 5]).validate().is_err());
        assert!(BucketSpec::Boundaries(vec![5, 5]).validate().is_err());
        assert!(BucketSpec::Boundaries(vec![]).validate().is_ok());
        assert!(BucketSpec::Boundaries(vec![2, 10]).validate().is_ok());
    }

    #[test]
    fn short_and_long_never_mix() {
        let corpus = Corpus::from_lengths(&[10, 10, 300, 300]).unwrap();
        for seed in 0..20 {
            let plan = plan_bucketing(
                &corpus,
                &BucketSpec::UniformWidth(250),
                BucketSelection::Weighted,
                &BatchPolicy::Count(2),
                seed,
                0,
            )
            .unwrap();
            assert_eq!(plan.batches.len(), 2);
            for batch in &plan.batches {
                assert_eq!(batch.wasted_frames, 0);
                let mut members = batch.members.clone();
                members.sort_unstable();
                assert!(members == vec![0, 1] || members == vec![2, 3]);
            }
        }
    }

    #[test]
    fn single_bucket_equals_random_then_count_batching() {
        let corpus = Corpus::from_lengths(&[5, 9, 2, 7, 7, 1, 3, 8, 4, 6, 2]).unwrap();
        for selection in [BucketSelection::Weighted, BucketSelection::Uniform] {
            for seed in 0..10 {
                let bucketed = plan_bucketing(
                    &corpus,
                    &BucketSpec::UniformWidth(100),
                    selection,
                    &BatchPolicy::Count(3),
                    seed,
                    2,
                )
                .unwrap();
                let random = plan_random(&corpus, seed, 2).unwrap();
                let expected = batch_by_count(&random, &corpus, 3).unwrap();
                let members = |p: &EpochPlan| -> Vec<Vec<usize>> {
                    p.batches.iter().map(|b| b.members.clone()).collect()
                };
                assert_eq!(members(&bucketed), members(&expected));
            }
        }
    }

    #[test]
    fn covers_every_index_once() {
        let lengths: Vec<u32> = (0..100).map(|i| 1 + (i * 37 % 700)).collect();
        let corpus = Corpus::from_lengths(&lengths).unwrap();
        for (spec, policy) in [
            (BucketSpec::UniformWidth(50), BatchPolicy::Count(7)),
            (
                BucketSpec::Boundaries(vec![100, 101, 400]),
                BatchPolicy::Count(1),
            ),
            (
                BucketSpec::UniformWidth(250),
                BatchPolicy::FrameBudget {
                    budget: 2000,
                    mode: crate::BudgetMode::Padded,
                },
            ),
        ] {
            let plan =
                plan_bucketing(&corpus, &spec, BucketSelection::Uniform, &policy, 3, 0).unwrap();
            let mut flat = plan.flattened();
            flat.sort_unstable();
            assert_eq!(flat, (0..100).collect::<Vec<_>>());
            for batch in &plan.batches {
                let first = assign_bucket(corpus.length(batch.members[0]), &spec);
                assert!(batch
                    .members
                    .iter()
                    .all(|&m| assign_bucket(corpus.length(m), &spec) == first));
            }
        }
    }
}
