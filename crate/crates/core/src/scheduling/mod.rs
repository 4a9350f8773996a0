//! Epoch orderings for the four batch-construction strategies.
//!
//! * `random`: a seeded shuffle, fresh every epoch.
//! * `sorted`: a stable global sort by length, identical every epoch.
//! * `bucketing`: length buckets, each shuffled, with batches drawn from a
//!   randomly selected bucket ([`plan_bucketing`]).
//! * `alternated`: shuffle, cut into N near-equal bins, sort odd bins
//!   ascending and even bins descending ([`plan_alternated`]).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::batching::{self, BatchPolicy, EpochPlan};
use crate::corpus::Corpus;
use crate::{Error, Result};

mod alternated;
mod bucketing;
mod probability;
mod runs;

pub use alternated::{bin_sizes, plan_alternated, AlternatedSpec};
pub use bucketing::{assign_bucket, plan_bucketing, BucketSelection, BucketSpec};
pub use probability::{same_bin_exact, same_bin_probability, ProbabilityEstimate};
pub use runs::{monotone_runs, Run, RunDirection};

use crate::rng::SeqRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyTag {
    Random,
    Sorted,
    Bucketing,
    Alternated,
}

impl fmt::Display for StrategyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyTag::Random => "random",
            StrategyTag::Sorted => "sorted",
            StrategyTag::Bucketing => "bucketing",
            StrategyTag::Alternated => "alternated",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortDirection {
    #[default]
    Ascending,
    Descending,
}

/// A strategy and its parameters.
///
/// The string form is what config files and `--strategy` use:
/// `random`, `sorted[:asc|desc]`, `bucketing:<width>[:uniform]`,
/// `bucketing:<b1>,<b2>,...[:uniform]`, `alternated:<n_bins>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StrategyConfig {
    Random,
    Sorted(SortDirection),
    Bucketing {
        buckets: BucketSpec,
        selection: BucketSelection,
    },
    Alternated(AlternatedSpec),
}

impl StrategyConfig {
    pub fn tag(&self) -> StrategyTag {
        match self {
            StrategyConfig::Random => StrategyTag::Random,
            StrategyConfig::Sorted(_) => StrategyTag::Sorted,
            StrategyConfig::Bucketing { .. } => StrategyTag::Bucketing,
            StrategyConfig::Alternated(_) => StrategyTag::Alternated,
        }
    }

    pub fn alternated(n_bins: usize) -> Self {
        StrategyConfig::Alternated(AlternatedSpec { n_bins })
    }

    pub fn bucketing_width(width: u32) -> Self {
        StrategyConfig::Bucketing {
            buckets: BucketSpec::UniformWidth(width),
            selection: BucketSelection::Weighted,
        }
    }

    /// Filesystem-safe name, unique per distinct config. Used in file names
    /// and report rows.
    pub fn label(&self) -> String {
        match self {
            StrategyConfig::Random => "random".into(),
            StrategyConfig::Sorted(SortDirection::Ascending) => "sorted".into(),
            StrategyConfig::Sorted(SortDirection::Descending) => "sorted-desc".into(),
            StrategyConfig::Bucketing { buckets, selection } => {
                let mut s = match buckets {
                    BucketSpec::UniformWidth(w) => format!("bucketing-{w}"),
                    BucketSpec::Boundaries(b) => {
                        let parts: Vec<String> = b.iter().map(u32::to_string).collect();
                        format!("bucketing-{}", parts.join("-"))
                    }
                };
                if *selection == BucketSelection::Uniform {
                    s.push_str("-uniform");
                }
                s
            }
            StrategyConfig::Alternated(spec) => format!("alternated-{}", spec.n_bins),
        }
    }

    /// Builds one epoch's plan. Ordering strategies are cut into batches by
    /// `policy`; bucketing applies `policy` inside each bucket.
    pub fn plan(
        &self,
        corpus: &Corpus,
        policy: &BatchPolicy,
        seed: u64,
        epoch: u64,
    ) -> Result<EpochPlan> {
        match self {
            StrategyConfig::Bucketing { buckets, selection } => {
                plan_bucketing(corpus, buckets, *selection, policy, seed, epoch)
            }
            _ => {
                let ordering = self.order(corpus, seed, epoch)?;
                batching::batch(&ordering, corpus, policy)
            }
        }
    }

    /// The epoch ordering for ordering-based strategies. Bucketing has no
    /// ordering independent of batching, so this returns the realized batch
    /// sequence flattened, using one-sequence batches.
    pub fn order(&self, corpus: &Corpus, seed: u64, epoch: u64) -> Result<EpochOrdering> {
        let mut ordering = match self {
            StrategyConfig::Random => plan_random(corpus, seed, epoch)?,
            StrategyConfig::Sorted(direction) => plan_sorted(corpus, *direction)?,
            StrategyConfig::Alternated(spec) => plan_alternated(corpus, spec, seed, epoch)?,
            StrategyConfig::Bucketing { .. } => {
                let plan = self.plan(corpus, &BatchPolicy::Count(1), seed, epoch)?;
                EpochOrdering {
                    indices: plan.flattened(),
                    strategy: self.clone(),
                    epoch,
                    seed,
                }
            }
        };
        ordering.strategy = self.clone();
        ordering.seed = seed;
        ordering.epoch = epoch;
        Ok(ordering)
    }
}

impl fmt::Display for StrategyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyConfig::Random => f.write_str("random"),
            StrategyConfig::Sorted(SortDirection::Ascending) => f.write_str("sorted"),
            StrategyConfig::Sorted(SortDirection::Descending) => f.write_str("sorted:desc"),
            StrategyConfig::Bucketing { buckets, selection } => {
                match buckets {
                    BucketSpec::UniformWidth(w) => write!(f, "bucketing:{w}")?,
                    BucketSpec::Boundaries(b) => {
                        let parts: Vec<String> = b.iter().map(u32::to_string).collect();
                        write!(f, "bucketing:{}", parts.join(","))?
                    }
                }
                if *selection == BucketSelection::Uniform {
                    f.write_str(":uniform")?;
                }
                Ok(())
            }
            StrategyConfig::Alternated(spec) => write!(f, "alternated:{}", spec.n_bins),
        }
    }
}

impl FromStr for StrategyConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unrecognized strategy {s:?}"));
        let mut parts = s.trim().split(':');
        let name = parts.next().unwrap_or_default();
        let params: Vec<&str> = parts.collect();
        let config = match (name, params.as_slice()) {
            ("random", []) => StrategyConfig::Random,
            ("sorted", []) | ("sorted", ["asc"]) => {
                StrategyConfig::Sorted(SortDirection::Ascending)
            }
            ("sorted", ["desc"]) => StrategyConfig::Sorted(SortDirection::Descending),
            ("bucketing", [spec, rest @ ..]) => {
                let selection = match rest {
                    [] | ["weighted"] => BucketSelection::Weighted,
                    ["uniform"] => BucketSelection::Uniform,
                    _ => return Err(bad()),
                };
                let buckets = if spec.contains(',') {
                    let bounds = spec
                        .split(',')
                        .map(|b| b.trim().parse::<u32>().map_err(|_| bad()))
                        .collect::<Result<Vec<_>>>()?;
                    BucketSpec::Boundaries(bounds)
                } else {
                    BucketSpec::UniformWidth(spec.parse().map_err(|_| bad())?)
                };
                buckets.validate()?;
                StrategyConfig::Bucketing { buckets, selection }
            }
            ("alternated", [n]) => {
                let n_bins: usize = n.parse().map_err(|_| bad())?;
                if n_bins == 0 {
                    return Err(Error::InvalidParameter(
                        "alternated needs n_bins >= 1".into(),
                    ));
                }
                StrategyConfig::alternated(n_bins)
            }
            _ => return Err(bad()),
        };
        Ok(config)
    }
}

impl TryFrom<String> for StrategyConfig {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<StrategyConfig> for String {
    fn from(config: StrategyConfig) -> String {
        config.to_string()
    }
}

/// A permutation of corpus indices produced by one strategy for one epoch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpochOrdering {
    pub indices: Vec<usize>,
    pub strategy: StrategyConfig,
    pub epoch: u64,
    pub seed: u64,
}

impl EpochOrdering {
    pub fn tag(&self) -> StrategyTag {
        self.strategy.tag()
    }

    pub fn lengths(&self, corpus: &Corpus) -> Vec<u32> {
        self.indices.iter().map(|&i| corpus.length(i)).collect()
    }
}

/// Seeded uniform shuffle of the corpus; a fresh permutation each epoch.
pub fn plan_random(corpus: &Corpus, seed: u64, epoch: u64) -> Result<EpochOrdering> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut indices: Vec<usize> = (0..corpus.len()).collect();
    SeqRng::schedule(seed, epoch).shuffle(&mut indices);
    Ok(EpochOrdering {
        indices,
        strategy: StrategyConfig::Random,
        epoch,
        seed,
    })
}

/// Global stable sort by length; equal lengths keep corpus order in both
/// directions.
pub fn plan_sorted(corpus: &Corpus, direction: SortDirection) -> Result<EpochOrdering> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut indices: Vec<usize> = (0..corpus.len()).collect();
    sort_by_length(&mut indices, corpus, direction);
    Ok(EpochOrdering {
        indices,
        strategy: StrategyConfig::Sorted(direction),
        epoch: 0,
        seed: 0,
    })
}

/// Stable in-place sort of corpus indices by length.
pub(crate) fn sort_by_length(indices: &mut [usize], corpus: &Corpus, direction: SortDirection) {
    match direction {
        SortDirection::Ascending => indices.sort_by_key(|&i| corpus.length(i)),
        SortDirection::Descending => indices.sort_by_key(|&i| std::cmp::Reverse(corpus.length(i))),
    }
}
