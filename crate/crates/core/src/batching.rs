//! Cutting an ordering into batches, with padded-cost accounting.

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::scheduling::{EpochOrdering, StrategyConfig};
use crate::{Error, Result};

/// Consecutive sequences padded to the longest member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Batch {
    pub members: Vec<usize>,
    pub max_len: u32,
    /// `max_len * members.len()`
    pub padded_frames: u64,
    pub real_frames: u64,
    pub wasted_frames: u64,
}

impl Batch {
    /// Derives the cost fields from the corpus. `members` must be non-empty
    /// and in range.
    pub fn new(members: Vec<usize>, corpus: &Corpus) -> Self {
        assert!(!members.is_empty(), "a batch needs at least one member");
        let (max_len, real_frames) = members.iter().fold((0u32, 0u64), |(max, sum), &i| {
            let len = corpus.length(i);
            (max.max(len), sum + u64::from(len))
        });
        let padded_frames = u64::from(max_len) * members.len() as u64;
        Self {
            members,
            max_len,
            padded_frames,
            real_frames,
            wasted_frames: padded_frames - real_frames,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// What a frame budget counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetMode {
    /// `max_len * count`, the frames actually computed.
    #[default]
    Padded,
    /// Sum of member lengths.
    Raw,
}

impl BudgetMode {
    fn cost(self, max_len: u32, count: usize, raw: u64) -> u64 {
        match self {
            BudgetMode::Padded => u64::from(max_len) * count as u64,
            BudgetMode::Raw => raw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchPolicy {
    /// Fixed number of sequences per batch.
    Count(usize),
    /// Greedy consecutive packing under a frame cap.
    FrameBudget {
        budget: u64,
        #[serde(default)]
        mode: BudgetMode,
    },
}

impl BatchPolicy {
    /// Checks the policy against a corpus: count >= 1, and every utterance
    /// fits a frame budget on its own.
    pub fn validate(&self, corpus: &Corpus) -> Result<()> {
        match *self {
            BatchPolicy::Count(0) => Err(Error::InvalidParameter(
                "batch_size must be at least 1".into(),
            )),
            BatchPolicy::Count(_) => Ok(()),
            BatchPolicy::FrameBudget { budget, .. } => {
                match corpus
                    .utterances()
                    .iter()
                    .find(|u| u64::from(u.length) > budget)
                {
                    Some(u) => Err(Error::BudgetTooSmall {
                        id: u.id.clone(),
                        length: u.length,
                        budget,
                    }),
                    None => Ok(()),
                }
            }
        }
    }

    /// The longest prefix of `pending` that forms one batch. Never empty when
    /// `pending` is non-empty and the policy has been validated.
    pub(crate) fn take_span<'a>(&self, pending: &'a [usize], corpus: &Corpus) -> &'a [usize] {
        match *self {
            BatchPolicy::Count(n) => &pending[..n.min(pending.len())],
            BatchPolicy::FrameBudget { budget, mode } => {
                let mut max_len = 0u32;
                let mut raw = 0u64;
                let mut taken = 0;
                for &i in pending {
                    let len = corpus.length(i);
                    let next_max = max_len.max(len);
                    let next_raw = raw + u64::from(len);
                    if taken > 0 && mode.cost(next_max, taken + 1, next_raw) > budget {
                        break;
                    }
                    max_len = next_max;
                    raw = next_raw;
                    taken += 1;
                }
                &pending[..taken]
            }
        }
    }
}

/// One epoch's batches in training order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpochPlan {
    pub batches: Vec<Batch>,
    pub strategy: StrategyConfig,
    pub policy: BatchPolicy,
    pub seed: u64,
    pub epoch: u64,
}

impl EpochPlan {
    /// All members in batch order.
    pub fn flattened(&self) -> Vec<usize> {
        self.batches
            .iter()
            .flat_map(|b| b.members.iter().copied())
            .collect()
    }

    pub fn member_count(&self) -> usize {
        self.batches.iter().map(Batch::len).sum()
    }

    pub fn total_padded_frames(&self) -> u64 {
        self.batches.iter().map(|b| b.padded_frames).sum()
    }

    pub fn max_batch_padded_frames(&self) -> u64 {
        self.batches
            .iter()
            .map(|b| b.padded_frames)
            .max()
            .unwrap_or(0)
    }

    /// Rebuilds a plan from bare member lists, recomputing cost fields.
    /// Fails unless the members form a permutation of the corpus indices.
    pub fn from_members(
        members: Vec<Vec<usize>>,
        corpus: &Corpus,
        strategy: StrategyConfig,
        policy: BatchPolicy,
        seed: u64,
        epoch: u64,
    ) -> Result<Self> {
        if members.iter().any(Vec::is_empty) {
            return Err(Error::PlanMismatch("empty batch".into()));
        }
        check_permutation(members.iter().flatten().copied(), corpus.len())?;
        Ok(Self {
            batches: members.into_iter().map(|m| Batch::new(m, corpus)).collect(),
            strategy,
            policy,
            seed,
            epoch,
        })
    }
}

/// Errors unless `indices` visits every value in `0..len` exactly once.
pub(crate) fn check_permutation(indices: impl Iterator<Item = usize>, len: usize) -> Result<()> {
    let mut seen = vec![false; len];
    let mut count = 0;
    for i in indices {
        match seen.get_mut(i) {
            None => {
                return Err(Error::PlanMismatch(format!(
                    "index {i} out of range for corpus of {len}"
                )))
            }
            Some(true) => return Err(Error::PlanMismatch(format!("index {i} repeated"))),
            Some(slot) => *slot = true,
        }
        count += 1;
    }
    if count != len {
        return Err(Error::PlanMismatch(format!(
            "{count} indices for corpus of {len}"
        )));
    }
    Ok(())
}

fn pack(ordering: &EpochOrdering, corpus: &Corpus, policy: BatchPolicy) -> Result<EpochPlan> {
    check_permutation(ordering.indices.iter().copied(), corpus.len())?;
    policy.validate(corpus)?;
    let mut batches = Vec::new();
    let mut pending = ordering.indices.as_slice();
    while !pending.is_empty() {
        let span = policy.take_span(pending, corpus);
        batches.push(Batch::new(span.to_vec(), corpus));
        pending = &pending[span.len()..];
    }
    Ok(EpochPlan {
        batches,
        strategy: ordering.strategy.clone(),
        policy,
        seed: ordering.seed,
        epoch: ordering.epoch,
    })
}

/// Consecutive slices of `batch_size`; the last may be shorter.
pub fn batch_by_count(
    ordering: &EpochOrdering,
    corpus: &Corpus,
    batch_size: usize,
) -> Result<EpochPlan> {
    pack(ordering, corpus, BatchPolicy::Count(batch_size))
}

/// Greedy consecutive packing: the next sequence joins the current batch
/// unless that would push the batch cost above `budget`.
pub fn batch_by_frame_budget(
    ordering: &EpochOrdering,
    corpus: &Corpus,
    budget: u64,
    mode: BudgetMode,
) -> Result<EpochPlan> {
    pack(ordering, corpus, BatchPolicy::FrameBudget { budget, mode })
}

pub fn batch(ordering: &EpochOrdering, corpus: &Corpus, policy: &BatchPolicy) -> Result<EpochPlan> {
    pack(ordering, corpus, policy.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(corpus: &Corpus) -> EpochOrdering {
        EpochOrdering {
            indices: (0..corpus.len()).collect(),
            strategy: StrategyConfig::Random,
            epoch: 0,
            seed: 0,
        }
    }

    fn sizes(plan: &EpochPlan) -> Vec<usize> {
        plan.batches.iter().map(Batch::len).collect()
    }

    fn lengths(plan: &EpochPlan, corpus: &Corpus) -> Vec<Vec<u32>> {
        plan.batches
            .iter()
            .map(|b| b.members.iter().map(|&i| corpus.length(i)).collect())
            .collect()
    }

    #[test]
    fn count_exact_division() {
        let c = Corpus::from_lengths(&[1; 6]).unwrap();
        assert_eq!(
            sizes(&batch_by_count(&identity(&c), &c, 2).unwrap()),
            vec![2, 2, 2]
        );
    }

    #[test]
    fn count_remainder() {
        let c = Corpus::from_lengths(&[1; 7]).unwrap();
        assert_eq!(
            sizes(&batch_by_count(&identity(&c), &c, 3).unwrap()),
            vec![3, 3, 1]
        );
    }

    #[test]
    fn count_zero_rejected() {
        let c = Corpus::from_lengths(&[1; 3]).unwrap();
        assert!(batch_by_count(&identity(&c), &c, 0).is_err());
    }

    #[test]
    fn sorted_pairs_waste() {
        let c = Corpus::from_lengths(&[1, 2, 3, 4, 5, 6]).unwrap();
        let plan = batch_by_count(&identity(&c), &c, 2).unwrap();
        let waste: Vec<u64> = plan.batches.iter().map(|b| b.wasted_frames).collect();
        assert_eq!(waste, vec![1, 1, 1]);
        assert_eq!(waste.iter().sum::<u64>(), 3);
    }

    #[test]
    fn raw_budget_packing() {
        let c = Corpus::from_lengths(&[5, 5, 5]).unwrap();
        let plan = batch_by_frame_budget(&identity(&c), &c, 10, BudgetMode::Raw).unwrap();
        assert_eq!(lengths(&plan, &c), vec![vec![5, 5], vec![5]]);
    }

    #[test]
    fn padded_budget_exactly_full() {
        let c = Corpus::from_lengths(&[3, 5]).unwrap();
        let plan = batch_by_frame_budget(&identity(&c), &c, 10, BudgetMode::Padded).unwrap();
        assert_eq!(plan.batches.len(), 1);
        assert_eq!(plan.batches[0].padded_frames, 10);
    }

    #[test]
    fn padded_and_raw_differ() {
        // raw 2+9 = 11 fits 18; padded 2*9 = 18 fits; adding 1: raw 12, padded 27
        let c = Corpus::from_lengths(&[2, 9, 1]).unwrap();
        let raw = batch_by_frame_budget(&identity(&c), &c, 18, BudgetMode::Raw).unwrap();
        let padded = batch_by_frame_budget(&identity(&c), &c, 18, BudgetMode::Padded).unwrap();
        assert_eq!(sizes(&raw), vec![3]);
        assert_eq!(sizes(&padded), vec![2, 1]);
    }

    #[test]
    fn budget_too_small_names_utterance() {
        let c = Corpus::new(vec![
            crate::Utterance::new("short", 3),
            crate::Utterance::new("long-one", 5),
        ])
        .unwrap();
        let err = batch_by_frame_budget(&identity(&c), &c, 4, BudgetMode::Padded).unwrap_err();
        match &err {
            Error::BudgetTooSmall { id, length, budget } => {
                assert_eq!((id.as_str(), *length, *budget), ("long-one", 5, 4));
            }
            other => panic!("unexpected {other}"),
        }
        assert!(err.to_string().contains("long-one"));
    }

    #[test]
    fn ordering_must_match_corpus() {
        let c = Corpus::from_lengths(&[1, 2, 3]).unwrap();
        let mut bad = identity(&c);
        bad.indices = vec![0, 1];
        assert!(matches!(
            batch_by_count(&bad, &c, 2),
            Err(Error::PlanMismatch(_))
        ));
        bad.indices = vec![0, 1, 1];
        assert!(matches!(
            batch_by_count(&bad, &c, 2),
            Err(Error::PlanMismatch(_))
        ));
        bad.indices = vec![0, 1, 3];
        assert!(matches!(
            batch_by_count(&bad, &c, 2),
            Err(Error::PlanMismatch(_))
        ));
    }

    #[test]
    fn batch_cost_fields() {
        let c = Corpus::from_lengths(&[3, 5, 4]).unwrap();
        let b = Batch::new(vec![0, 1, 2], &c);
        assert_eq!(b.max_len, 5);
        assert_eq!(b.padded_frames, 15);
        assert_eq!(b.real_frames, 12);
        assert_eq!(b.wasted_frames, 3);
    }

    #[test]
    fn from_members_validates() {
        let c = Corpus::from_lengths(&[1, 2, 3]).unwrap();
        let ok = EpochPlan::from_members(
            vec![vec![2], vec![0, 1]],
            &c,
            StrategyConfig::Random,
            BatchPolicy::Count(2),
            0,
            0,
        )
        .unwrap();
        assert_eq!(ok.flattened(), vec![2, 0, 1]);
        assert!(EpochPlan::from_members(
            vec![vec![2], vec![], vec![0, 1]],
            &c,
            StrategyConfig::Random,
            BatchPolicy::Count(2),
            0,
            0
        )
        .is_err());
    }
}
