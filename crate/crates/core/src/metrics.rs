//! Padding waste and length variability of an epoch plan.
//!
//! All standard deviations are population deviations (divide by `n`), since
//! single-member batches are common.

use serde::{Deserialize, Serialize};

use crate::batching::{check_permutation, EpochPlan};
use crate::corpus::Corpus;
use crate::{Error, Result};

/// Field order here is the serialized column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub batch_count: u64,
    pub total_real_frames: u64,
    pub total_padded_frames: u64,
    /// wasted / padded
    pub padding_ratio: f64,
    /// Mean over batches of the std of member lengths.
    pub mean_intra_batch_std: f64,
    /// Std of per-batch mean lengths.
    pub inter_batch_std: f64,
    pub max_batch_padded_frames: u64,
}

impl MetricsReport {
    pub const FIELDS: [&'static str; 7] = [
        "batch_count",
        "total_real_frames",
        "total_padded_frames",
        "padding_ratio",
        "mean_intra_batch_std",
        "inter_batch_std",
        "max_batch_padded_frames",
    ];

    /// Field values as floats, in [`Self::FIELDS`] order.
    pub fn values(&self) -> [f64; 7] {
        [
            self.batch_count as f64,
            self.total_real_frames as f64,
            self.total_padded_frames as f64,
            self.padding_ratio,
            self.mean_intra_batch_std,
            self.inter_batch_std,
            self.max_batch_padded_frames as f64,
        ]
    }

    pub fn wasted_frames(&self) -> u64 {
        self.total_padded_frames - self.total_real_frames
    }
}

fn mean_and_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Measures `plan` against the corpus it was built from. Cost fields are
/// recomputed from member lengths rather than read from the batches.
pub fn evaluate(plan: &EpochPlan, corpus: &Corpus) -> Result<MetricsReport> {
    check_permutation(plan.flattened().into_iter(), corpus.len())?;
    if plan.batches.iter().any(|b| b.members.is_empty()) {
        return Err(Error::PlanMismatch("empty batch".into()));
    }

    let mut total_real = 0u64;
    let mut total_padded = 0u64;
    let mut max_padded = 0u64;
    let mut intra_sum = 0.0;
    let mut batch_means = Vec::with_capacity(plan.batches.len());
    for batch in &plan.batches {
        let n = batch.members.len() as u64;
        let (mut max, mut real, mut squares) = (0u32, 0u64, 0u128);
        for &i in &batch.members {
            let len = corpus.length(i);
            max = max.max(len);
            real += u64::from(len);
            squares += u128::from(len) * u128::from(len);
        }
        let padded = u64::from(max) * n;
        total_real += real;
        total_padded += padded;
        max_padded = max_padded.max(padded);
        // n^2 var = n * sum(x^2) - (sum x)^2, exact in integers.
        let scaled_var = u128::from(n) * squares - u128::from(real) * u128::from(real);
        intra_sum += (scaled_var as f64).sqrt() / n as f64;
        batch_means.push(real as f64 / n as f64);
    }
    let batch_count = plan.batches.len();
    let (_, inter_batch_std) = mean_and_std(batch_means.iter().copied());

    Ok(MetricsReport {
        batch_count: batch_count as u64,
        total_real_frames: total_real,
        total_padded_frames: total_padded,
        padding_ratio: (total_padded - total_real) as f64 / total_padded as f64,
        mean_intra_batch_std: intra_sum / batch_count as f64,
        inter_batch_std,
        max_batch_padded_frames: max_padded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldStats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl FieldStats {
    /// Summary of a non-empty sample; `std` is the population deviation.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyAggregate);
        }
        let (mean, std) = mean_and_std(values.iter().copied());
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            mean,
            std,
            min,
            max,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSummary {
    pub field: String,
    #[serde(flatten)]
    pub stats: FieldStats,
}

/// Per-field mean, std, min and max across reports, in [`MetricsReport::FIELDS`]
/// order.
pub fn aggregate(reports: &[MetricsReport]) -> Result<Vec<FieldSummary>> {
    if reports.is_empty() {
        return Err(Error::EmptyAggregate);
    }
    let rows: Vec<[f64; 7]> = reports.iter().map(MetricsReport::values).collect();
    MetricsReport::FIELDS
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let column: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            Ok(FieldSummary {
                field: (*name).to_string(),
                stats: FieldStats::from_values(&column)?,
            })
        })
        .collect()
}
