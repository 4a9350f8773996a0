//! Linear cost model: time per padded frame plus a fixed launch cost per
//! batch, and memory proportional to the largest batch.

use serde::{Deserialize, Serialize};

use crate::batching::EpochPlan;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostModel {
    /// Time units per padded frame.
    pub per_frame_cost: f64,
    /// Time units per batch.
    pub per_batch_overhead: f64,
    /// Memory units per padded frame of the largest batch.
    pub memory_per_frame: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            per_frame_cost: 1.0,
            per_batch_overhead: 50.0,
            memory_per_frame: 1.0,
        }
    }
}

impl CostModel {
    /// Frame cost and memory factor must be positive; overhead may be zero.
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.per_frame_cost) || !positive(self.memory_per_frame) {
            return Err(Error::InvalidParameter(
                "per_frame_cost and memory_per_frame must be positive".into(),
            ));
        }
        if !self.per_batch_overhead.is_finite() || self.per_batch_overhead < 0.0 {
            return Err(Error::InvalidParameter(
                "per_batch_overhead must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Field order here is the serialized column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub sim_time: f64,
    pub utterances_per_time: f64,
    pub peak_memory: f64,
}

impl SimResult {
    pub const FIELDS: [&'static str; 3] = ["sim_time", "utterances_per_time", "peak_memory"];

    pub fn values(&self) -> [f64; 3] {
        [self.sim_time, self.utterances_per_time, self.peak_memory]
    }
}

/// Simulated epoch cost; throughput counts the plan's own members.
pub fn simulate(plan: &EpochPlan, model: &CostModel) -> Result<SimResult> {
    simulate_for(plan, model, plan.member_count())
}

/// Like [`simulate`] but measures throughput in `utterances` source
/// sequences, e.g. the utterance count before chunking.
pub fn simulate_for(plan: &EpochPlan, model: &CostModel, utterances: usize) -> Result<SimResult> {
    model.validate()?;
    if plan.batches.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot simulate an empty plan".into(),
        ));
    }
    let sim_time = model.per_batch_overhead * plan.batches.len() as f64
        + model.per_frame_cost * plan.total_padded_frames() as f64;
    Ok(SimResult {
        sim_time,
        utterances_per_time: utterances as f64 / sim_time,
        peak_memory: model.memory_per_frame * plan.max_batch_padded_frames() as f64,
    })
}
