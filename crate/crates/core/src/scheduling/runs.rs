//! Segmentation of a length sequence into maximal monotone runs.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunDirection {
    NonDecreasing,
    NonIncreasing,
    /// All values equal.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    pub start: usize,
    pub len: usize,
    pub direction: RunDirection,
}

/// Greedy left-to-right split into maximal runs. A run's direction is fixed
/// by its first strict step; equal neighbours never break a run. A new run
/// starts at the element that first violates the direction.
pub fn monotone_runs(values: &[u32]) -> Vec<Run> {
    let mut runs = Vec::new();
    let mut start = 0;
    while start < values.len() {
        let mut direction = RunDirection::Flat;
        let mut end = start + 1;
        while end < values.len() {
            let (prev, next) = (values[end - 1], values[end]);
            let step = match next.cmp(&prev) {
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Greater => Some(RunDirection::NonDecreasing),
                std::cmp::Ordering::Less => Some(RunDirection::NonIncreasing),
            };
            match (direction, step) {
                (_, None) => {}
                (RunDirection::Flat, Some(d)) => direction = d,
                (d, Some(s)) if d == s => {}
                _ => break,
            }
            end += 1;
        }
        runs.push(Run {
            start,
            len: end - start,
            direction,
        });
        start = end;
    }
    runs
}
