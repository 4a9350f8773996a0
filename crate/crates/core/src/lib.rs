//! Batch-construction strategies for training on variable-length sequences.
//!
//! The pipeline is: a [`Corpus`] of sequence lengths is ordered by one of the
//! scheduling strategies, the ordering is cut into an [`EpochPlan`] of
//! batches, and the plan is measured by [`metrics::evaluate`] and priced by
//! [`simulator::simulate`].
//!
//! ```
//! use seqbatch::{batching, corpus, metrics, scheduling};
//!
//! let corpus = corpus::Corpus::from_lengths(&[9, 2, 5, 4]).unwrap();
//! let order = scheduling::plan_sorted(&corpus, scheduling::SortDirection::Ascending).unwrap();
//! let plan = batching::batch_by_count(&order, &corpus, 2).unwrap();
//! let report = metrics::evaluate(&plan, &corpus).unwrap();
//! assert_eq!(report.total_padded_frames, 2 * 4 + 2 * 9);
//! ```

pub mod batching;
pub mod corpus;
mod error;
pub mod metrics;
pub mod rng;
pub mod scheduling;
pub mod simulator;

pub use batching::{Batch, BatchPolicy, BudgetMode, EpochPlan};
pub use corpus::{Corpus, SyntheticSpec, Utterance};
pub use error::{Error, Result};
pub use metrics::MetricsReport;
pub use scheduling::{EpochOrdering, StrategyConfig, StrategyTag};
pub use simulator::{CostModel, SimResult};
