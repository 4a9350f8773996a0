//! Run configuration: a single JSON document, with command-line overrides.
//!
//! ```json
//! {
//!   "corpus": { "synthetic": { "count": 1000,
//!                              "distribution": { "lognormal": { "mu": 5.3, "sigma": 0.6 } } } },
//!   "strategies": ["random", "sorted", "bucketing:250", "alternated:64"],
//!   "batching": { "frame_budget": { "budget": 5000, "mode": "padded" } },
//!   "seeds": "0..10",
//!   "epochs": 1,
//!   "out": "out"
//! }
//! ```
//!
//! A synthetic corpus without its own `seed` is regenerated from each run
//! seed, so every seed sees a fresh corpus shared by all strategies.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use seqbatch::corpus::{chunk_corpus, generate_synthetic, load_manifest, Corpus, SyntheticSpec};
use seqbatch::{BatchPolicy, BudgetMode, CostModel, StrategyConfig};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusSource {
    Manifest(PathBuf),
    Synthetic(SyntheticSource),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSource {
    #[serde(flatten)]
    pub spec: SyntheticSpec,
    /// Fixed corpus seed; when absent the run seed is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// `[1, 2, 3]`, `7`, `"0..10"` (half-open) or `"0..=9"` (inclusive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    Single(u64),
    List(Vec<u64>),
    Range(String),
}

impl SeedSpec {
    pub fn resolve(&self) -> CliResult<Vec<u64>> {
        match self {
            SeedSpec::Single(s) => Ok(vec![*s]),
            SeedSpec::List(list) => Ok(list.clone()),
            SeedSpec::Range(text) => parse_seed_range(text),
        }
    }
}

pub fn parse_seed_range(text: &str) -> CliResult<Vec<u64>> {
    let bad = || {
        CliError::Config(format!(
            "invalid seed range {text:?}, expected a..b or a..=b"
        ))
    };
    let (lo, hi, inclusive) = if let Some((a, b)) = text.split_once("..=") {
        (a, b, true)
    } else if let Some((a, b)) = text.split_once("..") {
        (a, b, false)
    } else {
        return Err(bad());
    };
    let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
    Ok(if inclusive {
        (lo..=hi).collect()
    } else {
        (lo..hi).collect()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: CorpusSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chunk_size: Option<u32>,
    pub strategies: Vec<StrategyConfig>,
    pub batching: BatchPolicy,
    pub seeds: SeedSpec,
    #[serde(default = "one")]
    pub epochs: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub cost_model: CostModel,
}

fn one() -> u64 {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    /// Shipped defaults: lognormal(5.3, 0.6) x 1000, the four strategies with
    /// bucket width 250 and 8/64/256 bins, padded frame budget 5000.
    pub fn demo() -> Self {
        Self {
            corpus: CorpusSource::Synthetic(SyntheticSource {
                spec: SyntheticSpec::lognormal(1000, 5.3, 0.6),
                seed: None,
            }),
            chunk_size: None,
            strategies: [
                "random",
                "sorted",
                "bucketing:250",
                "alternated:8",
                "alternated:64",
                "alternated:256",
            ]
            .iter()
            .map(|s| s.parse().expect("demo strategies parse"))
            .collect(),
            batching: BatchPolicy::FrameBudget {
                budget: 5000,
                mode: BudgetMode::Padded,
            },
            seeds: SeedSpec::Range("0..10".into()),
            epochs: 1,
            out: default_out(),
            cost_model: CostModel::default(),
        }
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn apply(&mut self, overrides: &Overrides) -> CliResult<()> {
        if let Some(out) = &overrides.out {
            self.out = out.clone();
        }
        if let Some(seed) = overrides.seed {
            self.seeds = SeedSpec::Single(seed);
        }
        if let Some(range) = &overrides.seeds {
            self.seeds = SeedSpec::List(parse_seed_range(range)?);
        }
        if let Some(epochs) = overrides.epochs {
            self.epochs = epochs;
        }
        if !overrides.strategies.is_empty() {
            self.strategies = overrides
                .strategies
                .iter()
                .map(|s| s.parse().map_err(CliError::config))
                .collect::<CliResult<_>>()?;
        }
        if let Some(n) = overrides.batch_size {
            self.batching = BatchPolicy::Count(n);
        }
        if let Some(budget) = overrides.frame_budget {
            self.batching = BatchPolicy::FrameBudget {
                budget,
                mode: overrides.budget_mode.unwrap_or_default(),
            };
        } else if let Some(mode) = overrides.budget_mode {
            match &mut self.batching {
                BatchPolicy::FrameBudget { mode: m, .. } => *m = mode,
                BatchPolicy::Count(_) => {
                    return Err(CliError::Config(
                        "--budget-mode needs a frame budget".into(),
                    ))
                }
            }
        }
        if let Some(chunk) = overrides.chunk_size {
            self.chunk_size = Some(chunk);
        }
        Ok(())
    }

    /// Checks everything that does not depend on corpus contents.
    pub fn validate(&self) -> CliResult<()> {
        if self.strategies.is_empty() {
            return Err(CliError::Config("at least one strategy is required".into()));
        }
        if self.seeds()?.is_empty() {
            return Err(CliError::Config("seed list is empty".into()));
        }
        if self.epochs == 0 {
            return Err(CliError::Config("epochs must be at least 1".into()));
        }
        if self.chunk_size == Some(0) {
            return Err(CliError::Config("chunk_size must be at least 1".into()));
        }
        match self.batching {
            BatchPolicy::Count(0) => {
                return Err(CliError::Config("batch size must be at least 1".into()))
            }
            BatchPolicy::FrameBudget { budget: 0, .. } => {
                return Err(CliError::Config("frame budget must be at least 1".into()))
            }
            _ => {}
        }
        self.cost_model.validate().map_err(CliError::config)?;
        match &self.corpus {
            CorpusSource::Manifest(path) if !path.exists() => Err(CliError::Config(format!(
                "manifest {} does not exist",
                path.display()
            ))),
            CorpusSource::Synthetic(src) => src.spec.validate().map_err(CliError::config),
            _ => Ok(()),
        }
    }

    pub fn seeds(&self) -> CliResult<Vec<u64>> {
        self.seeds.resolve()
    }

    /// The unchunked corpus a run with `seed` starts from.
    pub fn source_corpus(&self, seed: u64) -> CliResult<Corpus> {
        match &self.corpus {
            CorpusSource::Manifest(path) => load_manifest(path)
                .map_err(|e| CliError::Config(format!("manifest {}: {e}", path.display()))),
            CorpusSource::Synthetic(src) => {
                generate_synthetic(&src.spec, src.seed.unwrap_or(seed)).map_err(CliError::config)
            }
        }
    }

    /// Source corpus after optional chunking.
    pub fn corpus(&self, seed: u64) -> CliResult<(Corpus, usize)> {
        let source = self.source_corpus(seed)?;
        let utterances = source.len();
        let corpus = match self.chunk_size {
            Some(chunk) => chunk_corpus(&source, chunk).map_err(CliError::config)?,
            None => source,
        };
        Ok((corpus, utterances))
    }
}

/// Flag values that replace config fields when present.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub seeds: Option<String>,
    pub epochs: Option<u64>,
    pub strategies: Vec<String>,
    pub batch_size: Option<usize>,
    pub frame_budget: Option<u64>,
    pub budget_mode: Option<BudgetMode>,
    pub chunk_size: Option<u32>,
}
