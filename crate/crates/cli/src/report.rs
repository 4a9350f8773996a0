//! Report rows, CSV/JSON writers and the plan file schema.
//!
//! Floats in CSV carry 9 significant digits. Detail CSV columns:
//!
//! `strategy,seed,epoch,batch_count,total_real_frames,total_padded_frames,
//! padding_ratio,mean_intra_batch_std,inter_batch_std,max_batch_padded_frames,
//! sim_time,utterances_per_time,peak_memory`

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use seqbatch::metrics::{FieldStats, MetricsReport};
use seqbatch::{BatchPolicy, Corpus, EpochPlan, SimResult, StrategyConfig};

use crate::config::CorpusSource;
use crate::error::{CliError, CliResult};

pub const HEADER: [&str; 13] = [
    "strategy",
    "seed",
    "epoch",
    "batch_count",
    "total_real_frames",
    "total_padded_frames",
    "padding_ratio",
    "mean_intra_batch_std",
    "inter_batch_std",
    "max_batch_padded_frames",
    "sim_time",
    "utterances_per_time",
    "peak_memory",
];

/// Numeric columns, in header order, that summaries aggregate.
pub const NUMERIC_FIELDS: [&str; 10] = [
    "batch_count",
    "total_real_frames",
    "total_padded_frames",
    "padding_ratio",
    "mean_intra_batch_std",
    "inter_batch_std",
    "max_batch_padded_frames",
    "sim_time",
    "utterances_per_time",
    "peak_memory",
];

/// Formats with 9 significant digits: plain notation for moderate
/// magnitudes, scientific otherwise.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let plain = format!("{x:.decimals$}");
        // Rounding can carry into a new digit (9.99999999e2 -> 1000.00000).
        let reparsed: f64 = plain.parse().expect("formatted float");
        let check = format!("{reparsed:.8e}");
        if check[check.find('e').expect("exponent") + 1..]
            == sci[sci.find('e').expect("exponent") + 1..]
        {
            return plain;
        }
    }
    sci
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub strategy: StrategyConfig,
    pub seed: u64,
    pub epoch: u64,
    #[serde(flatten)]
    pub metrics: MetricsReport,
    #[serde(flatten)]
    pub sim: SimResult,
}

impl ReportRow {
    pub fn numeric(&self) -> [f64; 10] {
        let m = self.metrics.values();
        let s = self.sim.values();
        [m[0], m[1], m[2], m[3], m[4], m[5], m[6], s[0], s[1], s[2]]
    }

    pub fn csv_record(&self) -> Vec<String> {
        let m = &self.metrics;
        vec![
            self.strategy.to_string(),
            self.seed.to_string(),
            self.epoch.to_string(),
            m.batch_count.to_string(),
            m.total_real_frames.to_string(),
            m.total_padded_frames.to_string(),
            fmt_sig9(m.padding_ratio),
            fmt_sig9(m.mean_intra_batch_std),
            fmt_sig9(m.inter_batch_std),
            m.max_batch_padded_frames.to_string(),
            fmt_sig9(self.sim.sim_time),
            fmt_sig9(self.sim.utterances_per_time),
            fmt_sig9(self.sim.peak_memory),
        ]
    }
}

pub fn write_rows_csv(path: &Path, rows: &[ReportRow]) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path).map_err(CliError::run)?;
    writer.write_record(HEADER).map_err(CliError::run)?;
    for row in rows {
        writer
            .write_record(row.csv_record())
            .map_err(CliError::run)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a detail CSV back. Floats come back at their printed precision.
pub fn read_rows_csv(path: &Path) -> CliResult<Vec<ReportRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(CliError::run)?;
    let header: Vec<String> = reader
        .headers()
        .map_err(CliError::run)?
        .iter()
        .map(str::to_string)
        .collect();
    if header != HEADER {
        return Err(CliError::Run(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let r = record.map_err(CliError::run)?;
        let int = |k: usize| -> CliResult<u64> {
            r[k].parse()
                .map_err(|_| CliError::Run(format!("bad integer {:?}", &r[k])))
        };
        let float = |k: usize| -> CliResult<f64> {
            r[k].parse()
                .map_err(|_| CliError::Run(format!("bad float {:?}", &r[k])))
        };
        rows.push(ReportRow {
            strategy: r[0].parse().map_err(CliError::run)?,
            seed: int(1)?,
            epoch: int(2)?,
            metrics: MetricsReport {
                batch_count: int(3)?,
                total_real_frames: int(4)?,
                total_padded_frames: int(5)?,
                padding_ratio: float(6)?,
                mean_intra_batch_std: float(7)?,
                inter_batch_std: float(8)?,
                max_batch_padded_frames: int(9)?,
            },
            sim: SimResult {
                sim_time: float(10)?,
                utterances_per_time: float(11)?,
                peak_memory: float(12)?,
            },
        });
    }
    Ok(rows)
}

/// Seed-aggregated statistics for one strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub strategy: StrategyConfig,
    pub runs: usize,
    pub fields: Vec<(String, FieldStats)>,
}

impl SummaryRow {
    pub fn mean(&self, field: &str) -> Option<f64> {
        self.fields
            .iter()
            .find(|(f, _)| f == field)
            .map(|(_, s)| s.mean)
    }
}

/// One summary row per strategy, in first-appearance order.
pub fn summarize(rows: &[ReportRow]) -> CliResult<Vec<SummaryRow>> {
    let mut strategies: Vec<&StrategyConfig> = Vec::new();
    for row in rows {
        if !strategies.contains(&&row.strategy) {
            strategies.push(&row.strategy);
        }
    }
    strategies
        .into_iter()
        .map(|strategy| {
            let mine: Vec<[f64; 10]> = rows
                .iter()
                .filter(|r| &r.strategy == strategy)
                .map(ReportRow::numeric)
                .collect();
            let fields = NUMERIC_FIELDS
                .iter()
                .enumerate()
                .map(|(k, name)| {
                    let column: Vec<f64> = mine.iter().map(|v| v[k]).collect();
                    FieldStats::from_values(&column)
                        .map(|stats| ((*name).to_string(), stats))
                        .map_err(CliError::run)
                })
                .collect::<CliResult<_>>()?;
            Ok(SummaryRow {
                strategy: strategy.clone(),
                runs: mine.len(),
                fields,
            })
        })
        .collect()
}

pub fn write_summary_csv(path: &Path, summary: &[SummaryRow]) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path).map_err(CliError::run)?;
    let mut header = vec!["strategy".to_string(), "runs".to_string()];
    for field in NUMERIC_FIELDS {
        header.push(format!("{field}_mean"));
        header.push(format!("{field}_std"));
    }
    writer.write_record(&header).map_err(CliError::run)?;
    for row in summary {
        let mut record = vec![row.strategy.to_string(), row.runs.to_string()];
        for (_, stats) in &row.fields {
            record.push(fmt_sig9(stats.mean));
            record.push(fmt_sig9(stats.std));
        }
        writer.write_record(&record).map_err(CliError::run)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(CliError::run)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// What the plan records about how it was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSnapshot {
    pub corpus: CorpusSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chunk_size: Option<u32>,
    pub batching: BatchPolicy,
}

/// On-disk plan: batches as index lists; cost fields are recomputed on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub strategy: StrategyConfig,
    pub seed: u64,
    pub epoch: u64,
    pub config: PlanSnapshot,
    pub batches: Vec<Vec<usize>>,
}

impl PlanFile {
    pub fn new(plan: &EpochPlan, snapshot: PlanSnapshot) -> Self {
        Self {
            strategy: plan.strategy.clone(),
            seed: plan.seed,
            epoch: plan.epoch,
            config: snapshot,
            batches: plan.batches.iter().map(|b| b.members.clone()).collect(),
        }
    }

    pub fn file_name(strategy: &StrategyConfig, seed: u64, epoch: u64) -> String {
        format!("{}_{seed}_{epoch}.plan.json", strategy.label())
    }

    /// Compact JSON, one document per file, newline-terminated.
    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut file = std::fs::File::create(path)?;
        serde_json::to_writer(&mut file, self).map_err(CliError::run)?;
        file.write_all(b"\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(CliError::run)
    }

    pub fn to_plan(&self, corpus: &Corpus) -> CliResult<EpochPlan> {
        EpochPlan::from_members(
            self.batches.clone(),
            corpus,
            self.strategy.clone(),
            self.config.batching.clone(),
            self.seed,
            self.epoch,
        )
        .map_err(CliError::run)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_sig9(0.0), "0");
        assert_eq!(fmt_sig9(0.2), "0.200000000");
        assert_eq!(fmt_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_sig9(123456.789012), "123456.789");
        assert_eq!(fmt_sig9(999999999.7), "1.00000000e9");
        assert_eq!(fmt_sig9(0.00202412345678), "0.00202412346");
        assert_eq!(fmt_sig9(1.5e-7), "1.50000000e-7");
        assert_eq!(fmt_sig9(-2.5), "-2.50000000");
        assert_eq!(fmt_sig9(9.999999999), "10.0000000");
    }

    #[test]
    fn formatted_floats_parse_back_stably() {
        for x in [0.1, 2.0 / 3.0, 4995.123456789, 1e-9, 7.25e12, 0.002023999] {
            let once = fmt_sig9(x);
            let back: f64 = once.parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-8, "{x} -> {once}");
            assert_eq!(fmt_sig9(back), once);
        }
    }

    #[test]
    fn plan_file_names() {
        let s: StrategyConfig = "alternated:64".parse().unwrap();
        assert_eq!(PlanFile::file_name(&s, 3, 0), "alternated-64_3_0.plan.json");
    }
}
