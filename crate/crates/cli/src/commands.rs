//! Subcommand implementations. Each returns its results as values and writes
//! its files under the configured output directory.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use seqbatch::metrics::evaluate;
use seqbatch::scheduling::{monotone_runs, same_bin_probability, ProbabilityEstimate};
use seqbatch::simulator::simulate_for;
use seqbatch::{Corpus, EpochPlan, StrategyConfig, StrategyTag};

use crate::config::{CorpusSource, RunConfig};
use crate::error::{CliError, CliResult};
use crate::report::{
    summarize, write_json, write_rows_csv, write_summary_csv, PlanFile, PlanSnapshot, ReportRow,
    SummaryRow,
};

pub const COMPARE_CSV: &str = "compare.csv";
pub const SUMMARY_CSV: &str = "compare_summary.csv";
pub const COMPARE_JSON: &str = "compare.json";
pub const TRACE_CSV: &str = "trace.csv";

/// Corpus for one run seed, with the utterance count before chunking.
struct SeedCorpus {
    seed: u64,
    corpus: Corpus,
    utterances: usize,
}

/// One planned (strategy, seed, epoch) cell of a sweep.
pub struct PlannedRun {
    pub strategy: StrategyConfig,
    pub seed: u64,
    pub epoch: u64,
    pub plan: EpochPlan,
}

fn load_corpora(config: &RunConfig, seeds: &[u64]) -> CliResult<Vec<SeedCorpus>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let (corpus, utterances) = config.corpus(seed)?;
            Ok(SeedCorpus {
                seed,
                corpus,
                utterances,
            })
        })
        .collect()
}

fn plan_one(
    config: &RunConfig,
    strategy: &StrategyConfig,
    sc: &SeedCorpus,
    epoch: u64,
) -> CliResult<EpochPlan> {
    strategy
        .plan(&sc.corpus, &config.batching, sc.seed, epoch)
        .map_err(|e| CliError::Run(format!("planning failed (seed {}): {e}", sc.seed)))
}

/// Plans every (strategy, seed, epoch) combination, in that nesting order.
fn sweep<T: Send>(
    config: &RunConfig,
    corpora: &[SeedCorpus],
    f: impl Fn(&SeedCorpus, PlannedRun) -> CliResult<T> + Sync,
) -> CliResult<Vec<T>> {
    let mut cells = Vec::new();
    for strategy in &config.strategies {
        for sc in corpora {
            for epoch in 0..config.epochs {
                cells.push((strategy, sc, epoch));
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(strategy, sc, epoch)| {
            let plan = plan_one(config, strategy, sc, epoch)?;
            f(
                sc,
                PlannedRun {
                    strategy: strategy.clone(),
                    seed: sc.seed,
                    epoch,
                    plan,
                },
            )
        })
        .collect()
}

fn prepare(config: &RunConfig) -> CliResult<Vec<SeedCorpus>> {
    config.validate()?;
    let seeds = config.seeds()?;
    std::fs::create_dir_all(&config.out)?;
    load_corpora(config, &seeds)
}

fn snapshot(config: &RunConfig) -> PlanSnapshot {
    PlanSnapshot {
        corpus: config.corpus.clone(),
        chunk_size: config.chunk_size,
        batching: config.batching.clone(),
    }
}

/// Writes one plan file per (strategy, seed, epoch); returns their paths.
pub fn cmd_plan(config: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let corpora = prepare(config)?;
    let snap = snapshot(config);
    sweep(config, &corpora, |_, run| {
        let path = config
            .out
            .join(PlanFile::file_name(&run.strategy, run.seed, run.epoch));
        PlanFile::new(&run.plan, snap.clone()).write(&path)?;
        Ok(path)
    })
}

/// Metrics and simulated cost for every plan of the sweep.
pub fn evaluate_sweep(config: &RunConfig) -> CliResult<Vec<ReportRow>> {
    config.validate()?;
    let corpora = load_corpora(config, &config.seeds()?)?;
    rows_for(config, &corpora)
}

fn rows_for(config: &RunConfig, corpora: &[SeedCorpus]) -> CliResult<Vec<ReportRow>> {
    sweep(config, corpora, |sc, run| {
        let metrics = evaluate(&run.plan, &sc.corpus).map_err(CliError::run)?;
        let sim =
            simulate_for(&run.plan, &config.cost_model, sc.utterances).map_err(CliError::run)?;
        Ok(ReportRow {
            strategy: run.strategy,
            seed: run.seed,
            epoch: run.epoch,
            metrics,
            sim,
        })
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub config: RunConfig,
    pub rows: Vec<ReportRow>,
    pub summary: Vec<SummaryRow>,
}

/// Detail rows, per-strategy summary, and the JSON bundle of both.
pub fn cmd_compare(config: &RunConfig) -> CliResult<CompareReport> {
    if config.strategies.len() < 2 {
        return Err(CliError::Config(
            "compare needs at least two strategies".into(),
        ));
    }
    let corpora = prepare(config)?;
    let rows = rows_for(config, &corpora)?;
    let summary = summarize(&rows)?;
    write_rows_csv(&config.out.join(COMPARE_CSV), &rows)?;
    write_summary_csv(&config.out.join(SUMMARY_CSV), &summary)?;
    let report = CompareReport {
        config: config.clone(),
        rows,
        summary,
    };
    write_json(&config.out.join(COMPARE_JSON), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSeries {
    pub strategy: StrategyConfig,
    pub lengths: Vec<u32>,
}

impl TraceSeries {
    pub fn run_count(&self) -> usize {
        monotone_runs(&self.lengths).len()
    }
}

/// Length-by-position series for every strategy on the first seed, epoch 0.
/// Bucketing is traced through its realized batch sequence.
pub fn cmd_trace(config: &RunConfig) -> CliResult<Vec<TraceSeries>> {
    config.validate()?;
    let seed = config.seeds()?[0];
    std::fs::create_dir_all(&config.out)?;
    let corpora = load_corpora(config, &[seed])?;
    let sc = &corpora[0];
    let series = config
        .strategies
        .iter()
        .map(|strategy| {
            let plan = plan_one(config, strategy, sc, 0)?;
            Ok(TraceSeries {
                strategy: strategy.clone(),
                lengths: plan
                    .flattened()
                    .into_iter()
                    .map(|i| sc.corpus.length(i))
                    .collect(),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;

    let path = config.out.join(TRACE_CSV);
    let mut writer = csv::Writer::from_path(&path).map_err(CliError::run)?;
    writer
        .write_record(["strategy", "position", "length"])
        .map_err(CliError::run)?;
    for s in &series {
        let name = s.strategy.to_string();
        for (pos, len) in s.lengths.iter().enumerate() {
            writer
                .write_record([name.as_str(), &pos.to_string(), &len.to_string()])
                .map_err(CliError::run)?;
        }
    }
    writer.flush()?;
    Ok(series)
}

/// Reads a trace CSV back into per-strategy series, in file order.
pub fn read_trace(path: &std::path::Path) -> CliResult<Vec<TraceSeries>> {
    let mut reader = csv::Reader::from_path(path).map_err(CliError::run)?;
    let mut series: Vec<TraceSeries> = Vec::new();
    for record in reader.records() {
        let r = record.map_err(CliError::run)?;
        let strategy: StrategyConfig = r[0].parse().map_err(CliError::run)?;
        let length: u32 = r[2].parse().map_err(CliError::run)?;
        match series.last_mut() {
            Some(s) if s.strategy == strategy => s.lengths.push(length),
            _ => series.push(TraceSeries {
                strategy,
                lengths: vec![length],
            }),
        }
    }
    Ok(series)
}

pub fn trace_notes(series: &[TraceSeries]) -> Vec<String> {
    series
        .iter()
        .map(|s| {
            let mut line = format!(
                "{}: {} points, {} monotone runs",
                s.strategy,
                s.lengths.len(),
                s.run_count()
            );
            if s.strategy.tag() == StrategyTag::Bucketing {
                line.push_str(" (realized batch sequence)");
            }
            line
        })
        .collect()
}

pub fn cmd_probability(
    corpus_size: usize,
    n_bins: usize,
    trials: u64,
    seed: u64,
) -> CliResult<ProbabilityEstimate> {
    same_bin_probability(corpus_size, n_bins, trials, seed).map_err(|e| match e {
        seqbatch::Error::TooManyBins { .. } => CliError::run(e),
        other => CliError::config(other),
    })
}

pub fn probability_text(est: &ProbabilityEstimate) -> String {
    let claimed = match est.claimed {
        Some(c) => format!("{c:.9}"),
        None => "undefined".into(),
    };
    format!(
        "corpus_size {}  n_bins {}  trials {}\n\
         estimate         {:.9}\n\
         standard_error   {:.9}\n\
         exact            {:.9}\n\
         claimed 1/(N(N-1)) {claimed}\n",
        est.corpus_size, est.n_bins, est.trials, est.estimate, est.standard_error, est.exact
    )
}

/// Writes `synthetic_<seed>.tsv` manifests for every configured seed.
pub fn cmd_synth(config: &RunConfig) -> CliResult<Vec<PathBuf>> {
    if !matches!(config.corpus, CorpusSource::Synthetic(_)) {
        return Err(CliError::Config(
            "synth needs a synthetic corpus source".into(),
        ));
    }
    config.validate()?;
    std::fs::create_dir_all(&config.out)?;
    config
        .seeds()?
        .into_iter()
        .map(|seed| {
            let corpus = config.source_corpus(seed)?;
            let path = config.out.join(format!("synthetic_{seed}.tsv"));
            corpus.write_manifest(&path).map_err(CliError::run)?;
            Ok(path)
        })
        .collect()
}
