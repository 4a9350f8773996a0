//! Seed-swept statistical properties on synthetic lognormal corpora.

use rayon::prelude::*;

use seqbatch::batching::{BatchPolicy, BudgetMode};
use seqbatch::corpus::{chunk_corpus, generate_synthetic, Corpus, SyntheticSpec};
use seqbatch::metrics::evaluate;
use seqbatch::scheduling::StrategyConfig;
use seqbatch::simulator::{simulate, simulate_for, CostModel};

fn demo_corpus(seed: u64) -> Corpus {
    generate_synthetic(&SyntheticSpec::lognormal(1000, 5.3, 0.6), seed).unwrap()
}

const PADDED_5000: BatchPolicy = BatchPolicy::FrameBudget {
    budget: 5000,
    mode: BudgetMode::Padded,
};

const RAW_5000: BatchPolicy = BatchPolicy::FrameBudget {
    budget: 5000,
    mode: BudgetMode::Raw,
};

/// Spearman rank correlation for samples without ties.
fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let rank = |v: &[f64]| -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        for (pos, &i) in idx.iter().enumerate() {
            r[i] = pos as f64;
        }
        r
    };
    let (rx, ry) = (rank(xs), rank(ys));
    let n = xs.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

#[test]
fn sorted_pads_less_than_random() {
    let wins = (0..100u64)
        .into_par_iter()
        .filter(|&seed| {
            let corpus = demo_corpus(seed);
            let policy = BatchPolicy::Count(16);
            let ratio = |config: StrategyConfig| {
                let plan = config.plan(&corpus, &policy, seed, 0).unwrap();
                evaluate(&plan, &corpus).unwrap().padding_ratio
            };
            ratio("sorted".parse().unwrap()) <= ratio(StrategyConfig::Random)
        })
        .count();
    assert!(wins >= 95, "sorted beat random on {wins}/100 seeds");
}

#[test]
fn alternated_moves_toward_random_as_bins_grow() {
    let bins = [1usize, 8, 64, 256];
    let seeds = 0..20u64;
    let mut padding = Vec::new();
    let mut intra = Vec::new();
    for &n in &bins {
        let config = StrategyConfig::alternated(n);
        let reports: Vec<_> = seeds
            .clone()
            .into_par_iter()
            .map(|seed| {
                let corpus = demo_corpus(seed);
                evaluate(
                    &config.plan(&corpus, &PADDED_5000, seed, 0).unwrap(),
                    &corpus,
                )
                .unwrap()
            })
            .collect();
        let k = reports.len() as f64;
        padding.push(reports.iter().map(|r| r.padding_ratio).sum::<f64>() / k);
        intra.push(reports.iter().map(|r| r.mean_intra_batch_std).sum::<f64>() / k);
    }
    let n: Vec<f64> = bins.iter().map(|&b| b as f64).collect();
    assert_eq!(spearman(&n, &padding), 1.0, "padding {padding:?}");
    assert_eq!(spearman(&n, &intra), 1.0, "intra std {intra:?}");
}

#[test]
fn simulated_time_orders_sorted_alternated_random() {
    let model = CostModel::default();
    for seed in 0..5 {
        let corpus = demo_corpus(seed);
        let time = |s: &str| {
            let plan = s
                .parse::<StrategyConfig>()
                .unwrap()
                .plan(&corpus, &PADDED_5000, seed, 0)
                .unwrap();
            simulate(&plan, &model).unwrap().sim_time
        };
        let (sorted, alternated, random) = (time("sorted"), time("alternated:64"), time("random"));
        assert!(
            sorted < alternated && alternated < random,
            "{sorted} {alternated} {random}"
        );
    }
}

#[test]
fn smaller_chunks_train_faster() {
    let chunk_sizes = [10u32, 50, 100, 500];
    let model = CostModel::default();
    // For each seed: throughput at chunk sizes 10, 50, 100, 500, unchunked.
    let per_seed: Vec<Vec<(f64, f64)>> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let corpus = demo_corpus(seed);
            let mut row = Vec::new();
            for chunk in chunk_sizes.iter().copied().map(Some).chain([None]) {
                let input = match chunk {
                    Some(c) => chunk_corpus(&corpus, c).unwrap(),
                    None => corpus.clone(),
                };
                let plan = StrategyConfig::Random
                    .plan(&input, &RAW_5000, seed, 0)
                    .unwrap();
                let sim = simulate_for(&plan, &model, corpus.len()).unwrap();
                row.push((sim.utterances_per_time, sim.peak_memory));
            }
            row
        })
        .collect();
    for step in 0..chunk_sizes.len() {
        let wins = per_seed
            .iter()
            .filter(|row| row[step].0 >= row[step + 1].0)
            .count();
        assert!(
            wins >= 90,
            "step {step}: smaller chunk faster on {wins}/100 seeds"
        );
    }
    for row in &per_seed {
        let full = row[chunk_sizes.len()].1;
        for &(_, memory) in &row[..chunk_sizes.len()] {
            assert!(full >= memory);
        }
    }
}
