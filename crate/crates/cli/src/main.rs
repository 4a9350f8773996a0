use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use seqbatch::BudgetMode;
use seqbatch_cli::commands::{
    cmd_compare, cmd_plan, cmd_probability, cmd_synth, cmd_trace, probability_text, trace_notes,
};
use seqbatch_cli::{CliResult, Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "seqbatch",
    version,
    about = "Compare batch-construction strategies for variable-length sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one plan JSON per strategy, seed and epoch.
    Plan(RunArgs),
    /// Evaluate and simulate every plan; write CSV and JSON reports.
    Compare(RunArgs),
    /// Write the length-by-position ordering trace for each strategy.
    Trace(RunArgs),
    /// Estimate how often two sequences share a bin.
    Probability(ProbabilityArgs),
    /// Write synthetic corpora as manifests.
    Synth(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Padded,
    Raw,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run config; the built-in demo config when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,
    /// `a..b` or `a..=b`.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    epochs: Option<u64>,
    /// `random`, `sorted[:desc]`, `bucketing:<width>`, `bucketing:<b1,b2,..>`, `alternated:<bins>`.
    #[arg(long = "strategy")]
    strategies: Vec<String>,
    #[arg(long, conflicts_with = "frame_budget")]
    batch_size: Option<usize>,
    #[arg(long)]
    frame_budget: Option<u64>,
    #[arg(long, value_enum)]
    budget_mode: Option<ModeArg>,
    #[arg(long)]
    chunk_size: Option<u32>,
}

impl RunArgs {
    fn resolve(&self) -> CliResult<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::demo(),
        };
        config.apply(&Overrides {
            out: self.out.clone(),
            seed: self.seed,
            seeds: self.seeds.clone(),
            epochs: self.epochs,
            strategies: self.strategies.clone(),
            batch_size: self.batch_size,
            frame_budget: self.frame_budget,
            budget_mode: self.budget_mode.map(|m| match m {
                ModeArg::Padded => BudgetMode::Padded,
                ModeArg::Raw => BudgetMode::Raw,
            }),
            chunk_size: self.chunk_size,
        })?;
        Ok(config)
    }
}

#[derive(Args)]
struct ProbabilityArgs {
    #[arg(long, default_value_t = 1000)]
    corpus_size: usize,
    #[arg(long)]
    bins: usize,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Plan(args) => {
            let config = args.resolve()?;
            let files = cmd_plan(&config)?;
            println!(
                "wrote {} plan files to {}",
                files.len(),
                config.out.display()
            );
        }
        Command::Compare(args) => {
            let config = args.resolve()?;
            let report = cmd_compare(&config)?;
            println!(
                "{:<22} {:>5} {:>14} {:>20}",
                "strategy", "runs", "padding_ratio", "utterances_per_time"
            );
            for row in &report.summary {
                println!(
                    "{:<22} {:>5} {:>14.6} {:>20.9}",
                    row.strategy.to_string(),
                    row.runs,
                    row.mean("padding_ratio").unwrap_or(f64::NAN),
                    row.mean("utterances_per_time").unwrap_or(f64::NAN),
                );
            }
            println!(
                "wrote {} rows to {}",
                report.rows.len(),
                config.out.display()
            );
        }
        Command::Trace(args) => {
            let config = args.resolve()?;
            for line in trace_notes(&cmd_trace(&config)?) {
                println!("{line}");
            }
        }
        Command::Probability(args) => {
            let est = cmd_probability(args.corpus_size, args.bins, args.trials, args.seed)?;
            print!("{}", probability_text(&est));
        }
        Command::Synth(args) => {
            let config = args.resolve()?;
            for path in cmd_synth(&config)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("seqbatch: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
