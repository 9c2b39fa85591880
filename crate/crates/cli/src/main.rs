//! `sonnet`: preprocessing, lexicon features, embedding pooling, training,
//! prediction and benchmarking for annotated Spanish sonnet corpora.
//!
//! Exit codes: 0 on success, 1 on command-line usage errors, 2 when input
//! data or configuration is invalid.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "sonnet", version, about = "Semi-supervised category inference for Spanish sonnets")]
pub struct Cli {
    /// Log progress (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    /// Run configuration (TOML).
    #[arg(short, long)]
    pub config: PathBuf,
    /// Override the master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CoverageModeArg {
    Types,
    Tokens,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PoolingArg {
    Affective,
    Mean,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tokenize, remove stopwords and stem; writes processed.jsonl and stats.json.
    Preprocess(ConfigArgs),
    /// Compute the 32 lexicon features per sonnet; writes features.csv.
    Features(ConfigArgs),
    /// Pool a token-level embedding file into one vector per sonnet.
    Pool {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Token-level embedding file.
        #[arg(long)]
        input: PathBuf,
        /// Output file name inside the output directory.
        #[arg(long, default_value = "pooled.jsonl")]
        output: String,
        #[arg(long, value_enum, default_value = "affective")]
        pooling: PoolingArg,
    },
    /// Print the fraction of corpus stems found in the lexicon.
    Coverage {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_enum, default_value = "types")]
        mode: CoverageModeArg,
    },
    /// Fit every configured model on all annotated sonnets and save bundles.
    Train(ConfigArgs),
    /// Apply saved model bundles to a corpus file; writes predictions.csv.
    Predict {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Corpus file with the sonnets to label.
        #[arg(long)]
        input: PathBuf,
        /// Extra embedding files covering the new sonnets.
        #[arg(long)]
        embeddings: Vec<PathBuf>,
        /// Bundle directory (default: <output>/models).
        #[arg(long)]
        models: Option<PathBuf>,
    },
    /// Run the repeated cross-validation benchmark.
    Benchmark {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Override the number of repeats.
        #[arg(long)]
        repeats: Option<usize>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Regenerate CSV, summary and plots from a saved report.json.
    Report {
        #[arg(long)]
        input: PathBuf,
        /// Output directory (default: next to the input).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip SVG plots.
        #[arg(long)]
        no_svg: bool,
    },
    /// Write the planted-signal synthetic fixture.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        repeats: usize,
    },
    /// Minimum per-group sample size for a two-sided two-sample comparison.
    Power {
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 0.8)]
        power: f64,
        /// Cohen's d.
        #[arg(long, default_value_t = 0.8)]
        effect: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
