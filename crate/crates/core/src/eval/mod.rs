//! Metrics, statistical tests, the random cross-validation protocol and the
//! benchmark runner.

mod benchmark;
mod cv;
mod metrics;
mod report;
mod stats;

use thiserror::Error;

use crate::embeddings::EmbeddingError;
use crate::learners::LearnerError;
use crate::ssl::SslError;

pub use benchmark::{
    aggregate, best_combinations, comparisons, draw_splits, model_seed, prepare_cell, run_benchmark, Aggregate,
    BenchmarkReport, BenchmarkSettings, BestCombination, Comparison, MetricsRecord, PreparedCell, SemanticModel,
    SplitSummary, Variant, VariantToggles,
};
pub use cv::{cv_sample, CvMode, CvSplit, Draw, SampleScope};
pub use metrics::{auc, auc_binary, auc_multiclass, average_ranks, cohens_kappa, f1_weighted};
pub use report::{box_plot_svg, file_stem, five_numbers, read_report, records_csv, summary_text, write_report_files};
pub use stats::{min_sample_size, wilcoxon_signed_rank, PMethod, Wilcoxon, EXACT_MAX_N};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("only one class present")]
    SingleClass,
    #[error("no non-zero paired differences")]
    TooFewPairs,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Ssl(#[from] SslError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
}
