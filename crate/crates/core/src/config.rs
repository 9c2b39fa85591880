//! Run configuration, read from TOML.
//!
//! ```toml
//! corpus = ["corpus.json"]            # one or more corpus files, merged
//! lexicons = ["lexicon.csv"]          # one or more lexicon CSVs, merged by stem
//! stopwords = "stopwords.txt"         # optional; bundled Spanish list otherwise
//! output_dir = "out"
//! categories = ["psychological.fear"] # empty or absent: all 31 categories
//! predictive = ["LS-GBDT-RBF"]        # absent: the five semi-supervised models
//! n_repeats = 20
//! n_per_value = 2
//! seed = 7
//! cv_mode = "union"                   # or "per_category"
//! sample_scope = "all"                # or "evaluated"
//! single_part = true                  # drop multi-part sonnets
//! svg = true
//! jobs = 4                            # optional worker count
//!
//! [[semantic]]
//! path = "sentence.jsonl"             # name defaults to the file's model name
//! [[semantic]]
//! name = "tokens-weighted"
//! path = "tokens.jsonl"
//! pooling = "affective"               # token files only: "affective" or "mean"
//!
//! [variants]                          # all default to true
//! no_gam = true
//! disco_only = true
//! baselines = true
//!
//! [gbdt]                              # any GbdtParams field
//! [ssl]                               # any SslParams field
//! ```
//!
//! Relative paths resolve against the directory holding the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Category;
use crate::eval::{BenchmarkSettings, CvMode, SampleScope, VariantToggles};
use crate::learners::GbdtParams;
use crate::ssl::{SslParams, StrategyRegistry, SSL_MODELS};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pooling {
    /// Token vectors weighted by their stem's normalized affective rating.
    #[default]
    Affective,
    /// Plain mean of token vectors.
    Mean,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemanticSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub path: PathBuf,
    #[serde(default)]
    pub pooling: Pooling,
}

fn default_repeats() -> usize {
    20
}
fn default_per_value() -> usize {
    2
}
fn default_true() -> bool {
    true
}
fn default_output() -> PathBuf {
    PathBuf::from("output")
}
fn default_predictive() -> Vec<String> {
    SSL_MODELS.iter().map(|s| s.to_string()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: Vec<PathBuf>,
    #[serde(default)]
    pub lexicons: Vec<PathBuf>,
    #[serde(default)]
    pub stopwords: Option<PathBuf>,
    #[serde(default)]
    pub semantic: Vec<SemanticSpec>,
    #[serde(default = "default_predictive")]
    pub predictive: Vec<String>,
    #[serde(default)]
    pub categories: Vec<Category>,
    #[serde(default = "default_repeats")]
    pub n_repeats: usize,
    #[serde(default = "default_per_value")]
    pub n_per_value: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub cv_mode: CvMode,
    #[serde(default)]
    pub sample_scope: SampleScope,
    #[serde(default)]
    pub variants: VariantToggles,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default = "default_true")]
    pub single_part: bool,
    #[serde(default = "default_true")]
    pub svg: bool,
    #[serde(default)]
    pub gbdt: GbdtParams,
    #[serde(default)]
    pub ssl: SslParams,
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.resolve_paths(base_dir);
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.corpus.iter_mut().for_each(fix);
        self.lexicons.iter_mut().for_each(fix);
        if let Some(p) = self.stopwords.as_mut() {
            fix(p);
        }
        self.semantic.iter_mut().for_each(|s| fix(&mut s.path));
        fix(&mut self.output_dir);
    }

    /// Evaluated categories: the configured list, or all of them.
    pub fn categories(&self) -> Vec<Category> {
        if self.categories.is_empty() {
            Category::all()
        } else {
            self.categories.clone()
        }
    }

    pub fn registry(&self) -> StrategyRegistry {
        StrategyRegistry::builtin(&self.gbdt, &self.ssl)
    }

    /// Checks that referenced input files exist and the model grid is usable.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.corpus.is_empty() {
            return bad("at least one corpus file is required".into());
        }
        let inputs = self
            .corpus
            .iter()
            .chain(&self.lexicons)
            .chain(self.stopwords.iter())
            .chain(self.semantic.iter().map(|s| &s.path));
        for p in inputs {
            if !p.exists() {
                return bad(format!("file not found: {}", p.display()));
            }
        }
        if self.predictive.is_empty() {
            return bad("predictive model list is empty".into());
        }
        let reg = self.registry();
        for m in &self.predictive {
            reg.get(m).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        if self.n_repeats == 0 || self.n_per_value == 0 {
            return bad("n_repeats and n_per_value must be positive".into());
        }
        if self.jobs == Some(0) {
            return bad("jobs must be positive".into());
        }
        self.gbdt.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let s = &self.ssl;
        if !(s.alpha > 0.0 && s.alpha < 1.0) {
            return bad(format!("ssl.alpha must be in (0, 1), got {}", s.alpha));
        }
        if !(s.self_training_threshold > 0.5 && s.self_training_threshold <= 1.0) {
            return bad("ssl.self_training_threshold must be in (0.5, 1]".into());
        }
        if s.knn_k == 0 || s.smote_k == 0 {
            return bad("ssl.knn_k and ssl.smote_k must be positive".into());
        }
        Ok(())
    }

    pub fn benchmark_settings(&self) -> Result<BenchmarkSettings, ConfigError> {
        let reg = self.registry();
        let predictive = self
            .predictive
            .iter()
            .map(|m| reg.canonical(m).map_err(|e| ConfigError::Invalid(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BenchmarkSettings {
            categories: self.categories(),
            predictive,
            n_repeats: self.n_repeats,
            n_per_value: self.n_per_value,
            seed: self.seed,
            cv_mode: self.cv_mode,
            sample_scope: self.sample_scope,
            variants: self.variants.clone(),
            gbdt: self.gbdt.clone(),
            ssl: self.ssl.clone(),
        })
    }

    /// The resolved configuration as JSON, for embedding in reports.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
