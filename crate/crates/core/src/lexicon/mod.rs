//! Merged affective / lexico-semantic lexicons keyed by stem.
//!
//! Source lexicons share one CSV layout: a `word` column followed by any
//! subset of `<dim>_mean` / `<dim>_sd` columns. Rows are keyed by the stem of
//! `word`; when several rows (from any source) share a stem, each dimension
//! keeps the arithmetic mean of the values contributed for it.

mod features;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::textproc::{preprocess, StopWords};

pub use features::{extract_features, spearman, GamFeatures, FEATURE_NAMES, N_FEATURES};

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad lexicon header: {0}")]
    Header(String),
    #[error("row {row}: cannot parse {column} value {value:?}")]
    Value {
        row: usize,
        column: String,
        value: String,
    },
    #[error("{word:?}: {dimension} {kind} {value} outside [{lo}, {hi}]")]
    Range {
        word: String,
        dimension: &'static str,
        kind: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Valence,
    Arousal,
    Happiness,
    Anger,
    Sadness,
    Fear,
    Disgust,
    Concreteness,
    Imageability,
    ContextAvailability,
}

impl Dimension {
    pub const ALL: [Dimension; 10] = [
        Dimension::Valence,
        Dimension::Arousal,
        Dimension::Happiness,
        Dimension::Anger,
        Dimension::Sadness,
        Dimension::Fear,
        Dimension::Disgust,
        Dimension::Concreteness,
        Dimension::Imageability,
        Dimension::ContextAvailability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Valence => "valence",
            Dimension::Arousal => "arousal",
            Dimension::Happiness => "happiness",
            Dimension::Anger => "anger",
            Dimension::Sadness => "sadness",
            Dimension::Fear => "fear",
            Dimension::Disgust => "disgust",
            Dimension::Concreteness => "concreteness",
            Dimension::Imageability => "imageability",
            Dimension::ContextAvailability => "context_availability",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Valid range of mean ratings.
    pub fn range(self) -> (f64, f64) {
        match self {
            Dimension::Happiness
            | Dimension::Anger
            | Dimension::Sadness
            | Dimension::Fear
            | Dimension::Disgust => (1.0, 5.0),
            _ => (1.0, 9.0),
        }
    }

    fn from_name(name: &str) -> Option<Dimension> {
        Dimension::ALL.into_iter().find(|d| d.name() == name)
    }
}

/// Per-dimension `(mean, sd)` ratings; any dimension may be absent.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Ratings {
    pub mean: [Option<f64>; 10],
    pub sd: [Option<f64>; 10],
}

impl Ratings {
    pub fn mean(&self, d: Dimension) -> Option<f64> {
        self.mean[d.index()]
    }

    pub fn sd(&self, d: Dimension) -> Option<f64> {
        self.sd[d.index()]
    }

    pub fn set(&mut self, d: Dimension, mean: Option<f64>, sd: Option<f64>) {
        self.mean[d.index()] = mean;
        self.sd[d.index()] = sd;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub word: String,
    pub ratings: Ratings,
}

impl LexiconEntry {
    pub fn validate(&self) -> Result<(), LexiconError> {
        for d in Dimension::ALL {
            let (lo, hi) = d.range();
            if let Some(m) = self.ratings.mean(d) {
                if !(lo..=hi).contains(&m) {
                    return Err(LexiconError::Range {
                        word: self.word.clone(),
                        dimension: d.name(),
                        kind: "mean",
                        value: m,
                        lo,
                        hi,
                    });
                }
            }
            if let Some(s) = self.ratings.sd(d) {
                if !(s >= 0.0 && s.is_finite()) {
                    return Err(LexiconError::Range {
                        word: self.word.clone(),
                        dimension: d.name(),
                        kind: "sd",
                        value: s,
                        lo: 0.0,
                        hi: f64::INFINITY,
                    });
                }
            }
        }
        Ok(())
    }
}

/// One source lexicon as read from disk.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LexiconTable {
    pub name: String,
    pub entries: Vec<LexiconEntry>,
}

enum Column {
    Mean(Dimension),
    Sd(Dimension),
}

pub fn parse_lexicon_csv(name: &str, reader: impl std::io::Read) -> Result<LexiconTable, LexiconError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.get(0) != Some("word") {
        return Err(LexiconError::Header("first column must be `word`".into()));
    }
    let mut columns = Vec::new();
    for h in headers.iter().skip(1) {
        let col = if let Some(d) = h.strip_suffix("_mean").and_then(Dimension::from_name) {
            Column::Mean(d)
        } else if let Some(d) = h.strip_suffix("_sd").and_then(Dimension::from_name) {
            Column::Sd(d)
        } else {
            return Err(LexiconError::Header(format!("unknown column {h:?}")));
        };
        columns.push((h.to_string(), col));
    }
    let mut entries = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let word = rec.get(0).unwrap_or("").to_lowercase();
        if word.is_empty() {
            continue;
        }
        let mut ratings = Ratings::default();
        for ((header, col), raw) in columns.iter().zip(rec.iter().skip(1)) {
            if raw.is_empty() {
                continue;
            }
            let v: f64 = raw.parse().map_err(|_| LexiconError::Value {
                row: row + 2,
                column: header.clone(),
                value: raw.to_string(),
            })?;
            match col {
                Column::Mean(d) => ratings.mean[d.index()] = Some(v),
                Column::Sd(d) => ratings.sd[d.index()] = Some(v),
            }
        }
        let entry = LexiconEntry { word, ratings };
        entry.validate()?;
        entries.push(entry);
    }
    Ok(LexiconTable {
        name: name.to_string(),
        entries,
    })
}

pub fn load_lexicon_csv(path: impl AsRef<Path>) -> Result<LexiconTable, LexiconError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| LexiconError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_lexicon_csv(&name, file)
}

/// Stem-indexed lexicon with duplicates averaged per dimension.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MergedLexicon {
    pub entries: BTreeMap<String, Ratings>,
}

#[derive(Default)]
struct Accum {
    sum: f64,
    n: usize,
}

impl Accum {
    fn push(&mut self, v: f64) {
        self.sum += v;
        self.n += 1;
    }

    fn mean(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }
}

pub fn merge_lexicons(
    sources: &[LexiconTable],
    stemmer: impl Fn(&str) -> String,
) -> Result<MergedLexicon, LexiconError> {
    let mut acc: BTreeMap<String, Vec<(Accum, Accum)>> = BTreeMap::new();
    for table in sources {
        for entry in &table.entries {
            entry.validate()?;
            let slot = acc
                .entry(stemmer(&entry.word))
                .or_insert_with(|| (0..10).map(|_| Default::default()).collect());
            for d in Dimension::ALL {
                if let Some(m) = entry.ratings.mean(d) {
                    slot[d.index()].0.push(m);
                }
                if let Some(s) = entry.ratings.sd(d) {
                    slot[d.index()].1.push(s);
                }
            }
        }
    }
    let entries = acc
        .into_iter()
        .map(|(stem, dims)| {
            let mut r = Ratings::default();
            for (i, (m, s)) in dims.iter().enumerate() {
                r.mean[i] = m.mean();
                r.sd[i] = s.mean();
            }
            (stem, r)
        })
        .collect();
    Ok(MergedLexicon { entries })
}

impl MergedLexicon {
    pub fn lookup(&self, stem: &str) -> Option<&Ratings> {
        self.entries.get(stem)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageMode {
    /// Distinct stems found / distinct stems.
    Types,
    /// Matched token occurrences / all token occurrences.
    Tokens,
}

impl std::str::FromStr for CoverageMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "types" => Ok(CoverageMode::Types),
            "tokens" => Ok(CoverageMode::Tokens),
            _ => Err(format!("unknown coverage mode {s:?} (expected types|tokens)")),
        }
    }
}

/// Fraction of the corpus vocabulary (stopwords removed, stemmed) present in
/// the lexicon.
pub fn coverage(corpus: &Corpus, lex: &MergedLexicon, stopwords: &StopWords, mode: CoverageMode) -> f64 {
    let processed: Vec<_> = corpus.sonnets.iter().map(|s| preprocess(s, stopwords)).collect();
    let stems = processed.iter().flat_map(|p| p.tokens.iter().map(|t| t.stem.as_str()));
    match mode {
        CoverageMode::Types => {
            let distinct: BTreeSet<&str> = stems.collect();
            if distinct.is_empty() {
                return 0.0;
            }
            let found = distinct.iter().filter(|s| lex.lookup(s).is_some()).count();
            found as f64 / distinct.len() as f64
        }
        CoverageMode::Tokens => {
            let (mut found, mut total) = (0usize, 0usize);
            for s in stems {
                total += 1;
                if lex.lookup(s).is_some() {
                    found += 1;
                }
            }
            if total == 0 {
                0.0
            } else {
                found as f64 / total as f64
            }
        }
    }
}
