//! Sonnet corpus ingestion, validation, filtering and descriptive statistics.
//!
//! The on-disk format is a single JSON document:
//!
//! ```json
//! {"sonnets": [{"id": "s1", "author": "...", "period": "XVI", "title": "...",
//!               "source": "DISCO_PAL", "stanzas": [["line", ...], ...]}],
//!  "annotations": {"s1": {"psychological": {"solitude": 1, ...},
//!                         "scaled": {"valence": 3, ...}}}}
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::textproc::{tokenize, StopWords};

/// The 21 binary psychological categories.
pub const PSYCHOLOGICAL: [&str; 21] = [
    "solitude",
    "anxiety",
    "illusion",
    "anger",
    "daydream",
    "instability",
    "grandeur",
    "idealization",
    "pride",
    "depression",
    "irritability",
    "disappointment",
    "dramatisation",
    "prejudice",
    "aversion",
    "insecurity",
    "helplessness",
    "vulnerability",
    "fear",
    "obsession",
    "compulsion",
];

/// The 10 affective and lexico-semantic categories rated 1..4.
pub const SCALED: [&str; 10] = [
    "valence",
    "arousal",
    "happiness",
    "disgust",
    "anger",
    "sadness",
    "fear",
    "concreteness",
    "imageability",
    "context_availability",
];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed corpus file: {0}")]
    Parse(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("duplicate sonnet id {0:?}")]
    DuplicateId(String),
    #[error("unknown category {0:?}")]
    UnknownCategory(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Source {
    #[serde(rename = "DISCO")]
    Disco,
    #[serde(rename = "DISCO_PAL")]
    DiscoPal,
    #[serde(rename = "XX_EXTENSION")]
    XxExtension,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sonnet {
    pub id: String,
    pub author: String,
    pub period: String,
    pub title: String,
    pub source: Source,
    pub stanzas: Vec<Vec<String>>,
}

impl Sonnet {
    pub fn lines(&self) -> impl Iterator<Item = &str> {
        self.stanzas.iter().flatten().map(String::as_str)
    }

    pub fn stanza_shape(&self) -> Vec<usize> {
        self.stanzas.iter().map(Vec::len).collect()
    }

    pub fn text(&self) -> String {
        self.lines().collect::<Vec<_>>().join("\n")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationSet {
    pub psychological: BTreeMap<String, u8>,
    pub scaled: BTreeMap<String, u8>,
}

impl AnnotationSet {
    pub fn get(&self, cat: &Category) -> Option<u8> {
        match cat.kind {
            CategoryKind::Psychological => self.psychological.get(&cat.name).copied(),
            CategoryKind::Scaled => self.scaled.get(&cat.name).copied(),
        }
    }

    /// Class index of this annotation for `cat` (0-based).
    pub fn class_of(&self, cat: &Category) -> Option<usize> {
        self.get(cat).map(|v| cat.kind.class_index(v))
    }

    fn validate(&self, id: &str) -> Result<(), CorpusError> {
        check_label_map(id, "psychological", &self.psychological, &PSYCHOLOGICAL, 0..=1)?;
        check_label_map(id, "scaled", &self.scaled, &SCALED, 1..=4)
    }
}

fn check_label_map(
    id: &str,
    group: &str,
    map: &BTreeMap<String, u8>,
    names: &[&str],
    range: std::ops::RangeInclusive<u8>,
) -> Result<(), CorpusError> {
    for name in names {
        match map.get(*name) {
            None => {
                return Err(CorpusError::Schema(format!(
                    "annotation {id:?}: missing {group} label {name:?}"
                )))
            }
            Some(v) if !range.contains(v) => {
                return Err(CorpusError::Schema(format!(
                    "annotation {id:?}: {group} label {name:?} = {v} outside {}..={}",
                    range.start(),
                    range.end()
                )))
            }
            Some(_) => {}
        }
    }
    if let Some(extra) = map.keys().find(|k| !names.contains(&k.as_str())) {
        return Err(CorpusError::Schema(format!(
            "annotation {id:?}: unknown {group} label {extra:?}"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CategoryKind {
    Psychological,
    Scaled,
}

impl CategoryKind {
    pub fn n_classes(self) -> usize {
        match self {
            CategoryKind::Psychological => 2,
            CategoryKind::Scaled => 4,
        }
    }

    pub fn class_index(self, value: u8) -> usize {
        match self {
            CategoryKind::Psychological => value as usize,
            CategoryKind::Scaled => value as usize - 1,
        }
    }

    pub fn class_value(self, index: usize) -> u8 {
        match self {
            CategoryKind::Psychological => index as u8,
            CategoryKind::Scaled => index as u8 + 1,
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            CategoryKind::Psychological => "psychological",
            CategoryKind::Scaled => "scaled",
        }
    }
}

/// A target category, written `psychological.<name>` or `scaled.<name>`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Category {
    pub kind: CategoryKind,
    pub name: String,
}

impl Category {
    pub fn all() -> Vec<Category> {
        let psy = PSYCHOLOGICAL.iter().map(|n| Category {
            kind: CategoryKind::Psychological,
            name: n.to_string(),
        });
        let sc = SCALED.iter().map(|n| Category {
            kind: CategoryKind::Scaled,
            name: n.to_string(),
        });
        psy.chain(sc).collect()
    }

    pub fn n_classes(&self) -> usize {
        self.kind.n_classes()
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.kind.prefix(), self.name)
    }
}

impl FromStr for Category {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, name) = s
            .split_once('.')
            .ok_or_else(|| CorpusError::UnknownCategory(s.to_string()))?;
        let (kind, names): (_, &[&str]) = match kind {
            "psychological" => (CategoryKind::Psychological, &PSYCHOLOGICAL),
            "scaled" => (CategoryKind::Scaled, &SCALED),
            _ => return Err(CorpusError::UnknownCategory(s.to_string())),
        };
        if !names.contains(&name) {
            return Err(CorpusError::UnknownCategory(s.to_string()));
        }
        Ok(Category {
            kind,
            name: name.to_string(),
        })
    }
}

impl Serialize for Category {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Category {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corpus {
    pub sonnets: Vec<Sonnet>,
    #[serde(default)]
    pub annotations: BTreeMap<String, AnnotationSet>,
}

impl Corpus {
    /// Validates every invariant and NFC-normalizes text fields.
    pub fn validated(mut self) -> Result<Self, CorpusError> {
        let mut seen = BTreeSet::new();
        for s in &mut self.sonnets {
            s.id = s.id.nfc().collect();
            if s.id.trim().is_empty() {
                return Err(CorpusError::Schema("sonnet with empty id".into()));
            }
            if !seen.insert(s.id.clone()) {
                return Err(CorpusError::DuplicateId(s.id.clone()));
            }
            for line in s.stanzas.iter_mut().flatten() {
                *line = line.nfc().collect();
                if line.trim().is_empty() {
                    return Err(CorpusError::Schema(format!(
                        "sonnet {:?} contains an empty line",
                        s.id
                    )));
                }
            }
            s.author = s.author.nfc().collect();
            s.title = s.title.nfc().collect();
            s.period = s.period.nfc().collect();
        }
        let annotations = std::mem::take(&mut self.annotations);
        for (id, ann) in annotations {
            let id: String = id.nfc().collect();
            if !seen.contains(&id) {
                return Err(CorpusError::Schema(format!(
                    "annotation for unknown sonnet {id:?}"
                )));
            }
            ann.validate(&id)?;
            self.annotations.insert(id, ann);
        }
        Ok(self)
    }

    pub fn get(&self, id: &str) -> Option<&Sonnet> {
        self.sonnets.iter().find(|s| s.id == id)
    }

    pub fn ids(&self) -> Vec<String> {
        self.sonnets.iter().map(|s| s.id.clone()).collect()
    }

    pub fn annotated_ids(&self) -> Vec<String> {
        self.sonnets
            .iter()
            .filter(|s| self.annotations.contains_key(&s.id))
            .map(|s| s.id.clone())
            .collect()
    }

    /// Concatenates corpora, rejecting duplicate ids across parts.
    pub fn merge(parts: Vec<Corpus>) -> Result<Corpus, CorpusError> {
        let mut out = Corpus::default();
        for p in parts {
            out.sonnets.extend(p.sonnets);
            out.annotations.extend(p.annotations);
        }
        out.validated()
    }
}

pub fn parse_corpus(text: &str) -> Result<Corpus, CorpusError> {
    let corpus: Corpus = serde_json::from_str(text).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => CorpusError::Schema(e.to_string()),
        _ => CorpusError::Parse(e.to_string()),
    })?;
    corpus.validated()
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_corpus(&text)
}

pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(corpus).expect("corpus serializes");
    std::fs::write(path, text).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Keeps only single-part sonnets: four stanzas of 4, 4, 3 and 3 lines.
pub fn filter_single_part(corpus: &Corpus) -> Corpus {
    let sonnets: Vec<Sonnet> = corpus
        .sonnets
        .iter()
        .filter(|s| s.stanza_shape() == [4, 4, 3, 3])
        .cloned()
        .collect();
    let kept: BTreeSet<&str> = sonnets.iter().map(|s| s.id.as_str()).collect();
    let annotations = corpus
        .annotations
        .iter()
        .filter(|(id, _)| kept.contains(id.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    Corpus {
        sonnets,
        annotations,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SonnetWordCount {
    pub id: String,
    pub with_stopwords: usize,
    pub without_stopwords: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub per_sonnet: Vec<SonnetWordCount>,
    pub mean_with: f64,
    pub std_with: f64,
    pub mean_without: f64,
    pub std_without: f64,
    pub per_period: BTreeMap<String, usize>,
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Century bucket for a free-form period label: the first Roman numeral
/// token found in it, otherwise the trimmed upper-cased label.
pub fn century_bucket(label: &str) -> String {
    let upper = label.trim().to_uppercase();
    upper
        .split(|c: char| !c.is_ascii_alphanumeric())
        .find(|tok| !tok.is_empty() && tok.chars().all(|c| "IVXLC".contains(c)))
        .map(str::to_string)
        .unwrap_or(upper)
}

pub fn corpus_stats(corpus: &Corpus, stopwords: &StopWords) -> CorpusStats {
    let per_sonnet: Vec<SonnetWordCount> = corpus
        .sonnets
        .iter()
        .map(|s| {
            let tokens: Vec<String> = s.lines().flat_map(tokenize).collect();
            let without = tokens.iter().filter(|t| !stopwords.contains(t)).count();
            SonnetWordCount {
                id: s.id.clone(),
                with_stopwords: tokens.len(),
                without_stopwords: without,
            }
        })
        .collect();
    let with: Vec<f64> = per_sonnet.iter().map(|c| c.with_stopwords as f64).collect();
    let without: Vec<f64> = per_sonnet.iter().map(|c| c.without_stopwords as f64).collect();
    let (mean_with, std_with) = mean_std(&with);
    let (mean_without, std_without) = mean_std(&without);
    let mut per_period = BTreeMap::new();
    for s in &corpus.sonnets {
        *per_period.entry(century_bucket(&s.period)).or_insert(0) += 1;
    }
    CorpusStats {
        per_sonnet,
        mean_with,
        std_with,
        mean_without,
        std_without,
        per_period,
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    pub fn full_annotation(psy: u8, scaled: u8) -> AnnotationSet {
        AnnotationSet {
            psychological: PSYCHOLOGICAL.iter().map(|n| (n.to_string(), psy)).collect(),
            scaled: SCALED.iter().map(|n| (n.to_string(), scaled)).collect(),
        }
    }

    pub fn sonnet(id: &str, shape: &[usize]) -> Sonnet {
        Sonnet {
            id: id.to_string(),
            author: "Anónimo".into(),
            period: "XVI".into(),
            title: format!("Soneto {id}"),
            source: Source::Disco,
            stanzas: shape
                .iter()
                .map(|n| (0..*n).map(|i| format!("verso número {i}")).collect())
                .collect(),
        }
    }
}
