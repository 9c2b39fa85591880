//! Portable embedding files, affective-weighted pooling of token vectors and
//! design-matrix assembly.
//!
//! Embedding files are JSON Lines. The first line is a header
//! `{"model": str, "level": "sentence"|"token", "dim": int}`; each following
//! line is `{"id": str, "vector": [...]}` (sentence level) or
//! `{"id": str, "tokens": [{"t": str, "v": [...]}, ...]}` (token level).
//! Numbers are written with 17 significant digits so reading back reproduces
//! every vector bit for bit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{Dimension, GamFeatures, MergedLexicon, FEATURE_NAMES, N_FEATURES};

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("lexicon is empty")]
    EmptyLexicon,
    #[error("token list is empty")]
    EmptyTokenList,
    #[error("no embedding for {} id(s): {}", .0.len(), .0.join(", "))]
    MissingEmbedding(Vec<String>),
    #[error("no lexicon features for {} id(s): {}", .0.len(), .0.join(", "))]
    MissingFeatures(Vec<String>),
    #[error("vector of length {got} where dim is {dim}")]
    Dim { dim: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Sentence,
    Token,
}

#[derive(Serialize, Deserialize)]
struct Header {
    model: String,
    level: Level,
    dim: usize,
}

#[derive(Deserialize)]
struct SentenceLine {
    id: String,
    vector: Vec<f64>,
}

#[derive(Deserialize)]
struct TokenItem {
    t: String,
    v: Vec<f64>,
}

#[derive(Deserialize)]
struct TokenLine {
    id: String,
    tokens: Vec<TokenItem>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SentenceEmbeddingStore {
    pub model_name: String,
    pub dim: usize,
    pub vectors: BTreeMap<String, Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TokenEmbeddingStore {
    pub model_name: String,
    pub dim: usize,
    pub vectors: BTreeMap<String, Vec<(String, Vec<f64>)>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EmbeddingFile {
    Sentence(SentenceEmbeddingStore),
    Token(TokenEmbeddingStore),
}

impl EmbeddingFile {
    pub fn model_name(&self) -> &str {
        match self {
            EmbeddingFile::Sentence(s) => &s.model_name,
            EmbeddingFile::Token(t) => &t.model_name,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EmbeddingError + '_ {
    move |source| EmbeddingError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn check_dim(dim: usize, v: &[f64], line: usize) -> Result<(), EmbeddingError> {
    if v.len() != dim {
        return Err(EmbeddingError::Format {
            line,
            msg: format!("vector of length {} where dim is {dim}", v.len()),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(EmbeddingError::Format {
            line,
            msg: "non-finite component".into(),
        });
    }
    Ok(())
}

pub fn parse_embeddings(reader: impl BufRead) -> Result<EmbeddingFile, EmbeddingError> {
    let mut lines = reader.lines().enumerate();
    let fmt = |line: usize, msg: String| EmbeddingError::Format { line: line + 1, msg };
    let (_, first) = lines.next().ok_or_else(|| fmt(0, "empty file".into()))?;
    let first = first.map_err(|e| fmt(0, e.to_string()))?;
    let header: Header = serde_json::from_str(&first).map_err(|e| fmt(0, format!("bad header: {e}")))?;
    if header.dim == 0 {
        return Err(fmt(0, "dim must be positive".into()));
    }
    let mut seen = BTreeSet::new();
    let mut sentence = BTreeMap::new();
    let mut token = BTreeMap::new();
    for (i, line) in lines {
        let line = line.map_err(|e| fmt(i, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let id = match header.level {
            Level::Sentence => {
                let rec: SentenceLine = serde_json::from_str(&line).map_err(|e| fmt(i, e.to_string()))?;
                check_dim(header.dim, &rec.vector, i + 1)?;
                sentence.insert(rec.id.clone(), rec.vector);
                rec.id
            }
            Level::Token => {
                let rec: TokenLine = serde_json::from_str(&line).map_err(|e| fmt(i, e.to_string()))?;
                for t in &rec.tokens {
                    check_dim(header.dim, &t.v, i + 1)?;
                }
                token.insert(
                    rec.id.clone(),
                    rec.tokens.into_iter().map(|t| (t.t, t.v)).collect(),
                );
                rec.id
            }
        };
        if !seen.insert(id.clone()) {
            return Err(fmt(i, format!("duplicate id {id:?}")));
        }
    }
    Ok(match header.level {
        Level::Sentence => EmbeddingFile::Sentence(SentenceEmbeddingStore {
            model_name: header.model,
            dim: header.dim,
            vectors: sentence,
        }),
        Level::Token => EmbeddingFile::Token(TokenEmbeddingStore {
            model_name: header.model,
            dim: header.dim,
            vectors: token,
        }),
    })
}

pub fn read_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingFile, EmbeddingError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    parse_embeddings(BufReader::new(file))
}

fn push_vector(out: &mut String, v: &[f64]) {
    out.push('[');
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{x:.16e}");
    }
    out.push(']');
}

fn header_line(model: &str, level: Level, dim: usize) -> String {
    serde_json::to_string(&Header {
        model: model.to_string(),
        level,
        dim,
    })
    .expect("header serializes")
}

pub fn format_sentence_store(store: &SentenceEmbeddingStore) -> String {
    let mut out = header_line(&store.model_name, Level::Sentence, store.dim);
    out.push('\n');
    for (id, v) in &store.vectors {
        let _ = write!(out, "{{\"id\":{},\"vector\":", serde_json::to_string(id).unwrap());
        push_vector(&mut out, v);
        out.push_str("}\n");
    }
    out
}

pub fn format_token_store(store: &TokenEmbeddingStore) -> String {
    let mut out = header_line(&store.model_name, Level::Token, store.dim);
    out.push('\n');
    for (id, toks) in &store.vectors {
        let _ = write!(out, "{{\"id\":{},\"tokens\":[", serde_json::to_string(id).unwrap());
        for (i, (t, v)) in toks.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{{\"t\":{},\"v\":", serde_json::to_string(t).unwrap());
            push_vector(&mut out, v);
            out.push('}');
        }
        out.push_str("]}\n");
    }
    out
}

pub fn write_embeddings(path: impl AsRef<Path>, file: &EmbeddingFile) -> Result<(), EmbeddingError> {
    let path = path.as_ref();
    let text = match file {
        EmbeddingFile::Sentence(s) => format_sentence_store(s),
        EmbeddingFile::Token(t) => format_token_store(t),
    };
    let mut f = std::fs::File::create(path).map_err(io_err(path))?;
    f.write_all(text.as_bytes()).map_err(io_err(path))
}

/// Min-max normalizes every mean dimension across the lexicon and weights
/// each stem by its largest normalized value. Dimensions with zero spread
/// carry no information and are skipped.
pub fn normalize_lexicon(lex: &MergedLexicon) -> Result<BTreeMap<String, f64>, EmbeddingError> {
    if lex.is_empty() {
        return Err(EmbeddingError::EmptyLexicon);
    }
    let mut bounds = [(f64::INFINITY, f64::NEG_INFINITY); 10];
    for r in lex.entries.values() {
        for d in Dimension::ALL {
            if let Some(m) = r.mean(d) {
                let b = &mut bounds[d.index()];
                b.0 = b.0.min(m);
                b.1 = b.1.max(m);
            }
        }
    }
    Ok(lex
        .entries
        .iter()
        .map(|(stem, r)| {
            let w = Dimension::ALL
                .into_iter()
                .filter_map(|d| {
                    let (lo, hi) = bounds[d.index()];
                    let m = r.mean(d)?;
                    (hi > lo).then(|| (m - lo) / (hi - lo))
                })
                .fold(0.0, f64::max);
            (stem.clone(), w)
        })
        .collect())
}

/// Weighted mean pooling: `sum_k v(k) * w(k) / N` over all `N` tokens, where a
/// token's weight is looked up by its stem (0 when absent).
pub fn affective_weighted_pool(
    tokens: &[(String, Vec<f64>)],
    weights: &BTreeMap<String, f64>,
    stemmer: impl Fn(&str) -> String,
) -> Result<Vec<f64>, EmbeddingError> {
    let dim = tokens.first().ok_or(EmbeddingError::EmptyTokenList)?.1.len();
    let mut acc = vec![0.0; dim];
    for (tok, v) in tokens {
        if v.len() != dim {
            return Err(EmbeddingError::Dim { dim, got: v.len() });
        }
        let w = weights.get(&stemmer(&tok.to_lowercase())).copied().unwrap_or(0.0);
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x * w;
        }
    }
    let n = tokens.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    Ok(acc)
}

/// Pools every entry of a token store into a sentence store under the same
/// model name. Sonnets with no tokens get a zero vector.
pub fn pool_token_store(
    store: &TokenEmbeddingStore,
    weights: &BTreeMap<String, f64>,
    stemmer: impl Fn(&str) -> String + Copy,
) -> Result<SentenceEmbeddingStore, EmbeddingError> {
    let mut vectors = BTreeMap::new();
    for (id, toks) in &store.vectors {
        let v = if toks.is_empty() {
            vec![0.0; store.dim]
        } else {
            affective_weighted_pool(toks, weights, stemmer)?
        };
        vectors.insert(id.clone(), v);
    }
    Ok(SentenceEmbeddingStore {
        model_name: store.model_name.clone(),
        dim: store.dim,
        vectors,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingStat {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignMatrix {
    pub ids: Vec<String>,
    pub x: Array2<f64>,
    pub feature_names: Vec<String>,
    /// Standardization of the lexicon-feature block; empty when disabled.
    pub scaling: Vec<ScalingStat>,
}

fn gather<'a>(
    ids: &[String],
    store: &'a SentenceEmbeddingStore,
    gam: Option<&'a BTreeMap<String, GamFeatures>>,
) -> Result<(Vec<&'a [f64]>, Option<Vec<&'a [f64]>>), EmbeddingError> {
    let missing: Vec<String> = ids
        .iter()
        .filter(|id| !store.vectors.contains_key(*id))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(EmbeddingError::MissingEmbedding(missing));
    }
    let emb = ids.iter().map(|id| store.vectors[id].as_slice()).collect();
    let feats = match gam {
        None => None,
        Some(g) => {
            let missing: Vec<String> = ids.iter().filter(|id| !g.contains_key(*id)).cloned().collect();
            if !missing.is_empty() {
                return Err(EmbeddingError::MissingFeatures(missing));
            }
            Some(ids.iter().map(|id| g[id].values.as_slice()).collect())
        }
    };
    Ok((emb, feats))
}

fn build(
    ids: &[String],
    dim: usize,
    emb: &[&[f64]],
    feats: Option<&[&[f64]]>,
    scaling: Vec<ScalingStat>,
) -> DesignMatrix {
    let cols = dim + if feats.is_some() { N_FEATURES } else { 0 };
    let mut x = Array2::zeros((ids.len(), cols));
    for (r, v) in emb.iter().enumerate() {
        for (c, val) in v.iter().enumerate() {
            x[[r, c]] = *val;
        }
        if let Some(f) = feats {
            for (j, s) in scaling.iter().enumerate() {
                x[[r, dim + j]] = if s.sd > 0.0 { (f[r][j] - s.mean) / s.sd } else { 0.0 };
            }
        }
    }
    let mut feature_names: Vec<String> = (0..dim).map(|i| format!("emb_{i}")).collect();
    if feats.is_some() {
        feature_names.extend(FEATURE_NAMES.iter().map(|s| s.to_string()));
    }
    DesignMatrix {
        ids: ids.to_vec(),
        x,
        feature_names,
        scaling,
    }
}

/// Rows follow `ids`. The lexicon-feature block (when given) is z-scored with
/// population statistics computed over `fit_ids` only; a constant feature
/// becomes a zero column.
pub fn assemble_design_matrix(
    ids: &[String],
    store: &SentenceEmbeddingStore,
    gam: Option<&BTreeMap<String, GamFeatures>>,
    fit_ids: &BTreeSet<String>,
) -> Result<DesignMatrix, EmbeddingError> {
    let (emb, feats) = gather(ids, store, gam)?;
    let scaling = match (&feats, gam) {
        (Some(_), Some(g)) => {
            let fit_rows: Vec<&[f64]> = fit_ids
                .iter()
                .filter_map(|id| g.get(id).map(|f| f.values.as_slice()))
                .collect();
            (0..N_FEATURES)
                .map(|j| {
                    let col: Vec<f64> = fit_rows.iter().map(|r| r[j]).collect();
                    let (mean, sd) = crate::corpus::mean_std(&col);
                    ScalingStat {
                        name: FEATURE_NAMES[j].to_string(),
                        mean,
                        sd,
                    }
                })
                .collect()
        }
        _ => Vec::new(),
    };
    Ok(build(ids, store.dim, &emb, feats.as_deref(), scaling))
}

/// Same layout as [`assemble_design_matrix`] but with previously fitted
/// scaling statistics (used when predicting on new sonnets).
pub fn assemble_with_scaling(
    ids: &[String],
    store: &SentenceEmbeddingStore,
    gam: Option<&BTreeMap<String, GamFeatures>>,
    scaling: &[ScalingStat],
) -> Result<DesignMatrix, EmbeddingError> {
    let (emb, feats) = gather(ids, store, gam)?;
    Ok(build(ids, store.dim, &emb, feats.as_deref(), scaling.to_vec()))
}
