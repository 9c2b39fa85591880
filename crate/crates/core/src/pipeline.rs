//! Loading everything a run needs from the files named in a [`RunConfig`].

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{Pooling, RunConfig, SemanticSpec};
use crate::corpus::{filter_single_part, load_corpus, Corpus, CorpusError};
use crate::embeddings::{normalize_lexicon, pool_token_store, read_embeddings, EmbeddingError, EmbeddingFile};
use crate::eval::SemanticModel;
use crate::lexicon::{extract_features, load_lexicon_csv, merge_lexicons, GamFeatures, LexiconError, MergedLexicon};
use crate::textproc::{preprocess, stem, ProcessedSonnet, StopWords};

#[derive(Debug, Error)]
pub enum InputError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{path}: {source}")]
    Lexicon {
        path: String,
        #[source]
        source: LexiconError,
    },
    #[error("{path}: {source}")]
    Embedding {
        path: String,
        #[source]
        source: EmbeddingError,
    },
    #[error("cannot read stopwords {path}: {source}")]
    Stopwords {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

/// Stems a lexicon or corpus word the same way tokens are stemmed.
pub fn stem_word(word: &str) -> String {
    stem(&word.to_lowercase())
}

pub fn load_corpora(paths: &[PathBuf], single_part: bool) -> Result<Corpus, InputError> {
    let parts = paths.iter().map(load_corpus).collect::<Result<Vec<_>, _>>()?;
    let merged = Corpus::merge(parts)?;
    Ok(if single_part { filter_single_part(&merged) } else { merged })
}

pub fn load_lexicons(paths: &[PathBuf]) -> Result<MergedLexicon, InputError> {
    let tables = paths
        .iter()
        .map(|p| {
            load_lexicon_csv(p).map_err(|source| InputError::Lexicon {
                path: p.display().to_string(),
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    merge_lexicons(&tables, stem_word).map_err(|source| InputError::Lexicon {
        path: "merged lexicon".into(),
        source,
    })
}

pub fn load_stopwords(path: Option<&Path>) -> Result<StopWords, InputError> {
    match path {
        None => Ok(StopWords::default_spanish()),
        Some(p) => StopWords::from_file(p).map_err(|source| InputError::Stopwords {
            path: p.display().to_string(),
            source,
        }),
    }
}

/// Reads semantic embedding files; token-level files are pooled into one
/// vector per sonnet.
pub fn load_semantic(specs: &[SemanticSpec], lexicon: &MergedLexicon) -> Result<Vec<SemanticModel>, InputError> {
    let mut names = BTreeSet::new();
    let mut out = Vec::new();
    for spec in specs {
        let emb_err = |source| InputError::Embedding {
            path: spec.path.display().to_string(),
            source,
        };
        let file = read_embeddings(&spec.path).map_err(emb_err)?;
        let store = match file {
            EmbeddingFile::Sentence(s) => s,
            EmbeddingFile::Token(t) => {
                let weights = match spec.pooling {
                    Pooling::Affective => normalize_lexicon(lexicon).map_err(emb_err)?,
                    Pooling::Mean => t
                        .vectors
                        .values()
                        .flatten()
                        .map(|(tok, _)| (stem_word(tok), 1.0))
                        .collect(),
                };
                pool_token_store(&t, &weights, stem_word).map_err(emb_err)?
            }
        };
        let name = spec.name.clone().unwrap_or_else(|| store.model_name.clone());
        if !names.insert(name.clone()) {
            return Err(InputError::Invalid(format!("duplicate semantic model name {name:?}")));
        }
        out.push(SemanticModel { name, store });
    }
    Ok(out)
}

pub fn gam_features(processed: &[ProcessedSonnet], lexicon: &MergedLexicon) -> BTreeMap<String, GamFeatures> {
    processed
        .iter()
        .map(|p| (p.id.clone(), extract_features(p, lexicon)))
        .collect()
}

/// Everything derived from the configured input files.
pub struct Inputs {
    pub corpus: Corpus,
    pub stopwords: StopWords,
    pub lexicon: MergedLexicon,
    pub processed: Vec<ProcessedSonnet>,
    pub gam: BTreeMap<String, GamFeatures>,
    pub semantic: Vec<SemanticModel>,
}

impl Inputs {
    /// Loads corpus, stopwords and lexicons; semantic files only when
    /// `with_semantic` is set.
    pub fn load(cfg: &RunConfig, with_semantic: bool) -> Result<Self, InputError> {
        let corpus = load_corpora(&cfg.corpus, cfg.single_part)?;
        let stopwords = load_stopwords(cfg.stopwords.as_deref())?;
        let lexicon = load_lexicons(&cfg.lexicons)?;
        let processed: Vec<ProcessedSonnet> = corpus.sonnets.iter().map(|s| preprocess(s, &stopwords)).collect();
        let gam = gam_features(&processed, &lexicon);
        let semantic = if with_semantic {
            load_semantic(&cfg.semantic, &lexicon)?
        } else {
            Vec::new()
        };
        Ok(Inputs {
            corpus,
            stopwords,
            lexicon,
            processed,
            gam,
            semantic,
        })
    }
}
