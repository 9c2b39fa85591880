//! Semi-supervised inference of affective, lexico-semantic and psychological
//! categories for Spanish sonnets.
//!
//! The pipeline has three phases:
//!
//! 1. [`textproc`]: tokenization, stopword removal and Snowball stemming.
//! 2. [`lexicon`] and [`embeddings`]: merged affective lexicons, the 32
//!    lexicon-derived sonnet features, affective-weighted pooling of token
//!    embeddings and design-matrix assembly.
//! 3. [`learners`], [`ssl`] and [`eval`]: a histogram gradient-boosted tree
//!    classifier, label spreading / self-training strategies selected by name
//!    from a registry, and the repeated random cross-validation benchmark.

pub mod config;
pub mod corpus;
pub mod embeddings;
pub mod eval;
pub mod learners;
pub mod pipeline;
pub mod lexicon;
pub mod seed;
pub mod ssl;
pub mod synth;
pub mod textproc;

pub use corpus::{AnnotationSet, Category, CategoryKind, Corpus, Sonnet, Source};
pub use lexicon::{Dimension, GamFeatures, MergedLexicon};
pub use textproc::{stem, tokenize, ProcessedSonnet, StopWords};
