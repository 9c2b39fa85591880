//! Planted-signal fixture: a synthetic annotated corpus whose labels are a
//! noisy linear function of two embedding dimensions.
//!
//! Each sonnet gets an embedding `x ~ N(0, I)`; its latent score is
//! `x0 + x1 + noise * e` with `e ~ N(0, 1)`. Psychological labels are
//! `score > 0`; scaled labels are the quartile (1..4) of the score. Every
//! sonnet shares one text drawn from a small vocabulary, a handful of whose
//! words appear in a toy lexicon, so lexicon features are present but
//! constant and carry no signal.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::corpus::{save_corpus, AnnotationSet, Corpus, CorpusError, Sonnet, Source, PSYCHOLOGICAL, SCALED};
use crate::embeddings::{write_embeddings, EmbeddingError, EmbeddingFile, SentenceEmbeddingStore};
use crate::seed::SeedPath;

#[derive(Clone, Debug, PartialEq)]
pub struct PlantedOptions {
    pub n_sonnets: usize,
    pub dim: usize,
    pub noise: f64,
    /// Labeled sonnets per class value; 15 per class gives 10% of 300.
    pub n_per_value: usize,
    pub n_repeats: usize,
    pub seed: u64,
    pub category: String,
}

impl Default for PlantedOptions {
    fn default() -> Self {
        PlantedOptions {
            n_sonnets: 300,
            dim: 8,
            noise: 0.5,
            n_per_value: 15,
            n_repeats: 20,
            seed: 7,
            category: "psychological.fear".into(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

const VOCAB: [&str; 40] = [
    "amor", "muerte", "vida", "noche", "llanto", "fuego", "mar", "cielo", "sombra", "rosa", "alma", "dolor", "gloria",
    "tiempo", "olvido", "luz", "pena", "flor", "viento", "piedra", "río", "campo", "sol", "luna", "canto", "verso",
    "herida", "sueño", "espejo", "ceniza", "mañana", "tarde", "fuente", "jardín", "camino", "memoria", "silencio",
    "nieve", "oro", "lágrima",
];

/// `(word, valence, arousal)` rows of the toy lexicon.
const LEXICON: [(&str, f64, f64); 12] = [
    ("amor", 8.2, 6.9),
    ("muerte", 1.6, 6.1),
    ("vida", 7.8, 5.4),
    ("noche", 5.0, 3.9),
    ("llanto", 2.3, 5.5),
    ("fuego", 5.9, 7.2),
    ("mar", 7.0, 4.5),
    ("sombra", 3.9, 3.8),
    ("dolor", 1.8, 6.6),
    ("luz", 7.4, 4.8),
    ("olvido", 3.1, 3.5),
    ("gloria", 7.5, 6.0),
];

pub struct PlantedFixture {
    pub corpus: PathBuf,
    pub lexicon: PathBuf,
    pub embeddings: PathBuf,
    pub config: PathBuf,
}

fn quartile(v: f64, cuts: &[f64; 3]) -> u8 {
    1 + cuts.iter().filter(|c| v > **c).count() as u8
}

/// Corpus and sentence store for the planted fixture.
pub fn planted_data(opts: &PlantedOptions) -> (Corpus, SentenceEmbeddingStore) {
    let mut rng = SeedPath::new(opts.seed).label("planted").rng();
    let mut vectors = BTreeMap::new();
    let mut scores = Vec::with_capacity(opts.n_sonnets);
    let mut sonnets = Vec::with_capacity(opts.n_sonnets);
    let mut text_rng = SeedPath::new(opts.seed).label("planted-text").rng();
    let stanzas: Vec<Vec<String>> = [4usize, 4, 3, 3]
        .iter()
        .map(|n| {
            (0..*n)
                .map(|_| {
                    (0..6)
                        .map(|_| *VOCAB.choose(&mut text_rng).expect("nonempty"))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect()
        })
        .collect();
    for i in 0..opts.n_sonnets {
        let id = format!("planted-{i:04}");
        let x: Vec<f64> = (0..opts.dim).map(|_| rng.sample(StandardNormal)).collect();
        let e: f64 = rng.sample(StandardNormal);
        scores.push((id.clone(), x[0] + x[1] + opts.noise * e));
        vectors.insert(id.clone(), x);
        sonnets.push(Sonnet {
            id,
            author: format!("Autor {}", i % 17),
            period: ["XVI", "XVII", "XIX"][i % 3].to_string(),
            title: format!("Soneto {i}"),
            source: Source::DiscoPal,
            stanzas: stanzas.clone(),
        });
    }
    let mut sorted: Vec<f64> = scores.iter().map(|s| s.1).collect();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| sorted[((sorted.len() - 1) as f64 * p).round() as usize];
    let cuts = [q(0.25), q(0.5), q(0.75)];
    let annotations = scores
        .iter()
        .map(|(id, s)| {
            let psy = u8::from(*s > 0.0);
            let scaled = quartile(*s, &cuts);
            (
                id.clone(),
                AnnotationSet {
                    psychological: PSYCHOLOGICAL.iter().map(|n| (n.to_string(), psy)).collect(),
                    scaled: SCALED.iter().map(|n| (n.to_string(), scaled)).collect(),
                },
            )
        })
        .collect();
    let store = SentenceEmbeddingStore {
        model_name: "planted".into(),
        dim: opts.dim,
        vectors,
    };
    (Corpus { sonnets, annotations }, store)
}

pub fn lexicon_csv() -> String {
    let mut s = String::from("word,valence_mean,valence_sd,arousal_mean,arousal_sd\n");
    for (w, v, a) in LEXICON {
        let _ = writeln!(s, "{w},{v},1.0,{a},1.2");
    }
    s
}

pub fn config_toml(opts: &PlantedOptions) -> String {
    format!(
        r#"# Planted-signal benchmark fixture.
corpus = ["corpus.json"]
lexicons = ["lexicon.csv"]
output_dir = "out"
categories = ["{category}"]
predictive = ["ST-GBDT", "LS-GBDT-KNN", "LS-GBDT-RBF", "LS-GBDT-SMOTE-KNN", "LS-GBDT-SMOTE-RBF"]
n_repeats = {repeats}
n_per_value = {per_value}
seed = {seed}
sample_scope = "evaluated"

[[semantic]]
path = "embeddings.jsonl"

[variants]
no_gam = false
disco_only = false
baselines = true

[ssl]
gamma = "scale"
"#,
        category = opts.category,
        repeats = opts.n_repeats,
        per_value = opts.n_per_value,
        seed = opts.seed,
    )
}

/// Writes `corpus.json`, `lexicon.csv`, `embeddings.jsonl` and `config.toml`
/// into `dir`.
pub fn write_planted_fixture(dir: &Path, opts: &PlantedOptions) -> Result<PlantedFixture, SynthError> {
    let io = |p: &Path| {
        let path = p.display().to_string();
        move |source| SynthError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let (corpus, store) = planted_data(opts);
    let f = PlantedFixture {
        corpus: dir.join("corpus.json"),
        lexicon: dir.join("lexicon.csv"),
        embeddings: dir.join("embeddings.jsonl"),
        config: dir.join("config.toml"),
    };
    save_corpus(&corpus, &f.corpus)?;
    write_embeddings(&f.embeddings, &EmbeddingFile::Sentence(store))?;
    std::fs::write(&f.lexicon, lexicon_csv()).map_err(io(&f.lexicon))?;
    std::fs::write(&f.config, config_toml(opts)).map_err(io(&f.config))?;
    Ok(f)
}
