mod common;

use proptest::prelude::*;
use sonnet_core::lexicon::{
    coverage, extract_features, merge_lexicons, parse_lexicon_csv, CoverageMode, LexiconEntry, LexiconTable, Ratings,
    FEATURE_NAMES,
};
use sonnet_core::pipeline::stem_word;
use sonnet_core::textproc::preprocess;
use sonnet_core::{Corpus, Dimension, StopWords};

#[test]
fn hand_fixture_matches_hand_computation() {
    let (p, lex) = common::hand_fixture();
    assert_eq!(p.len(), 6);
    let f = extract_features(&p, &lex);
    assert_eq!(f.matched_count, 4);
    assert_eq!(f.token_count, 6);
    for ((name, got), want) in FEATURE_NAMES.iter().zip(&f.values).zip(common::hand_expected()) {
        assert!((got - want).abs() < 1e-9, "{name}: {got} vs {want}");
    }
    let sigma = f.get("sigma_aro").unwrap();
    assert_eq!(sigma, f.get("arousal_mean").unwrap() * 6f64.sqrt());
}

#[test]
fn toy_fixture_covers_half_the_stems() {
    let dir = common::fixture_dir("toy");
    let corpus = sonnet_core::corpus::load_corpus(dir.join("corpus.json")).unwrap();
    let table = sonnet_core::lexicon::load_lexicon_csv(dir.join("lexicon.csv")).unwrap();
    let lex = merge_lexicons(&[table], stem_word).unwrap();
    let sw = StopWords::default_spanish();
    assert_eq!(coverage(&corpus, &lex, &sw, CoverageMode::Types), 0.5);
}

const VOCAB: [&str; 10] = [
    "amor", "muerte", "vida", "noche", "llanto", "fuego", "mar", "cielo", "sombra", "rosa",
];

fn entry(word: &str, val: f64, aro: f64, sd: f64) -> LexiconEntry {
    let mut ratings = Ratings::default();
    ratings.set(Dimension::Valence, Some(val), Some(sd));
    ratings.set(Dimension::Arousal, Some(aro), Some(sd));
    LexiconEntry {
        word: word.into(),
        ratings,
    }
}

fn lexicon_strategy() -> impl Strategy<Value = Vec<LexiconEntry>> {
    prop::collection::vec((0..VOCAB.len(), 1.0..9.0f64, 1.0..9.0f64, 0.1..3.0f64), 1..8)
        .prop_map(|rows| rows.into_iter().map(|(w, v, a, s)| entry(VOCAB[w], v, a, s)).collect())
}

fn text_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..VOCAB.len(), 1..30)
}

fn line(words: &[usize]) -> String {
    words.iter().map(|w| VOCAB[*w]).collect::<Vec<_>>().join(" ")
}

fn table(entries: Vec<LexiconEntry>) -> LexiconTable {
    LexiconTable {
        name: "t".into(),
        entries,
    }
}

proptest! {
    #[test]
    fn sigma_is_mean_times_root_n(entries in lexicon_strategy(), words in text_strategy()) {
        let lex = merge_lexicons(&[table(entries)], stem_word).unwrap();
        let p = preprocess(&common::sonnet("s", &line(&words), ""), &StopWords::empty());
        let f = extract_features(&p, &lex);
        let root_n = (p.len() as f64).sqrt();
        prop_assert_eq!(f.get("sigma_aro").unwrap(), f.get("arousal_mean").unwrap() * root_n);
        prop_assert_eq!(f.get("sigma_val").unwrap(), f.get("valence_mean").unwrap() * root_n);
        for d in Dimension::ALL {
            let m = f.values[2 * d.index()];
            let (lo, hi) = d.range();
            prop_assert!(m == 0.0 || (lo..=hi).contains(&m));
        }
    }

    #[test]
    fn splitting_entries_across_sources_changes_nothing(entries in lexicon_strategy(), words in text_strategy(), cut in 0usize..8) {
        let cut = cut.min(entries.len());
        let one = merge_lexicons(&[table(entries.clone())], stem_word).unwrap();
        let two = merge_lexicons(&[table(entries[..cut].to_vec()), table(entries[cut..].to_vec())], stem_word).unwrap();
        let p = preprocess(&common::sonnet("s", &line(&words), ""), &StopWords::empty());
        let (a, b) = (extract_features(&p, &one), extract_features(&p, &two));
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn reordering_words_only_moves_correlations(entries in lexicon_strategy(), words in text_strategy(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let lex = merge_lexicons(&[table(entries)], stem_word).unwrap();
        let mut shuffled = words.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let a = extract_features(&preprocess(&common::sonnet("s", &line(&words), ""), &StopWords::empty()), &lex);
        let b = extract_features(&preprocess(&common::sonnet("s", &line(&shuffled), ""), &StopWords::empty()), &lex);
        for (i, name) in FEATURE_NAMES.iter().enumerate() {
            if !name.contains("Cor") {
                prop_assert!((a.values[i] - b.values[i]).abs() < 1e-12, "{}", name);
            }
        }
    }

    #[test]
    fn coverage_grows_with_the_lexicon(entries in lexicon_strategy(), extra in lexicon_strategy(), words in text_strategy()) {
        let corpus = Corpus {
            sonnets: vec![common::sonnet("s", &line(&words), "")],
            annotations: Default::default(),
        };
        let small = merge_lexicons(&[table(entries.clone())], stem_word).unwrap();
        let big = merge_lexicons(&[table(entries), table(extra)], stem_word).unwrap();
        let sw = StopWords::empty();
        for mode in [CoverageMode::Types, CoverageMode::Tokens] {
            prop_assert!(coverage(&corpus, &big, &sw, mode) >= coverage(&corpus, &small, &sw, mode));
        }
    }
}

#[test]
fn csv_with_unknown_column_is_rejected() {
    assert!(parse_lexicon_csv("x", "word,colour_mean\nrojo,3\n".as_bytes()).is_err());
}
