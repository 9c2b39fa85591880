//! Deterministic Spanish text preprocessing: tokenization, stopword removal
//! and Snowball stemming.

mod snowball;

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::corpus::Sonnet;

pub use snowball::stem;

const DEFAULT_STOPWORDS: &str = include_str!("stopwords_es.txt");

/// A stopword set. Membership is tested on the lower-cased surface token.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StopWords(HashSet<String>);

impl StopWords {
    pub fn empty() -> Self {
        StopWords(HashSet::new())
    }

    /// The bundled 313-word Spanish list.
    pub fn default_spanish() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        StopWords(
            words
                .into_iter()
                .map(|w| w.as_ref().nfc().collect::<String>().to_lowercase())
                .collect(),
        )
    }

    /// One word per line; `#` starts a comment.
    pub fn parse(text: &str) -> Self {
        Self::from_words(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty()),
        )
    }

    pub fn from_file(path: impl AsRef<Path>) -> std::io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Splits on whitespace, trims leading/trailing punctuation (including `¡` and
/// `¿`), lower-cases, and drops tokens without any letter.
pub fn tokenize(text: &str) -> Vec<String> {
    let text: String = text.nfc().collect();
    text.split_whitespace()
        .map(|raw| raw.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|t| t.chars().any(char::is_alphabetic))
        .map(str::to_lowercase)
        .collect()
}

pub fn remove_stopwords(tokens: Vec<String>, stopwords: &StopWords) -> Vec<String> {
    tokens
        .into_iter()
        .filter(|t| !stopwords.contains(t))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub stem: String,
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessedSonnet {
    pub id: String,
    pub tokens: Vec<Token>,
}

impl ProcessedSonnet {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

fn stem_nonempty(surface: &str) -> String {
    let s = stem(surface);
    if s.is_empty() {
        surface.to_string()
    } else {
        s
    }
}

pub fn preprocess(sonnet: &Sonnet, stopwords: &StopWords) -> ProcessedSonnet {
    let tokens = sonnet.lines().flat_map(tokenize).collect();
    let tokens = remove_stopwords(tokens, stopwords)
        .into_iter()
        .enumerate()
        .map(|(position, surface)| Token {
            stem: stem_nonempty(&surface),
            surface,
            position,
        })
        .collect();
    ProcessedSonnet {
        id: sonnet.id.clone(),
        tokens,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::test_support::sonnet;
    use proptest::prelude::*;

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("¡Oh, dulce amor!"), vec!["oh", "dulce", "amor"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("año 1605"), vec!["año"]);
        assert_eq!(tokenize("«¿Quién?» —dijo— ... 1,5"), vec!["quién", "dijo"]);
    }

    #[test]
    fn stopword_examples() {
        let st = StopWords::from_words(["el"]);
        assert_eq!(remove_stopwords(vec!["el".into(), "mar".into()], &st), vec!["mar"]);
        let st = StopWords::from_words(["de", "la"]);
        assert!(remove_stopwords(vec!["de".into(), "la".into(), "de".into()], &st).is_empty());
        let toks: Vec<String> = vec!["el".into(), "mar".into()];
        assert_eq!(remove_stopwords(toks.clone(), &StopWords::empty()), toks);
    }

    #[test]
    fn stopword_file_format() {
        let st = StopWords::parse("# comment\nde\n  la  # trailing\n\n");
        assert_eq!(st.len(), 2);
        assert!(st.contains("la"));
        assert_eq!(StopWords::default_spanish().len(), 313);
    }

    #[test]
    fn preprocess_example() {
        let mut s = sonnet("s", &[2]);
        s.stanzas = vec![vec!["El mar canta".into(), "...".into()]];
        let p = preprocess(&s, &StopWords::from_words(["el"]));
        let got: Vec<(&str, &str, usize)> = p
            .tokens
            .iter()
            .map(|t| (t.surface.as_str(), t.stem.as_str(), t.position))
            .collect();
        assert_eq!(got, vec![("mar", "mar", 0), ("canta", "cant", 1)]);
    }

    #[test]
    fn preprocess_degenerate() {
        let mut s = sonnet("s", &[]);
        assert!(preprocess(&s, &StopWords::empty()).is_empty());
        s.stanzas = vec![vec!["de la que el".into()]];
        assert!(preprocess(&s, &StopWords::default_spanish()).is_empty());
    }

    proptest! {
        #[test]
        fn tokens_have_no_whitespace_or_edge_punctuation(text in "\\PC{0,80}") {
            for t in tokenize(&text) {
                prop_assert!(!t.chars().any(char::is_whitespace));
                let first = t.chars().next().unwrap();
                let last = t.chars().last().unwrap();
                prop_assert!(first.is_alphanumeric() && last.is_alphanumeric());
            }
        }

        #[test]
        fn preprocess_never_grows(words in proptest::collection::vec("[a-zñáéíóú]{1,8}", 0..30),
                                  stop in proptest::collection::vec("[a-z]{1,3}", 0..10)) {
            let mut s = sonnet("s", &[]);
            s.stanzas = vec![vec![words.join(" ")]];
            if words.is_empty() { s.stanzas = vec![]; }
            let st = StopWords::from_words(&stop);
            let raw = words.len();
            let p = preprocess(&s, &st);
            prop_assert!(p.len() <= raw);
            let disjoint = words.iter().all(|w| !st.contains(w));
            prop_assert_eq!(p.len() == raw, disjoint);
            for (i, t) in p.tokens.iter().enumerate() {
                prop_assert_eq!(t.position, i);
                prop_assert!(!t.stem.is_empty());
            }
        }
    }
}
