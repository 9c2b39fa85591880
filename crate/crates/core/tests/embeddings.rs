mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use sonnet_core::embeddings::{
    affective_weighted_pool, assemble_design_matrix, read_embeddings, write_embeddings, EmbeddingFile,
    SentenceEmbeddingStore, TokenEmbeddingStore,
};
use sonnet_core::lexicon::{GamFeatures, N_FEATURES};

fn ident(s: &str) -> String {
    s.to_string()
}

fn tokens_strategy() -> impl Strategy<Value = Vec<(String, Vec<f64>)>> {
    (1usize..6).prop_flat_map(|dim| {
        prop::collection::vec(
            ("[a-e]", prop::collection::vec(-10.0..10.0f64, dim)),
            1..12,
        )
    })
}

proptest! {
    #[test]
    fn unit_weights_give_the_mean(toks in tokens_strategy()) {
        let w: BTreeMap<String, f64> = toks.iter().map(|(t, _)| (t.clone(), 1.0)).collect();
        let pooled = affective_weighted_pool(&toks, &w, ident).unwrap();
        let n = toks.len() as f64;
        for (j, p) in pooled.iter().enumerate() {
            let mean = toks.iter().map(|(_, v)| v[j]).sum::<f64>() / n;
            prop_assert!((p - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn single_token_is_scaled_vector(v in prop::collection::vec(-10.0..10.0f64, 1..8), w in 0.0..1.0f64) {
        let toks = vec![("a".to_string(), v.clone())];
        let weights: BTreeMap<String, f64> = [("a".to_string(), w)].into();
        let pooled = affective_weighted_pool(&toks, &weights, ident).unwrap();
        for (p, x) in pooled.iter().zip(&v) {
            prop_assert_eq!(*p, x * w);
        }
    }

    #[test]
    fn scaling_ignores_test_rows(
        train in prop::collection::vec(prop::collection::vec(-5.0..5.0f64, N_FEATURES), 2..6),
        test in prop::collection::vec(prop::collection::vec(-5.0..5.0f64, N_FEATURES), 1..4),
        shift in -100.0..100.0f64,
    ) {
        let mut gam = BTreeMap::new();
        let mut vectors = BTreeMap::new();
        let mut ids = Vec::new();
        for (i, values) in train.iter().chain(&test).enumerate() {
            let id = format!("s{i:02}");
            gam.insert(id.clone(), GamFeatures {
                id: id.clone(),
                values: values.clone(),
                matched_count: 1,
                token_count: 1,
                degenerate_cor_aro: false,
                degenerate_cor_val: false,
            });
            vectors.insert(id.clone(), vec![i as f64]);
            ids.push(id);
        }
        let store = SentenceEmbeddingStore { model_name: "m".into(), dim: 1, vectors };
        let fit: BTreeSet<String> = ids[..train.len()].iter().cloned().collect();
        let a = assemble_design_matrix(&ids, &store, Some(&gam), &fit).unwrap();
        for id in &ids[train.len()..] {
            gam.get_mut(id).unwrap().values.iter_mut().for_each(|v| *v += shift);
        }
        let mut permuted = ids.clone();
        permuted[train.len()..].reverse();
        let b = assemble_design_matrix(&permuted, &store, Some(&gam), &fit).unwrap();
        prop_assert_eq!(a.scaling, b.scaling);
    }
}

#[test]
fn files_round_trip_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let tokens = TokenEmbeddingStore {
        model_name: "tok".into(),
        dim: 2,
        vectors: [(
            "a".to_string(),
            vec![("amor".to_string(), vec![0.1 + 0.2, 1.0 / 3.0]), ("y".to_string(), vec![-1e-300, 7e22])],
        )]
        .into(),
    };
    let path = dir.path().join("t.jsonl");
    write_embeddings(&path, &EmbeddingFile::Token(tokens.clone())).unwrap();
    match read_embeddings(&path).unwrap() {
        EmbeddingFile::Token(t) => assert_eq!(t, tokens),
        EmbeddingFile::Sentence(_) => panic!("wrong level"),
    }
}

#[test]
fn bundled_files_validate() {
    let dir = common::fixture_dir("toy");
    for (name, dim) in [("embeddings.jsonl", 4), ("tokens.jsonl", 2), ("new_embeddings.jsonl", 4)] {
        let f = read_embeddings(dir.join(name)).unwrap();
        let d = match &f {
            EmbeddingFile::Sentence(s) => s.dim,
            EmbeddingFile::Token(t) => t.dim,
        };
        assert_eq!(d, dim, "{name}");
    }
}

#[test]
fn dimension_mismatch_is_reported_with_line() {
    let text = "{\"model\":\"m\",\"level\":\"sentence\",\"dim\":2}\n{\"id\":\"a\",\"vector\":[1.0]}\n";
    let err = sonnet_core::embeddings::parse_embeddings(text.as_bytes()).unwrap_err();
    assert!(err.to_string().contains('2'), "{err}");
}
