mod common;

use ndarray::{concatenate, s, Array2, Axis};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sonnet_core::eval::auc;
use sonnet_core::learners::{BaseLearner, Classifier, Gbdt, GbdtParams, ModelDump};

fn params(n_trees: usize) -> GbdtParams {
    GbdtParams {
        n_trees,
        min_samples_leaf: 3,
        ..Default::default()
    }
}

/// Gaussian blobs: class `c` centred at `(2c, -c)` plus noise features.
fn blobs(n: usize, n_classes: usize, spread: f64, seed: u64) -> (Array2<f64>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y: Vec<usize> = (0..n).map(|i| i % n_classes).collect();
    let x = Array2::from_shape_fn((n, 4), |(i, j)| {
        let c = y[i] as f64;
        let centre = match j {
            0 => 2.0 * c,
            1 => -c,
            _ => 0.0,
        };
        centre + spread * (rng.gen::<f64>() - 0.5)
    });
    (x, y)
}

fn proba(m: &dyn Classifier, x: &Array2<f64>) -> Array2<f64> {
    m.predict_proba(x.view()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn training_loss_never_rises(seed in any::<u64>(), k in 2usize..4, spread in 0.5..6.0f64) {
        let (x, y) = blobs(60, k, spread, seed);
        let (_, trace) = Gbdt::new(params(25)).fit_traced(x.view(), &y, k, None).unwrap();
        prop_assert_eq!(trace.len(), 26);
        for w in trace.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12, "{:?}", trace);
        }
    }

    #[test]
    fn permuting_labels_permutes_columns(seed in any::<u64>(), k in 2usize..4) {
        let (x, y) = blobs(48, k, 4.0, seed);
        let perm: Vec<usize> = (0..k).rev().collect();
        let y2: Vec<usize> = y.iter().map(|c| perm[*c]).collect();
        let g = Gbdt::new(params(15));
        let a = proba(g.fit(x.view(), &y, k, None).unwrap().as_ref(), &x);
        let b = proba(g.fit(x.view(), &y2, k, None).unwrap().as_ref(), &x);
        for c in 0..k {
            for i in 0..x.nrows() {
                prop_assert!((a[[i, c]] - b[[i, perm[c]]]).abs() < 1e-12, "{} {}", a[[i, c]], b[[i, perm[c]]]);
            }
        }
    }

    #[test]
    fn duplicated_column_changes_nothing(seed in any::<u64>(), col in 0usize..4) {
        let (x, y) = blobs(50, 2, 3.0, seed);
        let x2 = concatenate![Axis(1), x, x.slice(s![.., col..col + 1])];
        let g = Gbdt::new(params(20));
        let a = proba(g.fit(x.view(), &y, 2, None).unwrap().as_ref(), &x);
        let b = proba(g.fit(x2.view(), &y, 2, None).unwrap().as_ref(), &x2);
        prop_assert_eq!(a, b);
    }
}

#[test]
fn separable_data_is_ranked_perfectly() {
    let (x, y) = blobs(80, 2, 1.0, 3);
    let m = Gbdt::new(params(30)).fit(x.view(), &y, 2, None).unwrap();
    assert_eq!(auc(&y, proba(m.as_ref(), &x).view()).unwrap(), 1.0);
}

#[test]
fn deep_inside_a_pure_region_is_confident() {
    let (x, y) = blobs(80, 3, 1.0, 5);
    let m = Gbdt::new(params(100)).fit(x.view(), &y, 3, None).unwrap();
    let probe = ndarray::array![[4.0, -2.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0]];
    let p = proba(m.as_ref(), &probe);
    assert!(p[[0, 2]] > 0.9, "{p}");
    assert!(p[[1, 0]] > 0.9, "{p}");
}

#[test]
fn json_reload_is_bit_exact() {
    let (x, y) = blobs(90, 3, 3.0, 11);
    let m = Gbdt::new(params(40)).fit(x.view(), &y, 3, None).unwrap();
    let text = serde_json::to_string(&m.dump()).unwrap();
    let back: ModelDump = serde_json::from_str(&text).unwrap();
    let reloaded = back.into_classifier();
    let before = proba(m.as_ref(), &x);
    let after = proba(reloaded.as_ref(), &x);
    assert!(before.iter().zip(after.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn probabilities_sum_to_one() {
    let (x, y) = blobs(60, 3, 5.0, 2);
    let m = Gbdt::new(params(10)).fit(x.view(), &y, 3, None).unwrap();
    for row in proba(m.as_ref(), &x).rows() {
        assert!((row.sum() - 1.0).abs() < 1e-12);
    }
}
