mod common;

use std::sync::Mutex;

use ndarray::{array, Array2, ArrayView2, Axis};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sonnet_core::learners::{BaseLearner, Classifier, ConstantModel, Gbdt, GbdtParams, LearnerError};
use sonnet_core::ssl::{
    affinity, equalize, label_spreading, ls_pretrain_pipeline, self_train_traced, smote, Gamma, Kernel,
    SpreadParams, SpreadTraining, SslParams, SslProblem, StrategyRegistry, BASELINE_MODELS, SSL_MODELS,
};

fn random_problem(seed: u64, n: usize) -> SslProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Array2::from_shape_fn((n, 3), |_| rng.gen_range(-1.0..1.0));
    let y = (0..n)
        .map(|i| if i < 2 { Some(i) } else if rng.gen_bool(0.3) { Some(rng.gen_range(0..2)) } else { None })
        .collect();
    SslProblem::new(x, y, 2).unwrap()
}

#[test]
fn spreading_matches_closed_form_on_both_kernels() {
    let mut checked = [0, 0];
    for seed in 0..60u64 {
        for (i, rbf) in [true, false].into_iter().enumerate() {
            if let Some(d) = common::spreading_vs_closed_form(seed, rbf) {
                assert!(d < 1e-6, "seed {seed} rbf {rbf}: {d}");
                checked[i] += 1;
            }
        }
    }
    assert!(checked[0] >= 50 && checked[1] >= 20, "{checked:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn row_permutation_permutes_the_result(seed in any::<u64>(), n in 5usize..30, rbf in any::<bool>()) {
        use rand::seq::SliceRandom;
        let p = random_problem(seed, n);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        let q = SslProblem::new(
            p.x.select(Axis(0), &perm),
            perm.iter().map(|&i| p.y[i]).collect(),
            2,
        ).unwrap();
        let kernel = if rbf { Kernel::Rbf(Gamma::Value(3.0)) } else { Kernel::Knn(3) };
        let params = SpreadParams::default();
        let a = label_spreading(&p, kernel, &params).unwrap();
        let b = label_spreading(&q, kernel, &params).unwrap();
        for (new, &old) in perm.iter().enumerate() {
            for c in 0..2 {
                prop_assert!((a.f[[old, c]] - b.f[[new, c]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn affinities_match_reference_graphs(seed in any::<u64>(), n in 5usize..25, k in 1usize..4) {
        let p = random_problem(seed, n);
        let w = affinity(&p, Kernel::Rbf(Gamma::Value(2.0))).unwrap();
        prop_assert_eq!(&w, &w.t().to_owned());
        let oracle = common::rbf_affinity(&p.x, 2.0);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((w[[i, j]] - oracle[(i, j)]).abs() < 1e-15);
            }
        }
        let w = affinity(&p, Kernel::Knn(k)).unwrap();
        let oracle = common::knn_affinity(&p.x, k);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(w[[i, j]], oracle[(i, j)]);
            }
        }
    }

    #[test]
    fn smote_points_lie_on_minority_segments(seed in any::<u64>(), n in 2usize..12, k in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, 3), |_| rng.gen_range(-5.0..5.0));
        let out = smote(x.view(), k, 40, &mut rng).unwrap();
        for row in out.rows() {
            prop_assert!(common::dist_to_nearest_segment(row.as_slice().unwrap(), &x) < 1e-9);
        }
    }
}

#[test]
fn smote_is_reproducible() {
    let x = Array2::from_shape_fn((7, 2), |(i, j)| (i * 3 + j) as f64 * 0.37);
    let a = smote(x.view(), 3, 50, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    let b = smote(x.view(), 3, 50, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    assert!(a.iter().zip(b.iter()).all(|(p, q)| p.to_bits() == q.to_bits()));
}

/// Records the class counts it was trained on and predicts class priors.
#[derive(Default)]
struct Recorder {
    seen: Mutex<Vec<Vec<usize>>>,
}

impl BaseLearner for Recorder {
    fn name(&self) -> &str {
        "recorder"
    }

    fn fit(
        &self,
        x: ArrayView2<f64>,
        y: &[usize],
        n_classes: usize,
        _weights: Option<&[f64]>,
    ) -> Result<Box<dyn Classifier>, LearnerError> {
        let mut counts = vec![0; n_classes];
        y.iter().for_each(|c| counts[*c] += 1);
        self.seen.lock().unwrap().push(counts);
        Ok(Box::new(ConstantModel::from_labels(y, n_classes, x.ncols())))
    }
}

#[test]
fn smote_equalizes_what_the_learner_sees() {
    // 90 rows near the origin, 10 far away; labels on a few of each.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = Array2::from_shape_fn((100, 2), |(i, _)| if i < 90 { 0.0 } else { 10.0 } + rng.gen_range(-0.5..0.5));
    let y = (0..100)
        .map(|i| match i {
            0..=4 => Some(0),
            90..=92 => Some(1),
            _ => None,
        })
        .collect();
    let p = SslProblem::new(x, y, 2).unwrap();
    let rec = Recorder::default();
    ls_pretrain_pipeline(&p, Kernel::Knn(5), &SpreadParams::default(), &rec, Some(5), SpreadTraining::All, 1).unwrap();
    assert_eq!(rec.seen.lock().unwrap().clone(), vec![vec![90, 90]]);

    let xs = Array2::from_shape_fn((20, 2), |(i, j)| (i + j) as f64);
    let ys: Vec<usize> = (0..20).map(|i| usize::from(i >= 18)).collect();
    let (_, out) = equalize(xs.view(), &ys, 2, 5, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert_eq!(out.iter().filter(|c| **c == 1).count(), 18);
}

#[test]
fn self_training_grows_and_keeps_original_labels() {
    let x = Array2::from_shape_fn((44, 1), |(i, _)| if i < 22 { i as f64 * 0.01 } else { 5.0 + i as f64 * 0.01 });
    let mut y = vec![None; 44];
    y[0] = Some(0);
    y[22] = Some(1);
    for i in 1..5 {
        y[i] = Some(0);
        y[22 + i] = Some(1);
    }
    let p = SslProblem::new(x, y.clone(), 2).unwrap();
    let gbdt = Gbdt::new(GbdtParams {
        min_samples_leaf: 2,
        n_trees: 30,
        ..Default::default()
    });
    let (_, labels, sizes) = self_train_traced(&gbdt, &p, 0.75, 10).unwrap();
    assert!(sizes.windows(2).all(|w| w[0] <= w[1]), "{sizes:?}");
    for (orig, now) in y.iter().zip(&labels) {
        if orig.is_some() {
            assert_eq!(orig, now);
        }
    }
    assert!(sizes.len() <= 3, "took {} rounds", sizes.len() - 1);
    assert_eq!(labels.iter().flatten().count(), 44);
    assert!(labels[..22].iter().all(|l| *l == Some(0)));
    assert!(labels[22..].iter().all(|l| *l == Some(1)));
}

#[test]
fn every_registered_model_fits() {
    let registry = StrategyRegistry::builtin(
        &GbdtParams {
            min_samples_leaf: 2,
            n_trees: 10,
            ..Default::default()
        },
        &SslParams::default(),
    );
    let p = random_problem(3, 40);
    for name in SSL_MODELS.iter().chain(&BASELINE_MODELS) {
        let model = registry.get(name).unwrap().fit(&p, 5).unwrap();
        let proba = model.predict_proba(p.x.view()).unwrap();
        assert_eq!(proba.dim(), (40, 2), "{name}");
    }
    assert!(registry.get("LightGBM").is_ok());
    assert!(registry.get("nope").is_err());
}

#[test]
fn problems_need_both_classes_labeled() {
    let x = array![[0.0], [0.1], [0.2], [0.3]];
    assert!(SslProblem::new(x, vec![Some(1), Some(1), None, None], 2).is_err());
}
