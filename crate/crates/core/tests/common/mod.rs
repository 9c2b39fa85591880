//! Independent reference implementations used as test oracles. Each one
//! follows the textbook definition directly (pair counting, explicit
//! enumeration, dense matrix inverse) rather than the library's algorithm.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use nalgebra::DMatrix;
use ndarray::Array2;

pub fn fixture_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

/// Weighted F1 from per-class precision and recall.
pub fn f1_weighted(y_true: &[usize], y_pred: &[usize]) -> f64 {
    let classes: BTreeSet<usize> = y_true.iter().copied().collect();
    let n = y_true.len() as f64;
    let mut total = 0.0;
    for c in classes {
        let tp = y_true.iter().zip(y_pred).filter(|(t, p)| **t == c && **p == c).count() as f64;
        let support = y_true.iter().filter(|t| **t == c).count() as f64;
        let predicted = y_pred.iter().filter(|p| **p == c).count() as f64;
        let precision = if predicted > 0.0 { tp / predicted } else { 0.0 };
        let recall = tp / support;
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        total += f1 * support / n;
    }
    total
}

/// Kappa from observed agreement and the product of marginal frequencies.
pub fn cohens_kappa(y_true: &[usize], y_pred: &[usize]) -> f64 {
    let n = y_true.len() as f64;
    let classes: BTreeSet<usize> = y_true.iter().chain(y_pred).copied().collect();
    let p_o = y_true.iter().zip(y_pred).filter(|(a, b)| a == b).count() as f64 / n;
    let p_e: f64 = classes
        .iter()
        .map(|c| {
            let a = y_true.iter().filter(|t| *t == c).count() as f64 / n;
            let b = y_pred.iter().filter(|p| *p == c).count() as f64 / n;
            a * b
        })
        .sum();
    if p_e == 1.0 {
        0.0
    } else {
        (p_o - p_e) / (1.0 - p_e)
    }
}

/// Fraction of (positive, negative) pairs ordered correctly, ties count 1/2.
pub fn auc_pairs(y: &[bool], s: &[f64]) -> f64 {
    let mut good = 0.0;
    let mut total = 0.0;
    for i in 0..y.len() {
        for j in 0..y.len() {
            if y[i] && !y[j] {
                total += 1.0;
                if s[i] > s[j] {
                    good += 1.0;
                } else if s[i] == s[j] {
                    good += 0.5;
                }
            }
        }
    }
    good / total
}

pub fn auc_macro_ovr(y: &[usize], proba: &Array2<f64>) -> f64 {
    let classes: BTreeSet<usize> = y.iter().copied().collect();
    let aucs: Vec<f64> = classes
        .iter()
        .map(|&c| {
            let yc: Vec<bool> = y.iter().map(|t| *t == c).collect();
            auc_pairs(&yc, &proba.column(c).to_vec())
        })
        .collect();
    aucs.iter().sum::<f64>() / aucs.len() as f64
}

/// 1-based ranks of `|d|`, ties averaged, by counting.
fn abs_ranks(d: &[f64]) -> Vec<f64> {
    d.iter()
        .map(|x| {
            let less = d.iter().filter(|y| y.abs() < x.abs()).count() as f64;
            let equal = d.iter().filter(|y| y.abs() == x.abs()).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Signed-rank statistic `min(W+, W-)` and the two-sided exact p-value from
/// enumerating all `2^n` sign assignments of the non-zero differences.
pub fn wilcoxon_enumerated(a: &[f64], b: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|v| *v != 0.0).collect();
    let r = abs_ranks(&d);
    let w_plus: f64 = r.iter().zip(&d).filter(|(_, v)| **v > 0.0).map(|(r, _)| *r).sum();
    let total: f64 = r.iter().sum();
    let t = w_plus.min(total - w_plus);
    let n = d.len();
    let mut hits = 0u64;
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| r[i]).sum();
        if w <= t + 1e-9 {
            hits += 1;
        }
    }
    (t, (2.0 * hits as f64 / (1u64 << n) as f64).min(1.0))
}

pub fn rbf_affinity(x: &Array2<f64>, gamma: f64) -> DMatrix<f64> {
    let n = x.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            let d2: f64 = x.row(i).iter().zip(x.row(j)).map(|(a, b)| (a - b).powi(2)).sum();
            (-gamma * d2).exp()
        }
    })
}

/// Directed k-nearest-neighbour graph made symmetric with `max(W, W^T)`.
pub fn knn_affinity(x: &Array2<f64>, k: usize) -> DMatrix<f64> {
    let n = x.nrows();
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut others: Vec<(f64, usize)> = (0..n)
            .filter(|j| *j != i)
            .map(|j| {
                let d2: f64 = x.row(i).iter().zip(x.row(j)).map(|(a, b)| (a - b).powi(2)).sum();
                (d2, j)
            })
            .collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (_, j) in others.into_iter().take(k) {
            w[(i, j)] = 1.0;
        }
    }
    let wt = w.transpose();
    w.zip_map(&wt, f64::max)
}

pub fn is_connected(w: &DMatrix<f64>) -> bool {
    let n = w.nrows();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if w[(i, j)] > 0.0 && !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// `(1 - alpha) (I - alpha S)^-1 Y`, rows normalized to sum 1.
pub fn spreading_closed_form(w: &DMatrix<f64>, y: &[Option<usize>], n_classes: usize, alpha: f64) -> DMatrix<f64> {
    let n = w.nrows();
    let d: Vec<f64> = (0..n).map(|i| w.row(i).sum()).collect();
    let s = DMatrix::from_fn(n, n, |i, j| w[(i, j)] / (d[i] * d[j]).sqrt());
    let ymat = DMatrix::from_fn(n, n_classes, |i, c| if y[i] == Some(c) { 1.0 } else { 0.0 });
    let a = DMatrix::identity(n, n) - s * alpha;
    let inv = a.try_inverse().expect("I - alpha S is invertible for alpha < 1");
    let mut f = inv * ymat * (1.0 - alpha);
    for mut row in f.row_iter_mut() {
        let z: f64 = row.sum();
        row /= z;
    }
    f
}

/// Euclidean distance from `p` to the segment `[a, b]`.
pub fn dist_to_segment(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let ap: Vec<f64> = a.iter().zip(p).map(|(x, y)| y - x).collect();
    let len2: f64 = ab.iter().map(|v| v * v).sum();
    let t = if len2 > 0.0 {
        (ab.iter().zip(&ap).map(|(u, v)| u * v).sum::<f64>() / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    a.iter()
        .zip(&ab)
        .zip(p)
        .map(|((x, u), q)| (x + t * u - q).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Smallest distance from `p` to any segment between two rows of `x`.
pub fn dist_to_nearest_segment(p: &[f64], x: &Array2<f64>) -> f64 {
    let rows: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
    let mut best = f64::INFINITY;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            best = best.min(dist_to_segment(p, &rows[i], &rows[j]));
        }
    }
    best
}

pub fn full_annotation(psy: u8, scaled: u8) -> sonnet_core::AnnotationSet {
    use sonnet_core::corpus::{PSYCHOLOGICAL, SCALED};
    sonnet_core::AnnotationSet {
        psychological: PSYCHOLOGICAL.iter().map(|n| (n.to_string(), psy)).collect(),
        scaled: SCALED.iter().map(|n| (n.to_string(), scaled)).collect(),
    }
}

/// A 4-4-3-3 sonnet whose first line is `first` and whose other lines repeat
/// `filler`.
pub fn sonnet(id: &str, first: &str, filler: &str) -> sonnet_core::Sonnet {
    let mut stanzas: Vec<Vec<String>> = [4, 4, 3, 3].iter().map(|n| vec![filler.to_string(); *n]).collect();
    stanzas[0][0] = first.to_string();
    sonnet_core::Sonnet {
        id: id.into(),
        author: "Anónimo".into(),
        period: "XVII".into(),
        title: id.into(),
        source: sonnet_core::Source::Disco,
        stanzas,
    }
}

pub const HAND_LEXICON_CSV: &str = "\
word,valence_mean,valence_sd,arousal_mean,arousal_sd,happiness_mean,happiness_sd,concreteness_mean
amor,8,1.0,4,2.0,,,
dolor,2,1.5,7,1.0,,,
luz,7,0.5,6,1.5,,,
noche,,,,,3.0,0.8,4.0
";

/// Six retained tokens (stopwords `el`, `y` dropped); four lexicon entries,
/// three of which carry valence and arousal, matched at positions 0, 1 and 3.
pub fn hand_fixture() -> (sonnet_core::ProcessedSonnet, sonnet_core::MergedLexicon) {
    let table = sonnet_core::lexicon::parse_lexicon_csv("hand", HAND_LEXICON_CSV.as_bytes()).unwrap();
    let lex = sonnet_core::lexicon::merge_lexicons(&[table], sonnet_core::pipeline::stem_word).unwrap();
    let s = sonnet("hand", "El amor, dolor; cielo y luz, mar noche", "");
    let p = sonnet_core::textproc::preprocess(&s, &sonnet_core::StopWords::default_spanish());
    (p, lex)
}

/// Hand-computed values for [`hand_fixture`], in feature order.
pub fn hand_expected() -> [f64; 32] {
    let third = 17.0 / 3.0;
    let sqrt6 = 6f64.sqrt();
    [
        third, 1.0, // valence
        third, 1.5, // arousal
        3.0, 0.8, // happiness
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, // anger, sadness, fear, disgust
        4.0, 0.0, // concreteness (no sd given)
        0.0, 0.0, 0.0, 0.0, // imageability, context availability
        7.0, 4.0, 8.0, 2.0, // max/min arousal, max/min valence
        3.0, 6.0, // spans
        0.5, -0.5, 0.5, 0.5, // arousal ranks [1,3,2] and valence ranks [3,1,2] against positions
        third * sqrt6,
        third * sqrt6,
    ]
}

/// Largest absolute difference between iterative label spreading (run to a
/// tight tolerance) and the closed form, on one random connected instance
/// with at most 50 rows. Returns `None` when the drawn graph is disconnected.
pub fn spreading_vs_closed_form(seed: u64, rbf: bool) -> Option<f64> {
    use rand::{Rng, SeedableRng};
    use sonnet_core::ssl::{label_spreading, Gamma, Kernel, SpreadParams, SslProblem};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(6..=50);
    let dim = rng.gen_range(1..=4);
    let k = rng.gen_range(2..=3);
    let x = Array2::from_shape_fn((n, dim), |_| rng.gen_range(-1.0..1.0));
    let mut y: Vec<Option<usize>> = (0..n)
        .map(|_| if rng.gen_bool(0.3) { Some(rng.gen_range(0..k)) } else { None })
        .collect();
    for c in 0..k {
        y[c] = Some(c);
    }
    let alpha = rng.gen_range(0.05..0.95);
    let (kernel, w) = if rbf {
        let gamma = rng.gen_range(0.5..5.0);
        (Kernel::Rbf(Gamma::Value(gamma)), rbf_affinity(&x, gamma))
    } else {
        let kk = rng.gen_range(2..=5.min(n - 1));
        (Kernel::Knn(kk), knn_affinity(&x, kk))
    };
    if !is_connected(&w) {
        return None;
    }
    let p = SslProblem::new(x, y.clone(), k).unwrap();
    let params = SpreadParams {
        alpha,
        max_iter: 10_000,
        tol: 1e-13,
    };
    let got = label_spreading(&p, kernel, &params).unwrap();
    assert!(got.converged);
    let want = spreading_closed_form(&w, &y, k, alpha);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for c in 0..k {
            worst = worst.max((got.f[[i, c]] - want[(i, c)]).abs());
        }
    }
    Some(worst)
}

/// Largest deviation of the four classification metrics from their oracles on
/// one random small instance (2 to 4 classes, 2 to 30 rows, heavy ties).
pub fn metrics_vs_oracles(seed: u64) -> f64 {
    use rand::{Rng, SeedableRng};
    use sonnet_core::eval::{auc_binary, auc_multiclass, cohens_kappa, f1_weighted};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(2..=4);
    let n = rng.gen_range(2..=30);
    let mut y: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    y[0] = 0;
    y[1] = 1;
    let pred: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    let proba = Array2::from_shape_fn((n, k), |_| f64::from(rng.gen_range(0..5u8)) / 4.0);
    let yb: Vec<bool> = y.iter().map(|c| *c == 1).collect();
    let scores = proba.column(0).to_vec();
    [
        (f1_weighted(&y, &pred).unwrap() - self::f1_weighted(&y, &pred)).abs(),
        (cohens_kappa(&y, &pred).unwrap() - self::cohens_kappa(&y, &pred)).abs(),
        (auc_binary(&yb, &scores).unwrap() - auc_pairs(&yb, &scores)).abs(),
        (auc_multiclass(&y, proba.view()).unwrap() - auc_macro_ovr(&y, &proba)).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Largest deviation of the signed-rank statistic and p-value from full
/// enumeration on one random paired sample of size 1..=12.
pub fn wilcoxon_vs_enumeration(seed: u64) -> f64 {
    use rand::{Rng, SeedableRng};
    use sonnet_core::eval::{wilcoxon_signed_rank, PMethod};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=12);
    let a: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..6u8))).collect();
    let mut b: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..6u8))).collect();
    if a == b {
        b[0] += 1.0;
    }
    let got = wilcoxon_signed_rank(&a, &b).unwrap();
    assert_eq!(got.method, PMethod::Exact);
    let (t, p) = wilcoxon_enumerated(&a, &b);
    (got.statistic - t).abs().max((got.p_value - p).abs())
}
