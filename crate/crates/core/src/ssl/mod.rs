//! Semi-supervised strategies: label spreading, self-training, label
//! spreading as pre-training for a supervised learner, and SMOTE.
//!
//! Every predictive model evaluated by the benchmark is a [`Strategy`]
//! registered by name in a [`StrategyRegistry`].

mod smote;
mod spreading;

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use ndarray::{Array2, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::learners::{argmax, BaseLearner, Classifier, ConstantModel, Gbdt, GbdtParams, LearnerError};

pub use smote::{equalize, smote};
pub use spreading::{
    affinity, initial_labels, label_spreading, normalized_affinity, Gamma, Kernel, SpreadParams, SpreadResult,
};

#[derive(Debug, Error)]
pub enum SslError {
    #[error("degenerate problem: {0}")]
    Degenerate(String),
    #[error("kernel error: {0}")]
    Kernel(String),
    #[error("need at least 2 minority rows, got {0}")]
    TooFewSamples(usize),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("unknown predictive model {0:?}; known: {1}")]
    UnknownStrategy(String, String),
    #[error(transparent)]
    Learner(#[from] LearnerError),
}

/// Feature matrix over labeled and unlabeled rows; `y[i] == None` marks an
/// unlabeled row.
#[derive(Clone, Debug)]
pub struct SslProblem {
    pub x: Array2<f64>,
    pub y: Vec<Option<usize>>,
    pub n_classes: usize,
    sq_dists: OnceLock<Array2<f64>>,
}

impl SslProblem {
    pub fn new(x: Array2<f64>, y: Vec<Option<usize>>, n_classes: usize) -> Result<Self, SslError> {
        let p = SslProblem {
            x,
            y,
            n_classes,
            sq_dists: OnceLock::new(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), SslError> {
        if self.x.nrows() != self.y.len() {
            return Err(SslError::Param(format!(
                "{} rows but {} labels",
                self.x.nrows(),
                self.y.len()
            )));
        }
        if let Some(c) = self.y.iter().flatten().find(|c| **c >= self.n_classes) {
            return Err(SslError::Param(format!("label {c} outside 0..{}", self.n_classes)));
        }
        let mut seen = vec![false; self.n_classes];
        self.y.iter().flatten().for_each(|c| seen[*c] = true);
        if seen.iter().filter(|s| **s).count() < 2 {
            return Err(SslError::Degenerate(
                "labeled rows must contain at least two classes".into(),
            ));
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    pub fn labeled(&self) -> Vec<usize> {
        (0..self.y.len()).filter(|&i| self.y[i].is_some()).collect()
    }

    pub fn unlabeled(&self) -> Vec<usize> {
        (0..self.y.len()).filter(|&i| self.y[i].is_none()).collect()
    }

    /// Class frequencies among labeled rows.
    pub fn labeled_prior(&self) -> Vec<f64> {
        let mut prior = vec![0.0; self.n_classes];
        let labeled: Vec<usize> = self.y.iter().flatten().copied().collect();
        for c in &labeled {
            prior[*c] += 1.0;
        }
        prior.iter_mut().for_each(|p| *p /= labeled.len() as f64);
        prior
    }

    /// Pairwise squared Euclidean distances, computed once and cached.
    pub fn sq_dists(&self) -> &Array2<f64> {
        self.sq_dists.get_or_init(|| {
            let n = self.n_rows();
            let mut d = Array2::zeros((n, n));
            for i in 0..n {
                let xi = self.x.row(i);
                for j in i + 1..n {
                    let v: f64 = xi
                        .iter()
                        .zip(self.x.row(j))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    d[[i, j]] = v;
                    d[[j, i]] = v;
                }
            }
            d
        })
    }

    fn labeled_xy(&self) -> (Array2<f64>, Vec<usize>) {
        let idx = self.labeled();
        let y = idx.iter().map(|&i| self.y[i].unwrap()).collect();
        (self.x.select(Axis(0), &idx), y)
    }
}

/// Fits `base`, pseudo-labels unlabeled rows predicted with probability at
/// least `threshold`, and repeats until nothing is added, nothing is left or
/// `max_iter` rounds have run. Returns the model fitted on the final labeled
/// set.
pub fn self_train(
    base: &dyn BaseLearner,
    p: &SslProblem,
    threshold: f64,
    max_iter: usize,
) -> Result<Box<dyn Classifier>, SslError> {
    Ok(self_train_traced(base, p, threshold, max_iter)?.0)
}

/// Like [`self_train`], also returning the labeled-set size after every round.
pub fn self_train_traced(
    base: &dyn BaseLearner,
    p: &SslProblem,
    threshold: f64,
    max_iter: usize,
) -> Result<(Box<dyn Classifier>, Vec<Option<usize>>, Vec<usize>), SslError> {
    p.validate()?;
    if !(threshold > 0.5 && threshold <= 1.0) {
        return Err(SslError::Param(format!("threshold must be in (0.5, 1], got {threshold}")));
    }
    let mut labels = p.y.clone();
    let mut sizes = vec![labels.iter().flatten().count()];
    let fit_current = |labels: &[Option<usize>]| {
        let idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i].is_some()).collect();
        let y: Vec<usize> = idx.iter().map(|&i| labels[i].unwrap()).collect();
        base.fit(p.x.select(Axis(0), &idx).view(), &y, p.n_classes, None)
    };
    let mut model = None;
    let mut stale = true;
    for _ in 0..max_iter {
        let pending: Vec<usize> = (0..labels.len()).filter(|&i| labels[i].is_none()).collect();
        if pending.is_empty() {
            break;
        }
        let m = fit_current(&labels)?;
        let proba = m.predict_proba(p.x.select(Axis(0), &pending).view())?;
        let mut added = 0;
        for (row, &i) in proba.rows().into_iter().zip(&pending) {
            let row = row.to_vec();
            let c = argmax(&row);
            if row[c] >= threshold {
                labels[i] = Some(c);
                added += 1;
            }
        }
        model = Some(m);
        stale = added > 0;
        sizes.push(sizes.last().unwrap() + added);
        if added == 0 {
            break;
        }
    }
    let model = match model {
        Some(m) if !stale => m,
        _ => fit_current(&labels)?,
    };
    Ok((model, labels, sizes))
}

/// Which rows train the supervised learner after label spreading.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpreadTraining {
    /// Every row of the problem, with its spread label.
    #[default]
    All,
    /// Labeled rows plus unlabeled rows that received spread mass.
    Connected,
}

/// Label spreading, then a supervised fit on the spread hard labels,
/// optionally after SMOTE-equalizing the classes.
pub fn ls_pretrain_pipeline(
    p: &SslProblem,
    kernel: Kernel,
    params: &SpreadParams,
    base: &dyn BaseLearner,
    smote_k: Option<usize>,
    rows: SpreadTraining,
    seed: u64,
) -> Result<Box<dyn Classifier>, SslError> {
    let spread = label_spreading(p, kernel, params)?;
    let idx: Vec<usize> = match rows {
        SpreadTraining::All => (0..p.n_rows()).collect(),
        SpreadTraining::Connected => (0..p.n_rows())
            .filter(|&i| p.y[i].is_some() || spread.connected[i])
            .collect(),
    };
    let y: Vec<usize> = idx.iter().map(|&i| spread.hard_labels[i]).collect();
    fit_supervised(base, p.x.select(Axis(0), &idx).view(), &y, p.n_classes, smote_k, seed)
}

/// Supervised fit with optional SMOTE; a single-class label set yields a
/// constant model.
fn fit_supervised(
    base: &dyn BaseLearner,
    x: ArrayView2<f64>,
    y: &[usize],
    n_classes: usize,
    smote_k: Option<usize>,
    seed: u64,
) -> Result<Box<dyn Classifier>, SslError> {
    let first = y[0];
    if y.iter().all(|c| *c == first) {
        log::warn!("training labels are a single class; using a constant model");
        return Ok(Box::new(ConstantModel::from_labels(y, n_classes, x.ncols())));
    }
    match smote_k {
        Some(k) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (xs, ys) = equalize(x, y, n_classes, k, &mut rng)?;
            Ok(base.fit(xs.view(), &ys, n_classes, None)?)
        }
        None => Ok(base.fit(x, y, n_classes, None)?),
    }
}

/// Hyperparameters shared by the built-in strategies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SslParams {
    pub alpha: f64,
    pub gamma: Gamma,
    pub knn_k: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub self_training_threshold: f64,
    pub self_training_max_iter: usize,
    pub smote_k: usize,
    pub spread_training: SpreadTraining,
}

impl Default for SslParams {
    fn default() -> Self {
        SslParams {
            alpha: 0.2,
            gamma: Gamma::Value(20.0),
            knn_k: 7,
            max_iter: 30,
            tol: 1e-3,
            self_training_threshold: 0.75,
            self_training_max_iter: 10,
            smote_k: 5,
            spread_training: SpreadTraining::All,
        }
    }
}

impl SslParams {
    pub fn spread(&self) -> SpreadParams {
        SpreadParams {
            alpha: self.alpha,
            max_iter: self.max_iter,
            tol: self.tol,
        }
    }
}

/// A named predictive model: anything that turns an [`SslProblem`] into a
/// fitted classifier.
pub trait Strategy: Send + Sync {
    fn name(&self) -> &str;
    /// True when only labeled rows are used.
    fn supervised_only(&self) -> bool {
        false
    }
    fn fit(&self, p: &SslProblem, seed: u64) -> Result<Box<dyn Classifier>, SslError>;
}

pub struct SelfTraining {
    pub name: String,
    pub base: Arc<dyn BaseLearner>,
    pub threshold: f64,
    pub max_iter: usize,
}

impl Strategy for SelfTraining {
    fn name(&self) -> &str {
        &self.name
    }

    fn fit(&self, p: &SslProblem, _seed: u64) -> Result<Box<dyn Classifier>, SslError> {
        self_train(self.base.as_ref(), p, self.threshold, self.max_iter)
    }
}

pub struct SpreadThenFit {
    pub name: String,
    pub kernel: Kernel,
    pub params: SpreadParams,
    pub base: Arc<dyn BaseLearner>,
    pub smote_k: Option<usize>,
    pub rows: SpreadTraining,
}

impl Strategy for SpreadThenFit {
    fn name(&self) -> &str {
        &self.name
    }

    fn fit(&self, p: &SslProblem, seed: u64) -> Result<Box<dyn Classifier>, SslError> {
        ls_pretrain_pipeline(p, self.kernel, &self.params, self.base.as_ref(), self.smote_k, self.rows, seed)
    }
}

/// Fits on the labeled rows only.
pub struct Supervised {
    pub name: String,
    pub base: Arc<dyn BaseLearner>,
    pub smote_k: Option<usize>,
}

impl Strategy for Supervised {
    fn name(&self) -> &str {
        &self.name
    }

    fn supervised_only(&self) -> bool {
        true
    }

    fn fit(&self, p: &SslProblem, seed: u64) -> Result<Box<dyn Classifier>, SslError> {
        p.validate()?;
        let (x, y) = p.labeled_xy();
        fit_supervised(self.base.as_ref(), x.view(), &y, p.n_classes, self.smote_k, seed)
    }
}

#[derive(Default)]
pub struct StrategyRegistry {
    entries: BTreeMap<String, Arc<dyn Strategy>>,
    aliases: BTreeMap<String, String>,
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The semi-supervised models and the two supervised baselines, all on
    /// top of the built-in GBDT.
    pub fn builtin(gbdt: &GbdtParams, ssl: &SslParams) -> Self {
        let base: Arc<dyn BaseLearner> = Arc::new(Gbdt::new(gbdt.clone()));
        let mut r = Self::empty();
        r.register(SelfTraining {
            name: "ST-GBDT".into(),
            base: base.clone(),
            threshold: ssl.self_training_threshold,
            max_iter: ssl.self_training_max_iter,
        });
        for (kernel, kname) in [(Kernel::Knn(ssl.knn_k), "KNN"), (Kernel::Rbf(ssl.gamma), "RBF")] {
            for smote in [false, true] {
                let name = if smote {
                    format!("LS-GBDT-SMOTE-{kname}")
                } else {
                    format!("LS-GBDT-{kname}")
                };
                r.register(SpreadThenFit {
                    name,
                    kernel,
                    params: ssl.spread(),
                    base: base.clone(),
                    smote_k: smote.then_some(ssl.smote_k),
                    rows: ssl.spread_training,
                });
            }
        }
        r.register(Supervised {
            name: "GBDT".into(),
            base: base.clone(),
            smote_k: None,
        });
        r.register(Supervised {
            name: "GBDT-SMOTE".into(),
            base,
            smote_k: Some(ssl.smote_k),
        });
        r.alias("LightGBM", "GBDT");
        r.alias("LightGBM-SMOTE", "GBDT-SMOTE");
        r
    }

    pub fn register(&mut self, s: impl Strategy + 'static) {
        self.entries.insert(s.name().to_string(), Arc::new(s));
    }

    pub fn alias(&mut self, alias: &str, target: &str) {
        self.aliases.insert(alias.to_string(), target.to_string());
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Strategy>, SslError> {
        let key = self.aliases.get(name).map(String::as_str).unwrap_or(name);
        self.entries
            .get(key)
            .cloned()
            .ok_or_else(|| SslError::UnknownStrategy(name.to_string(), self.names().join(", ")))
    }

    /// Canonical name for `name` (resolving aliases).
    pub fn canonical(&self, name: &str) -> Result<String, SslError> {
        self.get(name).map(|s| s.name().to_string())
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }
}

/// Names of the semi-supervised models, in reporting order.
pub const SSL_MODELS: [&str; 5] = [
    "ST-GBDT",
    "LS-GBDT-KNN",
    "LS-GBDT-RBF",
    "LS-GBDT-SMOTE-KNN",
    "LS-GBDT-SMOTE-RBF",
];

/// Names of the supervised baselines.
pub const BASELINE_MODELS: [&str; 2] = ["GBDT", "GBDT-SMOTE"];
