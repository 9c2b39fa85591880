//! Probabilistic base classifiers.
//!
//! Labels are class indices `0..n_classes`. A classifier always reports a
//! probability for every class of the problem, including classes that never
//! appeared in its training data (those get probability 0).

mod gbdt;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gbdt::{Gbdt, GbdtModel, GbdtParams, Node, Tree};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnerError {
    #[error("degenerate training data: {0}")]
    Degenerate(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid parameter: {0}")]
    Param(String),
}

pub trait Classifier: Send + Sync {
    fn n_classes(&self) -> usize;
    fn n_features(&self) -> usize;
    /// One row per input row; each row sums to 1.
    fn predict_proba(&self, x: ArrayView2<f64>) -> Result<Array2<f64>, LearnerError>;
    fn dump(&self) -> ModelDump;
}

pub trait BaseLearner: Send + Sync {
    fn name(&self) -> &str;
    fn fit(
        &self,
        x: ArrayView2<f64>,
        y: &[usize],
        n_classes: usize,
        weights: Option<&[f64]>,
    ) -> Result<Box<dyn Classifier>, LearnerError>;
}

/// Predicts the same distribution for every row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantModel {
    pub n_features: usize,
    pub probs: Vec<f64>,
}

impl ConstantModel {
    /// Class frequencies of `y`.
    pub fn from_labels(y: &[usize], n_classes: usize, n_features: usize) -> Self {
        let mut probs = vec![0.0; n_classes];
        for &c in y {
            probs[c] += 1.0;
        }
        let n = y.len().max(1) as f64;
        probs.iter_mut().for_each(|p| *p /= n);
        ConstantModel { n_features, probs }
    }
}

impl Classifier for ConstantModel {
    fn n_classes(&self) -> usize {
        self.probs.len()
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_proba(&self, x: ArrayView2<f64>) -> Result<Array2<f64>, LearnerError> {
        check_columns(x, self.n_features)?;
        let k = self.probs.len();
        Ok(Array2::from_shape_fn((x.nrows(), k), |(_, c)| self.probs[c]))
    }

    fn dump(&self) -> ModelDump {
        ModelDump::Constant(self.clone())
    }
}

/// Serializable form of any built-in classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelDump {
    Gbdt(GbdtModel),
    Constant(ConstantModel),
}

impl ModelDump {
    pub fn into_classifier(self) -> Box<dyn Classifier> {
        match self {
            ModelDump::Gbdt(m) => Box::new(m),
            ModelDump::Constant(m) => Box::new(m),
        }
    }
}

pub(crate) fn check_columns(x: ArrayView2<f64>, expected: usize) -> Result<(), LearnerError> {
    if x.ncols() != expected {
        return Err(LearnerError::Shape(format!(
            "model expects {expected} columns, got {}",
            x.ncols()
        )));
    }
    Ok(())
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in row.iter().enumerate() {
        if *v > row[best] {
            best = i;
        }
    }
    best
}
