//! Repeated random train/test sampling over the annotated sonnets.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotationSet, Category};

/// How training sets relate across categories.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CvMode {
    /// One shared training pool per repeat: the union of the per-value draws
    /// of every sampled category.
    #[default]
    Union,
    /// An independent split per category, drawn from that category alone.
    PerCategory,
}

/// Which categories contribute draws to a union split.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleScope {
    /// Every psychological and scaled category.
    #[default]
    All,
    /// Only the categories being evaluated.
    Evaluated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Draw {
    pub category: Category,
    pub value: u8,
    pub ids: Vec<String>,
    /// Annotated sonnets carrying this value.
    pub available: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvSplit {
    pub repeat: usize,
    pub seed: u64,
    pub train_ids: BTreeSet<String>,
    pub test_ids: BTreeSet<String>,
    pub draws: Vec<Draw>,
}

/// For each category and each observed value, draws `n_per_value` sonnets
/// uniformly without replacement (all of them, with a warning, when fewer
/// exist). The training set is the union of the draws; every other
/// annotated sonnet is test.
pub fn cv_sample(
    annotations: &BTreeMap<String, AnnotationSet>,
    categories: &[Category],
    n_per_value: usize,
    repeat: usize,
    seed: u64,
    rng: &mut impl Rng,
) -> CvSplit {
    let mut train = BTreeSet::new();
    let mut draws = Vec::new();
    for cat in categories {
        let mut by_value: BTreeMap<u8, Vec<&String>> = BTreeMap::new();
        for (id, ann) in annotations {
            if let Some(v) = ann.get(cat) {
                by_value.entry(v).or_default().push(id);
            }
        }
        for (value, ids) in by_value {
            if ids.len() < n_per_value {
                log::warn!(
                    "{cat} = {value}: only {} annotated sonnets, wanted {n_per_value}",
                    ids.len()
                );
            }
            let mut picked: Vec<String> = ids
                .choose_multiple(rng, n_per_value.min(ids.len()))
                .map(|s| (*s).clone())
                .collect();
            picked.sort();
            train.extend(picked.iter().cloned());
            draws.push(Draw {
                category: cat.clone(),
                value,
                available: ids.len(),
                ids: picked,
            });
        }
    }
    let test_ids = annotations
        .keys()
        .filter(|id| !train.contains(*id))
        .cloned()
        .collect();
    CvSplit {
        repeat,
        seed,
        train_ids: train,
        test_ids,
        draws,
    }
}
