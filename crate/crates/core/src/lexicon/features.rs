//! The 32 lexicon-derived features describing a sonnet's affective profile.

use serde::{Deserialize, Serialize};

use super::{Dimension, LexiconError, MergedLexicon};
use crate::textproc::ProcessedSonnet;

pub const N_FEATURES: usize = 32;

pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "valence_mean",
    "valence_sd",
    "arousal_mean",
    "arousal_sd",
    "happiness_mean",
    "happiness_sd",
    "anger_mean",
    "anger_sd",
    "sadness_mean",
    "sadness_sd",
    "fear_mean",
    "fear_sd",
    "disgust_mean",
    "disgust_sd",
    "concreteness_mean",
    "concreteness_sd",
    "imageability_mean",
    "imageability_sd",
    "cont_ava_mean",
    "cont_ava_sd",
    "max_arousal",
    "min_arousal",
    "max_valence",
    "min_valence",
    "arousal_span",
    "valence_span",
    "CorAro",
    "CorVal",
    "AbsCorAro",
    "AbsCorVal",
    "sigma_aro",
    "sigma_val",
];

const MAX_AROUSAL: usize = 20;
const MIN_AROUSAL: usize = 21;
const MAX_VALENCE: usize = 22;
const MIN_VALENCE: usize = 23;
const AROUSAL_SPAN: usize = 24;
const VALENCE_SPAN: usize = 25;
const COR_ARO: usize = 26;
const COR_VAL: usize = 27;
const ABS_COR_ARO: usize = 28;
const ABS_COR_VAL: usize = 29;
const SIGMA_ARO: usize = 30;
const SIGMA_VAL: usize = 31;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GamFeatures {
    pub id: String,
    pub values: Vec<f64>,
    /// Retained tokens whose stem is in the lexicon.
    pub matched_count: usize,
    /// All retained (non-stopword) tokens.
    pub token_count: usize,
    /// CorAro fell back to 0 (fewer than two points or zero rank variance).
    pub degenerate_cor_aro: bool,
    pub degenerate_cor_val: bool,
}

impl GamFeatures {
    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| self.values[i])
    }

    /// Sonnets without a single lexicon match carry no usable signal and are
    /// left out of training sets.
    pub fn no_matches(&self) -> bool {
        self.matched_count == 0
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Average (fractional) ranks, 1-based; ties share the mean of their ranks.
pub(crate) fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[order[k]] = r;
        }
        i = j + 1;
    }
    ranks
}

fn spearman_inner(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let (mx, my) = (mean(&rx), mean(&ry));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation; 0 for fewer than two points or constant input.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, LexiconError> {
    if xs.len() != ys.len() {
        return Err(LexiconError::LengthMismatch(xs.len(), ys.len()));
    }
    Ok(spearman_inner(xs, ys).unwrap_or(0.0))
}

pub fn extract_features(p: &ProcessedSonnet, lex: &MergedLexicon) -> GamFeatures {
    let mut values = vec![0.0; N_FEATURES];
    let matched: Vec<(usize, &super::Ratings)> = p
        .tokens
        .iter()
        .filter_map(|t| lex.lookup(&t.stem).map(|r| (t.position, r)))
        .collect();

    for d in Dimension::ALL {
        let means: Vec<f64> = matched.iter().filter_map(|(_, r)| r.mean(d)).collect();
        let sds: Vec<f64> = matched.iter().filter_map(|(_, r)| r.sd(d)).collect();
        values[2 * d.index()] = mean(&means);
        values[2 * d.index() + 1] = mean(&sds);
    }

    let series = |d: Dimension| -> (Vec<f64>, Vec<f64>) {
        matched
            .iter()
            .filter_map(|(pos, r)| r.mean(d).map(|m| (*pos as f64, m)))
            .unzip()
    };
    let (aro_pos, aro) = series(Dimension::Arousal);
    let (val_pos, val) = series(Dimension::Valence);

    let extremes = |xs: &[f64]| -> (f64, f64) {
        if xs.is_empty() {
            (0.0, 0.0)
        } else {
            let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
            (max, min)
        }
    };
    let (max_a, min_a) = extremes(&aro);
    let (max_v, min_v) = extremes(&val);
    values[MAX_AROUSAL] = max_a;
    values[MIN_AROUSAL] = min_a;
    values[MAX_VALENCE] = max_v;
    values[MIN_VALENCE] = min_v;
    values[AROUSAL_SPAN] = max_a - min_a;
    values[VALENCE_SPAN] = max_v - min_v;

    let cor_aro = spearman_inner(&aro, &aro_pos);
    let cor_val = spearman_inner(&val, &val_pos);
    values[COR_ARO] = cor_aro.unwrap_or(0.0);
    values[COR_VAL] = cor_val.unwrap_or(0.0);
    values[ABS_COR_ARO] = values[COR_ARO].abs();
    values[ABS_COR_VAL] = values[COR_VAL].abs();

    // x / (1/sqrt(N)) == x * sqrt(N)
    let sqrt_n = (p.tokens.len() as f64).sqrt();
    values[SIGMA_ARO] = values[2 * Dimension::Arousal.index()] * sqrt_n;
    values[SIGMA_VAL] = values[2 * Dimension::Valence.index()] * sqrt_n;

    GamFeatures {
        id: p.id.clone(),
        values,
        matched_count: matched.len(),
        token_count: p.tokens.len(),
        degenerate_cor_aro: cor_aro.is_none(),
        degenerate_cor_val: cor_val.is_none(),
    }
}
