//! Classification metrics over class-index labels.

use ndarray::ArrayView2;

use super::EvalError;

fn check_lengths(a: usize, b: usize) -> Result<(), EvalError> {
    if a != b {
        return Err(EvalError::LengthMismatch(a, b));
    }
    if a == 0 {
        return Err(EvalError::Empty);
    }
    Ok(())
}

fn confusion(y_true: &[usize], y_pred: &[usize]) -> Vec<Vec<u64>> {
    let k = y_true.iter().chain(y_pred).copied().max().unwrap_or(0) + 1;
    let mut m = vec![vec![0u64; k]; k];
    for (t, p) in y_true.iter().zip(y_pred) {
        m[*t][*p] += 1;
    }
    m
}

/// Per-class F1 averaged with weights proportional to true support.
pub fn f1_weighted(y_true: &[usize], y_pred: &[usize]) -> Result<f64, EvalError> {
    check_lengths(y_true.len(), y_pred.len())?;
    let m = confusion(y_true, y_pred);
    let n = y_true.len() as f64;
    let mut total = 0.0;
    for c in 0..m.len() {
        let support: u64 = m[c].iter().sum();
        if support == 0 {
            continue;
        }
        let tp = m[c][c];
        let predicted: u64 = m.iter().map(|row| row[c]).sum();
        let denom = support + predicted;
        let f1 = if denom == 0 { 0.0 } else { 2.0 * tp as f64 / denom as f64 };
        total += support as f64 / n * f1;
    }
    Ok(total)
}

/// `(p_o - p_e) / (1 - p_e)`, or 0 when chance agreement is 1.
pub fn cohens_kappa(y_true: &[usize], y_pred: &[usize]) -> Result<f64, EvalError> {
    check_lengths(y_true.len(), y_pred.len())?;
    let m = confusion(y_true, y_pred);
    let n = y_true.len() as f64;
    let agree: u64 = (0..m.len()).map(|c| m[c][c]).sum();
    let chance: u64 = (0..m.len())
        .map(|c| m[c].iter().sum::<u64>() * m.iter().map(|row| row[c]).sum::<u64>())
        .sum();
    let p_o = agree as f64 / n;
    let p_e = chance as f64 / (n * n);
    if p_e == 1.0 {
        return Ok(0.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Average 1-based ranks, ties sharing the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Probability that a random positive outscores a random negative, counting
/// ties as one half.
pub fn auc_binary(y_true: &[bool], scores: &[f64]) -> Result<f64, EvalError> {
    check_lengths(y_true.len(), scores.len())?;
    let n_pos = y_true.iter().filter(|y| **y).count();
    let n_neg = y_true.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(EvalError::SingleClass);
    }
    let ranks = average_ranks(scores);
    let rank_sum: f64 = ranks.iter().zip(y_true).filter(|(_, y)| **y).map(|(r, _)| r).sum();
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Macro average of one-vs-rest AUCs over the classes present in `y_true`.
pub fn auc_multiclass(y_true: &[usize], proba: ArrayView2<f64>) -> Result<f64, EvalError> {
    check_lengths(y_true.len(), proba.nrows())?;
    let mut present: Vec<usize> = y_true.to_vec();
    present.sort_unstable();
    present.dedup();
    if present.len() < 2 {
        return Err(EvalError::SingleClass);
    }
    if let Some(c) = present.iter().find(|c| **c >= proba.ncols()) {
        return Err(EvalError::Shape(format!("class {c} has no probability column")));
    }
    let mut total = 0.0;
    for &c in &present {
        let y: Vec<bool> = y_true.iter().map(|t| *t == c).collect();
        total += auc_binary(&y, &proba.column(c).to_vec())?;
    }
    Ok(total / present.len() as f64)
}

/// The benchmark's AUC: the class-1 score for two-class problems, macro
/// one-vs-rest otherwise.
pub fn auc(y_true: &[usize], proba: ArrayView2<f64>) -> Result<f64, EvalError> {
    if proba.ncols() == 2 {
        check_lengths(y_true.len(), proba.nrows())?;
        let y: Vec<bool> = y_true.iter().map(|t| *t == 1).collect();
        auc_binary(&y, &proba.column(1).to_vec())
    } else {
        auc_multiclass(y_true, proba)
    }
}
