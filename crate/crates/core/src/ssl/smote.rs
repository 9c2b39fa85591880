use ndarray::{Array2, ArrayView2};
use rand::Rng;

use super::spreading::nearest;
use super::SslError;

/// Synthetic minority points `x + u * (x_nn - x)`, with `x` drawn uniformly
/// from the minority rows, `x_nn` uniformly from its `min(k, n - 1)` nearest
/// minority neighbours and `u` uniform in `[0, 1)`.
pub fn smote(
    x_min: ArrayView2<f64>,
    k: usize,
    n_synthetic: usize,
    rng: &mut impl Rng,
) -> Result<Array2<f64>, SslError> {
    let n = x_min.nrows();
    if n < 2 {
        return Err(SslError::TooFewSamples(n));
    }
    if k == 0 {
        return Err(SslError::Param("smote k must be at least 1".into()));
    }
    let kk = k.min(n - 1);
    let mut dists = vec![0.0; n];
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            for (j, d) in dists.iter_mut().enumerate() {
                *d = x_min
                    .row(i)
                    .iter()
                    .zip(x_min.row(j))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
            }
            nearest(&dists, i, kk)
        })
        .collect();
    let mut out = Array2::zeros((n_synthetic, x_min.ncols()));
    for mut row in out.rows_mut() {
        let i = rng.gen_range(0..n);
        let j = neighbours[i][rng.gen_range(0..kk)];
        let u: f64 = rng.gen();
        for ((o, a), b) in row.iter_mut().zip(x_min.row(i)).zip(x_min.row(j)) {
            *o = a + u * (b - a);
        }
    }
    Ok(out)
}

/// Oversamples every class with fewer rows than the largest class up to the
/// largest class's count. Classes with a single row are left as they are.
pub fn equalize(
    x: ArrayView2<f64>,
    y: &[usize],
    n_classes: usize,
    k: usize,
    rng: &mut impl Rng,
) -> Result<(Array2<f64>, Vec<usize>), SslError> {
    let mut counts = vec![0usize; n_classes];
    for &c in y {
        counts[c] += 1;
    }
    let target = counts.iter().copied().max().unwrap_or(0);
    let mut rows: Vec<Array2<f64>> = vec![x.to_owned()];
    let mut labels = y.to_vec();
    for c in 0..n_classes {
        let need = target - counts[c];
        if counts[c] == 0 || need == 0 {
            continue;
        }
        if counts[c] < 2 {
            log::warn!("class {c} has a single row; skipping oversampling");
            continue;
        }
        let idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == c).collect();
        let minority = x.select(ndarray::Axis(0), &idx);
        rows.push(smote(minority.view(), k, need, rng)?);
        labels.extend(std::iter::repeat_n(c, need));
    }
    let views: Vec<ArrayView2<f64>> = rows.iter().map(|a| a.view()).collect();
    let stacked = ndarray::concatenate(ndarray::Axis(0), &views)
        .map_err(|e| SslError::Param(e.to_string()))?;
    Ok((stacked, labels))
}
