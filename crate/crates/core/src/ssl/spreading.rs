use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{SslError, SslProblem};
use crate::learners::argmax;

/// RBF width: a fixed value, or `1 / (n_features * Var(X))` computed from
/// the problem matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gamma {
    Value(f64),
    Scale,
}

impl Gamma {
    pub fn resolve(self, p: &SslProblem) -> f64 {
        match self {
            Gamma::Value(g) => g,
            Gamma::Scale => {
                let n = p.x.len() as f64;
                let mean = p.x.iter().sum::<f64>() / n;
                let var = p.x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                if var > 0.0 {
                    1.0 / (p.x.ncols() as f64 * var)
                } else {
                    1.0
                }
            }
        }
    }
}

impl Serialize for Gamma {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Gamma::Value(g) => s.serialize_f64(*g),
            Gamma::Scale => s.serialize_str("scale"),
        }
    }
}

impl<'de> Deserialize<'de> for Gamma {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(g) if g > 0.0 && g.is_finite() => Ok(Gamma::Value(g)),
            Raw::Num(g) => Err(serde::de::Error::custom(format!("gamma must be positive, got {g}"))),
            Raw::Str(s) if s == "scale" => Ok(Gamma::Scale),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "gamma must be a number or \"scale\", got {s:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kernel {
    Knn(usize),
    Rbf(Gamma),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpreadParams {
    pub alpha: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for SpreadParams {
    fn default() -> Self {
        SpreadParams {
            alpha: 0.2,
            max_iter: 30,
            tol: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpreadResult {
    /// Row-normalized label distributions.
    pub f: Array2<f64>,
    pub hard_labels: Vec<usize>,
    pub n_iter: usize,
    pub converged: bool,
    /// False for rows that received no mass from any labeled row and were
    /// assigned the labeled-class prior instead.
    pub connected: Vec<bool>,
}

/// Affinity matrix with a zero diagonal; exactly symmetric.
pub fn affinity(p: &SslProblem, kernel: Kernel) -> Result<Array2<f64>, SslError> {
    let n = p.n_rows();
    let d = p.sq_dists();
    match kernel {
        Kernel::Rbf(g) => {
            let gamma = g.resolve(p);
            let mut w = Array2::zeros((n, n));
            for i in 0..n {
                for j in i + 1..n {
                    let v = (-gamma * d[[i, j]]).exp();
                    w[[i, j]] = v;
                    w[[j, i]] = v;
                }
            }
            Ok(w)
        }
        Kernel::Knn(k) => {
            if k == 0 || k >= n {
                return Err(SslError::Kernel(format!("knn needs 0 < k < {n} rows, got k = {k}")));
            }
            let mut w = Array2::zeros((n, n));
            for i in 0..n {
                for j in nearest(d.row(i).as_slice().expect("contiguous"), i, k) {
                    w[[i, j]] = 1.0;
                    w[[j, i]] = 1.0;
                }
            }
            Ok(w)
        }
    }
}

/// The `k` nearest rows to `i` by distance, ties to the lower index.
pub(crate) fn nearest(dists: &[f64], i: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..dists.len()).filter(|&j| j != i).collect();
    idx.sort_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// `D^-1/2 W D^-1/2`; isolated rows get a zero row and column.
pub fn normalized_affinity(w: &Array2<f64>) -> Array2<f64> {
    let inv_sqrt: Vec<f64> = w
        .rows()
        .into_iter()
        .map(|r| {
            let d: f64 = r.sum();
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    Array2::from_shape_fn(w.dim(), |(i, j)| w[[i, j]] * inv_sqrt[i] * inv_sqrt[j])
}

/// One-hot rows for labeled points, zero rows elsewhere.
pub fn initial_labels(p: &SslProblem) -> Array2<f64> {
    let mut y = Array2::zeros((p.n_rows(), p.n_classes));
    for (i, l) in p.y.iter().enumerate() {
        if let Some(c) = l {
            y[[i, *c]] = 1.0;
        }
    }
    y
}

pub fn label_spreading(p: &SslProblem, kernel: Kernel, params: &SpreadParams) -> Result<SpreadResult, SslError> {
    p.validate()?;
    if !(params.alpha > 0.0 && params.alpha < 1.0) {
        return Err(SslError::Param(format!("alpha must be in (0, 1), got {}", params.alpha)));
    }
    let s = normalized_affinity(&affinity(p, kernel)?);
    let y = initial_labels(p);
    let alpha = params.alpha;
    let mut f = y.clone();
    let mut n_iter = 0;
    let mut converged = false;
    while n_iter < params.max_iter {
        let next = s.dot(&f) * alpha + &y * (1.0 - alpha);
        let change = next
            .iter()
            .zip(f.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        f = next;
        n_iter += 1;
        if change < params.tol {
            converged = true;
            break;
        }
    }
    let prior = p.labeled_prior();
    let mut connected = vec![true; p.n_rows()];
    for (i, mut row) in f.rows_mut().into_iter().enumerate() {
        let z: f64 = row.sum();
        if z > 0.0 {
            row.mapv_inplace(|v| v / z);
        } else {
            connected[i] = false;
            row.assign(&ndarray::ArrayView1::from(&prior));
        }
    }
    let hard_labels = f
        .rows()
        .into_iter()
        .map(|r| argmax(r.as_slice().expect("contiguous")))
        .collect();
    Ok(SpreadResult {
        f,
        hard_labels,
        n_iter,
        converged,
        connected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn problem(x: Array2<f64>, y: Vec<Option<usize>>, k: usize) -> SslProblem {
        SslProblem::new(x, y, k).unwrap()
    }

    #[test]
    fn disconnected_pairs_inherit_their_label() {
        let x = array![[0.0], [0.1], [10.0], [10.1]];
        let p = problem(x, vec![Some(0), None, Some(1), None], 2);
        let r = label_spreading(&p, Kernel::Knn(1), &SpreadParams::default()).unwrap();
        assert_eq!(r.hard_labels, vec![0, 0, 1, 1]);
        assert!(r.connected.iter().all(|c| *c));
    }

    #[test]
    fn near_clamped_limit_keeps_labels() {
        let x = array![[0.0], [0.3], [0.5], [1.0]];
        let y = vec![Some(0), Some(1), Some(1), Some(0)];
        let p = problem(x, y, 2);
        let params = SpreadParams {
            alpha: 0.01,
            ..Default::default()
        };
        let r = label_spreading(&p, Kernel::Rbf(Gamma::Value(1.0)), &params).unwrap();
        assert_eq!(r.hard_labels, vec![0, 1, 1, 0]);
    }

    #[test]
    fn isolated_rows_get_prior() {
        let x = array![[0.0], [0.1], [0.2], [100.0]];
        let p = problem(x, vec![Some(0), Some(1), Some(1), None], 2);
        let r = label_spreading(&p, Kernel::Rbf(Gamma::Value(20.0)), &SpreadParams::default()).unwrap();
        assert!(!r.connected[3]);
        assert_eq!(r.hard_labels[3], 1);
        assert!((r.f[[3, 1]] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn knn_bounds_checked() {
        let p = problem(array![[0.0], [1.0]], vec![Some(0), Some(1)], 2);
        assert!(matches!(
            label_spreading(&p, Kernel::Knn(2), &SpreadParams::default()),
            Err(SslError::Kernel(_))
        ));
    }

    #[test]
    fn affinities_are_symmetric() {
        let x = Array2::from_shape_fn((9, 3), |(i, j)| ((i * 7 + j * 3) % 5) as f64 * 0.37);
        let p = problem(x, (0..9).map(|i| (i < 2).then_some(i)).collect(), 2);
        for k in [Kernel::Knn(3), Kernel::Rbf(Gamma::Value(0.5))] {
            let w = affinity(&p, k).unwrap();
            assert_eq!(w, w.t());
            assert!(w.diag().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn gamma_serde() {
        #[derive(Deserialize)]
        struct G {
            g: Gamma,
        }
        assert_eq!(toml::from_str::<G>("g = 20.0").unwrap().g, Gamma::Value(20.0));
        assert_eq!(toml::from_str::<G>("g = \"scale\"").unwrap().g, Gamma::Scale);
        assert!(toml::from_str::<G>("g = \"auto\"").is_err());
        assert!(toml::from_str::<G>("g = -1.0").is_err());
    }
}
