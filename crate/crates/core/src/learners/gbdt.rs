//! Histogram gradient-boosted decision trees with leaf-wise growth.
//!
//! Binary problems boost a single logistic ensemble; problems with three or
//! more classes boost one ensemble per class under a softmax. Features are
//! bucketed into at most `max_bins` bins whose boundaries are midpoints
//! between distinct training values, and a split sends `x <= threshold` left.
//! Among equal-gain splits the lowest feature index wins, then the lowest
//! threshold.

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{check_columns, BaseLearner, Classifier, LearnerError, ModelDump};

const MIN_GAIN: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbdtParams {
    pub n_trees: usize,
    pub learning_rate: f64,
    pub max_leaves: usize,
    pub min_samples_leaf: usize,
    pub max_bins: usize,
    pub lambda_l2: f64,
    pub min_sum_hessian: f64,
    /// Recorded with the model; training itself draws no random numbers.
    pub seed: u64,
}

impl Default for GbdtParams {
    fn default() -> Self {
        GbdtParams {
            n_trees: 100,
            learning_rate: 0.1,
            max_leaves: 31,
            min_samples_leaf: 20,
            max_bins: 255,
            lambda_l2: 0.0,
            min_sum_hessian: 1e-3,
            seed: 0,
        }
    }
}

impl GbdtParams {
    pub fn validate(&self) -> Result<(), LearnerError> {
        let bad = |m: &str| Err(LearnerError::Param(m.to_string()));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if self.max_leaves < 1 {
            return bad("max_leaves must be at least 1");
        }
        if self.min_samples_leaf < 1 {
            return bad("min_samples_leaf must be at least 1");
        }
        if !(2..=256).contains(&self.max_bins) {
            return bad("max_bins must be in 2..=256");
        }
        if !(self.lambda_l2 >= 0.0) || !(self.min_sum_hessian >= 0.0) {
            return bad("lambda_l2 and min_sum_hessian must be non-negative");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// Node 0 is the root. Leaf values already include the learning rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict_row(&self, row: ArrayView1<f64>) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel {
    pub n_features: usize,
    pub n_classes: usize,
    /// Classes seen in training, ascending. Other classes get probability 0.
    pub classes: Vec<usize>,
    pub params: GbdtParams,
    /// One raw score for a binary model, else one log prior per seen class.
    pub base_score: Vec<f64>,
    /// `trees[output][round]`; one output for binary models.
    pub trees: Vec<Vec<Tree>>,
}

impl GbdtModel {
    pub fn n_outputs(&self) -> usize {
        self.base_score.len()
    }

    pub fn total_trees(&self) -> usize {
        self.trees.iter().map(Vec::len).sum()
    }

    fn raw_scores(&self, row: ArrayView1<f64>) -> Vec<f64> {
        self.base_score
            .iter()
            .zip(&self.trees)
            .map(|(b, ts)| ts.iter().fold(*b, |acc, t| acc + t.predict_row(row)))
            .collect()
    }
}

impl Classifier for GbdtModel {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_proba(&self, x: ArrayView2<f64>) -> Result<Array2<f64>, LearnerError> {
        check_columns(x, self.n_features)?;
        let mut out = Array2::zeros((x.nrows(), self.n_classes));
        let mut local = vec![0.0; self.classes.len()];
        for (r, row) in x.rows().into_iter().enumerate() {
            let f = self.raw_scores(row);
            link(&f, &mut local);
            for (c, p) in self.classes.iter().zip(&local) {
                out[[r, *c]] = *p;
            }
        }
        Ok(out)
    }

    fn dump(&self) -> ModelDump {
        ModelDump::Gbdt(self.clone())
    }
}

/// Raw scores to class probabilities over the seen classes.
fn link(f: &[f64], out: &mut [f64]) {
    if f.len() == 1 {
        out[1] = 1.0 / (1.0 + (-f[0]).exp());
        out[0] = 1.0 / (1.0 + f[0].exp());
    } else {
        let m = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (o, v) in out.iter_mut().zip(f) {
            *o = (v - m).exp();
        }
        // Summing in sorted order keeps the result independent of class order.
        let mut terms = out.to_vec();
        terms.sort_by(f64::total_cmp);
        let z: f64 = terms.iter().sum();
        out.iter_mut().for_each(|o| *o /= z);
    }
}

pub struct Gbdt {
    pub params: GbdtParams,
}

impl Gbdt {
    pub fn new(params: GbdtParams) -> Self {
        Gbdt { params }
    }

    pub fn fit_model(
        &self,
        x: ArrayView2<f64>,
        y: &[usize],
        n_classes: usize,
        weights: Option<&[f64]>,
    ) -> Result<GbdtModel, LearnerError> {
        fit(&self.params, x, y, n_classes, weights).map(|(m, _)| m)
    }

    /// Like [`Gbdt::fit_model`], also returning the weighted mean training
    /// log loss before the first round and after every round.
    pub fn fit_traced(
        &self,
        x: ArrayView2<f64>,
        y: &[usize],
        n_classes: usize,
        weights: Option<&[f64]>,
    ) -> Result<(GbdtModel, Vec<f64>), LearnerError> {
        fit(&self.params, x, y, n_classes, weights)
    }
}

impl BaseLearner for Gbdt {
    fn name(&self) -> &str {
        "GBDT"
    }

    fn fit(
        &self,
        x: ArrayView2<f64>,
        y: &[usize],
        n_classes: usize,
        weights: Option<&[f64]>,
    ) -> Result<Box<dyn Classifier>, LearnerError> {
        Ok(Box::new(self.fit_model(x, y, n_classes, weights)?))
    }
}

struct Binned {
    cols: Vec<Vec<u8>>,
    thresholds: Vec<Vec<f64>>,
    offsets: Vec<usize>,
    total_bins: usize,
}

fn bin_thresholds(col: &[f64], max_bins: usize) -> Vec<f64> {
    let mut sorted = col.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut distinct: Vec<(f64, usize)> = Vec::new();
    for v in sorted {
        match distinct.last_mut() {
            Some((d, c)) if *d == v => *c += 1,
            _ => distinct.push((v, 1)),
        }
    }
    let mid = |i: usize| {
        let (a, b) = (distinct[i].0, distinct[i + 1].0);
        a + (b - a) / 2.0
    };
    let mut cuts = Vec::new();
    if distinct.len() <= max_bins {
        cuts.extend((0..distinct.len().saturating_sub(1)).map(mid));
    } else {
        // Equal-frequency cuts placed between distinct values.
        let n = col.len() as f64;
        let per_bin = n / max_bins as f64;
        let mut acc = 0usize;
        for i in 0..distinct.len() - 1 {
            acc += distinct[i].1;
            if cuts.len() + 1 >= max_bins {
                break;
            }
            if acc as f64 >= per_bin * (cuts.len() + 1) as f64 {
                cuts.push(mid(i));
            }
        }
    }
    cuts.dedup();
    cuts
}

impl Binned {
    fn new(x: ArrayView2<f64>, max_bins: usize) -> Self {
        let mut cols = Vec::with_capacity(x.ncols());
        let mut thresholds = Vec::with_capacity(x.ncols());
        let mut offsets = Vec::with_capacity(x.ncols());
        let mut total_bins = 0;
        for col in x.columns() {
            let values = col.to_vec();
            let cuts = bin_thresholds(&values, max_bins);
            cols.push(
                values
                    .iter()
                    .map(|v| cuts.partition_point(|t| t < v) as u8)
                    .collect(),
            );
            offsets.push(total_bins);
            total_bins += cuts.len() + 1;
            thresholds.push(cuts);
        }
        Binned {
            cols,
            thresholds,
            offsets,
            total_bins,
        }
    }

    fn n_bins(&self, f: usize) -> usize {
        self.thresholds[f].len() + 1
    }
}

#[derive(Clone, Copy, Default)]
struct HistBin {
    g: f64,
    h: f64,
    n: u32,
}

#[derive(Clone, Copy)]
struct Candidate {
    feature: usize,
    bin: usize,
    gain: f64,
}

struct Leaf {
    node: usize,
    rows: Vec<u32>,
    hist: Option<Vec<HistBin>>,
    g: f64,
    h: f64,
    best: Option<Candidate>,
}

fn build_hist(data: &Binned, rows: &[u32], g: &[f64], h: &[f64]) -> Vec<HistBin> {
    let mut hist = vec![HistBin::default(); data.total_bins];
    for (f, col) in data.cols.iter().enumerate() {
        let base = data.offsets[f];
        for &r in rows {
            let b = &mut hist[base + col[r as usize] as usize];
            b.g += g[r as usize];
            b.h += h[r as usize];
            b.n += 1;
        }
    }
    hist
}

fn best_split(data: &Binned, hist: &[HistBin], g: f64, h: f64, n: usize, p: &GbdtParams) -> Option<Candidate> {
    if n < 2 * p.min_samples_leaf {
        return None;
    }
    let lam = p.lambda_l2;
    let parent = g * g / (h + lam);
    let mut best: Option<Candidate> = None;
    for f in 0..data.cols.len() {
        let base = data.offsets[f];
        let (mut gl, mut hl, mut nl) = (0.0, 0.0, 0usize);
        for b in 0..data.n_bins(f) - 1 {
            let bin = hist[base + b];
            gl += bin.g;
            hl += bin.h;
            nl += bin.n as usize;
            if nl < p.min_samples_leaf {
                continue;
            }
            if n - nl < p.min_samples_leaf {
                break;
            }
            let (gr, hr) = (g - gl, h - hl);
            if hl < p.min_sum_hessian || hr < p.min_sum_hessian {
                continue;
            }
            let gain = gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent;
            if gain > MIN_GAIN && best.is_none_or(|c| gain > c.gain) {
                best = Some(Candidate { feature: f, bin: b, gain });
            }
        }
    }
    best
}

fn leaf_value(g: f64, h: f64, p: &GbdtParams) -> f64 {
    let d = h + p.lambda_l2;
    if d > 0.0 {
        -g / d * p.learning_rate
    } else {
        0.0
    }
}

/// Grows one tree and returns it together with each row's leaf value.
fn grow_tree(data: &Binned, g: &[f64], h: &[f64], p: &GbdtParams) -> (Tree, Vec<f64>) {
    let n = g.len();
    let rows: Vec<u32> = (0..n as u32).collect();
    let hist = build_hist(data, &rows, g, h);
    let (gs, hs) = (g.iter().sum::<f64>(), h.iter().sum::<f64>());
    let best = best_split(data, &hist, gs, hs, n, p);
    let mut nodes = vec![Node::Leaf { value: 0.0 }];
    let mut leaves = vec![Leaf {
        node: 0,
        rows,
        hist: best.map(|_| hist),
        g: gs,
        h: hs,
        best,
    }];
    while leaves.len() < p.max_leaves {
        let mut pick: Option<usize> = None;
        for (i, l) in leaves.iter().enumerate() {
            if let Some(c) = l.best {
                if pick.is_none_or(|j| c.gain > leaves[j].best.unwrap().gain) {
                    pick = Some(i);
                }
            }
        }
        let Some(i) = pick else { break };
        let parent = leaves.remove(i);
        let cand = parent.best.unwrap();
        let col = &data.cols[cand.feature];
        let (left, right): (Vec<u32>, Vec<u32>) =
            parent.rows.iter().partition(|&&r| col[r as usize] as usize <= cand.bin);
        let parent_hist = parent.hist.expect("splittable leaf keeps its histogram");
        let small_is_left = left.len() <= right.len();
        let small_hist = build_hist(data, if small_is_left { &left } else { &right }, g, h);
        let large_hist: Vec<HistBin> = parent_hist
            .iter()
            .zip(&small_hist)
            .map(|(a, b)| HistBin {
                g: a.g - b.g,
                h: a.h - b.h,
                n: a.n - b.n,
            })
            .collect();
        let (lh, rh) = if small_is_left {
            (small_hist, large_hist)
        } else {
            (large_hist, small_hist)
        };
        let sum = |rs: &[u32], v: &[f64]| rs.iter().map(|&r| v[r as usize]).sum::<f64>();
        let li = nodes.len();
        nodes[parent.node] = Node::Split {
            feature: cand.feature,
            threshold: data.thresholds[cand.feature][cand.bin],
            left: li,
            right: li + 1,
        };
        nodes.push(Node::Leaf { value: 0.0 });
        nodes.push(Node::Leaf { value: 0.0 });
        for (node, rs, hist) in [(li, left, lh), (li + 1, right, rh)] {
            let (gsum, hsum) = (sum(&rs, g), sum(&rs, h));
            let best = best_split(data, &hist, gsum, hsum, rs.len(), p);
            leaves.push(Leaf {
                node,
                rows: rs,
                hist: best.map(|_| hist),
                g: gsum,
                h: hsum,
                best,
            });
        }
    }
    let mut out = vec![0.0; n];
    for l in &leaves {
        let v = leaf_value(l.g, l.h, p);
        nodes[l.node] = Node::Leaf { value: v };
        for &r in &l.rows {
            out[r as usize] = v;
        }
    }
    (Tree { nodes }, out)
}

fn log_loss(f: &[f64], y: &[usize], w: &[f64], k: usize) -> f64 {
    let mut probs = vec![0.0; k];
    let mut total = 0.0;
    let mut wsum = 0.0;
    let outs = if k == 2 { 1 } else { k };
    for (r, (&c, &wi)) in y.iter().zip(w).enumerate() {
        link(&f[r * outs..(r + 1) * outs], &mut probs);
        total -= wi * probs[c].max(f64::MIN_POSITIVE).ln();
        wsum += wi;
    }
    total / wsum
}

fn fit(
    p: &GbdtParams,
    x: ArrayView2<f64>,
    y: &[usize],
    n_classes: usize,
    weights: Option<&[f64]>,
) -> Result<(GbdtModel, Vec<f64>), LearnerError> {
    p.validate()?;
    let n = x.nrows();
    if n != y.len() {
        return Err(LearnerError::Shape(format!("{n} rows but {} labels", y.len())));
    }
    if n < 2 {
        return Err(LearnerError::Degenerate("need at least 2 rows".into()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(LearnerError::Shape("non-finite feature value".into()));
    }
    if let Some(&c) = y.iter().find(|&&c| c >= n_classes) {
        return Err(LearnerError::Shape(format!("label {c} outside 0..{n_classes}")));
    }
    let w: Vec<f64> = match weights {
        Some(w) if w.len() != n => {
            return Err(LearnerError::Shape(format!("{n} rows but {} weights", w.len())))
        }
        Some(w) if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) => {
            return Err(LearnerError::Shape("weights must be finite and non-negative".into()))
        }
        Some(w) => w.to_vec(),
        None => vec![1.0; n],
    };
    let mut class_w = vec![0.0; n_classes];
    for (&c, &wi) in y.iter().zip(&w) {
        class_w[c] += wi;
    }
    let classes: Vec<usize> = (0..n_classes).filter(|&c| class_w[c] > 0.0).collect();
    if classes.len() < 2 {
        return Err(LearnerError::Degenerate(
            "training labels contain a single class".into(),
        ));
    }
    let k = classes.len();
    let mut local_of = vec![usize::MAX; n_classes];
    for (i, &c) in classes.iter().enumerate() {
        local_of[c] = i;
    }
    let ly: Vec<usize> = y.iter().map(|&c| local_of[c]).collect();
    let base_score: Vec<f64> = if k == 2 {
        vec![class_w[classes[1]].ln() - class_w[classes[0]].ln()]
    } else {
        let total: f64 = class_w.iter().sum();
        classes.iter().map(|&c| (class_w[c] / total).ln()).collect()
    };
    let outs = base_score.len();
    let data = Binned::new(x, p.max_bins);
    let mut f: Vec<f64> = (0..n).flat_map(|_| base_score.iter().copied()).collect();
    let mut trees: Vec<Vec<Tree>> = vec![Vec::with_capacity(p.n_trees); outs];
    let mut losses = vec![log_loss(&f, &ly, &w, k)];
    let mut probs = vec![0.0; k];
    let mut g = vec![vec![0.0; n]; outs];
    let mut h = vec![vec![0.0; n]; outs];
    for _ in 0..p.n_trees {
        for r in 0..n {
            link(&f[r * outs..(r + 1) * outs], &mut probs);
            if outs == 1 {
                // Written so that swapping the two classes negates g exactly.
                g[0][r] = if ly[r] == 1 { -w[r] * probs[0] } else { w[r] * probs[1] };
                h[0][r] = w[r] * (probs[0] * probs[1]);
            } else {
                for o in 0..outs {
                    let target = if ly[r] == o { 1.0 } else { 0.0 };
                    g[o][r] = w[r] * (probs[o] - target);
                    h[o][r] = w[r] * probs[o] * (1.0 - probs[o]);
                }
            }
        }
        for o in 0..outs {
            let (tree, delta) = grow_tree(&data, &g[o], &h[o], p);
            for (r, d) in delta.iter().enumerate() {
                f[r * outs + o] += d;
            }
            trees[o].push(tree);
        }
        losses.push(log_loss(&f, &ly, &w, k));
    }
    Ok((
        GbdtModel {
            n_features: x.ncols(),
            n_classes,
            classes,
            params: p.clone(),
            base_score,
            trees,
        },
        losses,
    ))
}
