//! The repeated random cross-validation benchmark.
//!
//! Work is split into cells `(repeat, category, semantic model, feature
//! variant)`. A cell builds one semi-supervised problem and fits every
//! requested predictive model on it. Cells run in parallel; each derives its
//! seeds from the master seed and its own identity, and results are merged
//! in cell order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use ndarray::Axis;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cv::{cv_sample, CvMode, CvSplit, SampleScope};
use super::metrics::{auc, cohens_kappa, f1_weighted};
use super::stats::{wilcoxon_signed_rank, PMethod};
use super::EvalError;
use crate::corpus::{Category, Corpus, Source};
use crate::embeddings::{assemble_design_matrix, ScalingStat, SentenceEmbeddingStore};
use crate::learners::{argmax, GbdtParams};
use crate::lexicon::GamFeatures;
use crate::seed::SeedPath;
use crate::ssl::{SslParams, SslProblem, StrategyRegistry, BASELINE_MODELS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Embeddings plus lexicon features, full unlabeled pool.
    Full,
    /// Embeddings only.
    NoGam,
    /// Unlabeled pool without the twentieth-century extension.
    DiscoOnly,
    /// Supervised GBDT on the labeled rows.
    Baseline,
    /// Supervised GBDT on SMOTE-balanced labeled rows.
    BaselineSmote,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::NoGam => "no_gam",
            Variant::DiscoOnly => "disco_only",
            Variant::Baseline => "baseline",
            Variant::BaselineSmote => "baseline_smote",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariantToggles {
    pub no_gam: bool,
    pub disco_only: bool,
    pub baselines: bool,
}

impl Default for VariantToggles {
    fn default() -> Self {
        VariantToggles {
            no_gam: true,
            disco_only: true,
            baselines: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSettings {
    /// Evaluated categories.
    pub categories: Vec<Category>,
    /// Canonical predictive-model names.
    pub predictive: Vec<String>,
    pub n_repeats: usize,
    pub n_per_value: usize,
    pub seed: u64,
    pub cv_mode: CvMode,
    pub sample_scope: SampleScope,
    pub variants: VariantToggles,
    pub gbdt: GbdtParams,
    pub ssl: SslParams,
}

pub struct SemanticModel {
    pub name: String,
    pub store: SentenceEmbeddingStore,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub category: Category,
    pub semantic_model: String,
    pub predictive_model: String,
    pub variant: Variant,
    pub repeat: usize,
    pub f1_weighted: Option<f64>,
    pub kappa: Option<f64>,
    pub auc: Option<f64>,
    pub test_class_counts: Vec<usize>,
    pub n_labeled: usize,
    pub n_unlabeled: usize,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub category: Category,
    pub semantic_model: String,
    pub predictive_model: String,
    pub variant: Variant,
    pub n_records: usize,
    pub n_failed: usize,
    pub f1_weighted_mean: Option<f64>,
    pub kappa_mean: Option<f64>,
    pub auc_mean: Option<f64>,
    pub auc_sd: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestCombination {
    pub category: Category,
    pub semantic_model: String,
    pub predictive_model: String,
    pub auc_mean: f64,
    pub f1_weighted_mean: Option<f64>,
    pub kappa_mean: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub category: Category,
    pub a: String,
    pub b: String,
    pub metric: String,
    pub n_pairs: usize,
    pub mean_a: Option<f64>,
    pub mean_b: Option<f64>,
    pub statistic: Option<f64>,
    /// 1.0 when every paired difference is zero.
    pub p_value: f64,
    pub method: Option<PMethod>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub repeat: usize,
    pub category: Option<Category>,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub train_ids: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    /// The resolved run configuration, when the caller supplies one.
    pub config: Option<serde_json::Value>,
    pub settings: BenchmarkSettings,
    pub semantic_models: Vec<String>,
    pub splits: Vec<SplitSummary>,
    pub records: Vec<MetricsRecord>,
    pub aggregates: Vec<Aggregate>,
    pub best: Vec<BestCombination>,
    pub comparisons: Vec<Comparison>,
}

/// A cell's semi-supervised problem. Rows are the pool ids in sorted order.
pub struct PreparedCell {
    pub ids: Vec<String>,
    pub problem: SslProblem,
    pub test_rows: Vec<usize>,
    /// Ground truth for test rows, when the corpus still has it.
    pub test_labels: Vec<Option<usize>>,
    pub n_labeled: usize,
    pub feature_names: Vec<String>,
    /// Lexicon-feature standardization fitted on the non-test rows.
    pub scaling: Vec<ScalingStat>,
}

/// Builds the problem for one category and split.
///
/// * labeled rows: training sonnets annotated for `category`;
/// * unlabeled rows: every test sonnet (labels hidden) plus the unannotated
///   corpus (without the twentieth-century extension when `disco_only`).
///
/// Sonnets with no lexicon match are left out of both training groups but
/// remain as test rows. Lexicon features are standardized on the non-test
/// rows only.
pub fn prepare_cell(
    corpus: &Corpus,
    gam: &BTreeMap<String, GamFeatures>,
    store: &SentenceEmbeddingStore,
    category: &Category,
    split: &CvSplit,
    use_gam: bool,
    disco_only: bool,
) -> Result<PreparedCell, EvalError> {
    let zero_match = |id: &str| gam.get(id).is_none_or(GamFeatures::no_matches);
    let label_of = |id: &str| corpus.annotations.get(id).and_then(|a| a.class_of(category));
    let mut pool: BTreeSet<String> = split.test_ids.clone();
    for id in &split.train_ids {
        if label_of(id).is_some() && !zero_match(id) {
            pool.insert(id.clone());
        }
    }
    for s in &corpus.sonnets {
        if corpus.annotations.contains_key(&s.id)
            || split.train_ids.contains(&s.id)
            || split.test_ids.contains(&s.id)
            || zero_match(&s.id)
            || (disco_only && s.source == Source::XxExtension)
        {
            continue;
        }
        pool.insert(s.id.clone());
    }
    let ids: Vec<String> = pool.into_iter().collect();
    let fit_ids: BTreeSet<String> = ids.iter().filter(|id| !split.test_ids.contains(*id)).cloned().collect();
    let design = assemble_design_matrix(&ids, store, use_gam.then_some(gam), &fit_ids)?;
    let y: Vec<Option<usize>> = ids
        .iter()
        .map(|id| if split.train_ids.contains(id) { label_of(id) } else { None })
        .collect();
    let n_labeled = y.iter().flatten().count();
    let test_rows: Vec<usize> = (0..ids.len()).filter(|&i| split.test_ids.contains(&ids[i])).collect();
    let test_labels = test_rows.iter().map(|&i| label_of(&ids[i])).collect();
    let problem = SslProblem::new(design.x, y, category.n_classes())?;
    Ok(PreparedCell {
        ids,
        problem,
        test_rows,
        test_labels,
        n_labeled,
        feature_names: design.feature_names,
        scaling: design.scaling,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CellKind {
    Full,
    NoGam,
    DiscoOnly,
}

struct CellSpec {
    repeat: usize,
    category: usize,
    semantic: usize,
    kind: CellKind,
}

/// Derived seed for one fitted model.
pub fn model_seed(master: u64, repeat: usize, category: &Category, semantic: &str, variant: Variant, model: &str) -> u64 {
    SeedPath::new(master)
        .num(repeat as u64)
        .label(&category.to_string())
        .label(semantic)
        .label(variant.as_str())
        .label(model)
        .value()
}

fn split_seed(master: u64, repeat: usize, category: Option<&Category>) -> u64 {
    let p = SeedPath::new(master).label("cv").num(repeat as u64);
    match category {
        Some(c) => p.label(&c.to_string()).value(),
        None => p.value(),
    }
}

/// Splits for every repeat, keyed by category in per-category mode and by
/// `None` in union mode.
pub fn draw_splits(corpus: &Corpus, settings: &BenchmarkSettings) -> BTreeMap<(usize, Option<Category>), CvSplit> {
    let mut out = BTreeMap::new();
    let sampled = match settings.sample_scope {
        SampleScope::All => Category::all(),
        SampleScope::Evaluated => settings.categories.clone(),
    };
    for r in 0..settings.n_repeats {
        match settings.cv_mode {
            CvMode::Union => {
                let seed = split_seed(settings.seed, r, None);
                let mut rng = SeedPath::new(seed).rng();
                let split = cv_sample(&corpus.annotations, &sampled, settings.n_per_value, r, seed, &mut rng);
                out.insert((r, None), split);
            }
            CvMode::PerCategory => {
                for c in &settings.categories {
                    let seed = split_seed(settings.seed, r, Some(c));
                    let mut rng = SeedPath::new(seed).rng();
                    let split =
                        cv_sample(&corpus.annotations, std::slice::from_ref(c), settings.n_per_value, r, seed, &mut rng);
                    out.insert((r, Some(c.clone())), split);
                }
            }
        }
    }
    out
}

fn score(
    cell: &PreparedCell,
    model: &dyn crate::learners::Classifier,
) -> Result<(f64, f64, Option<f64>), EvalError> {
    let (rows, labels): (Vec<usize>, Vec<usize>) = cell
        .test_rows
        .iter()
        .zip(&cell.test_labels)
        .filter_map(|(r, l)| l.map(|l| (*r, l)))
        .unzip();
    if rows.is_empty() {
        return Err(EvalError::Empty);
    }
    let proba = model.predict_proba(cell.problem.x.select(Axis(0), &rows).view())?;
    let pred: Vec<usize> = proba
        .rows()
        .into_iter()
        .map(|r| argmax(r.as_slice().expect("contiguous")))
        .collect();
    let f1 = f1_weighted(&labels, &pred)?;
    let kappa = cohens_kappa(&labels, &pred)?;
    let auc = match auc(&labels, proba.view()) {
        Ok(v) => Some(v),
        Err(EvalError::SingleClass) => None,
        Err(e) => return Err(e),
    };
    Ok((f1, kappa, auc))
}

struct Ctx<'a> {
    corpus: &'a Corpus,
    gam: &'a BTreeMap<String, GamFeatures>,
    semantic: &'a [SemanticModel],
    settings: &'a BenchmarkSettings,
    registry: &'a StrategyRegistry,
    splits: &'a BTreeMap<(usize, Option<Category>), CvSplit>,
}

fn run_cell(ctx: &Ctx, spec: &CellSpec) -> Vec<MetricsRecord> {
    let s = ctx.settings;
    let category = &s.categories[spec.category];
    let sem = &ctx.semantic[spec.semantic];
    let key = match s.cv_mode {
        CvMode::Union => (spec.repeat, None),
        CvMode::PerCategory => (spec.repeat, Some(category.clone())),
    };
    let split = &ctx.splits[&key];
    let (use_gam, disco_only) = match spec.kind {
        CellKind::Full => (true, false),
        CellKind::NoGam => (false, false),
        CellKind::DiscoOnly => (true, true),
    };
    let mut models: Vec<(String, Variant)> = s
        .predictive
        .iter()
        .map(|m| {
            let v = match spec.kind {
                CellKind::Full => Variant::Full,
                CellKind::NoGam => Variant::NoGam,
                CellKind::DiscoOnly => Variant::DiscoOnly,
            };
            (m.clone(), v)
        })
        .collect();
    if spec.kind == CellKind::Full && s.variants.baselines {
        models.push((BASELINE_MODELS[0].to_string(), Variant::Baseline));
        models.push((BASELINE_MODELS[1].to_string(), Variant::BaselineSmote));
    }
    let mut test_counts = vec![0usize; category.n_classes()];
    for id in &split.test_ids {
        if let Some(c) = ctx.corpus.annotations.get(id).and_then(|a| a.class_of(category)) {
            test_counts[c] += 1;
        }
    }
    let blank = |model: &str, variant: Variant| MetricsRecord {
        category: category.clone(),
        semantic_model: sem.name.clone(),
        predictive_model: model.to_string(),
        variant,
        repeat: spec.repeat,
        f1_weighted: None,
        kappa: None,
        auc: None,
        test_class_counts: test_counts.clone(),
        n_labeled: 0,
        n_unlabeled: 0,
        error: None,
    };
    let cell = match prepare_cell(ctx.corpus, ctx.gam, &sem.store, category, split, use_gam, disco_only) {
        Ok(c) => c,
        Err(e) => {
            log::warn!("{category} / {} / repeat {}: {e}", sem.name, spec.repeat);
            return models
                .iter()
                .map(|(m, v)| MetricsRecord {
                    error: Some(e.to_string()),
                    ..blank(m, *v)
                })
                .collect();
        }
    };
    models
        .iter()
        .map(|(m, v)| {
            let mut rec = blank(m, *v);
            rec.n_labeled = cell.n_labeled;
            let strategy = match ctx.registry.get(m) {
                Ok(st) => st,
                Err(e) => {
                    rec.error = Some(e.to_string());
                    return rec;
                }
            };
            rec.n_unlabeled = if strategy.supervised_only() {
                0
            } else {
                cell.problem.n_rows() - cell.n_labeled
            };
            let seed = model_seed(s.seed, spec.repeat, category, &sem.name, *v, m);
            let outcome = strategy
                .fit(&cell.problem, seed)
                .map_err(EvalError::from)
                .and_then(|model| score(&cell, model.as_ref()));
            match outcome {
                Ok((f1, kappa, auc)) => {
                    rec.f1_weighted = Some(f1);
                    rec.kappa = Some(kappa);
                    rec.auc = auc;
                }
                Err(e) => {
                    log::warn!("{category} / {} / {m} / repeat {}: {e}", sem.name, spec.repeat);
                    rec.error = Some(e.to_string());
                }
            }
            rec
        })
        .collect()
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample standard deviation; `None` below two values.
fn sd(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    Some((xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt())
}

type ComboKey = (Category, String, String, Variant);

fn combo_key(r: &MetricsRecord) -> ComboKey {
    (r.category.clone(), r.semantic_model.clone(), r.predictive_model.clone(), r.variant)
}

/// Per-combination means, in first-appearance order of the records.
pub fn aggregate(records: &[MetricsRecord]) -> Vec<Aggregate> {
    let mut order: Vec<ComboKey> = Vec::new();
    let mut groups: BTreeMap<ComboKey, Vec<&MetricsRecord>> = BTreeMap::new();
    for r in records {
        let k = combo_key(r);
        if !groups.contains_key(&k) {
            order.push(k.clone());
        }
        groups.entry(k).or_default().push(r);
    }
    order
        .into_iter()
        .map(|k| {
            let rs = &groups[&k];
            let col = |f: fn(&MetricsRecord) -> Option<f64>| rs.iter().filter_map(|r| f(r)).collect::<Vec<f64>>();
            let aucs = col(|r| r.auc);
            Aggregate {
                category: k.0,
                semantic_model: k.1,
                predictive_model: k.2,
                variant: k.3,
                n_records: rs.len(),
                n_failed: rs.iter().filter(|r| r.error.is_some()).count(),
                f1_weighted_mean: mean(&col(|r| r.f1_weighted)),
                kappa_mean: mean(&col(|r| r.kappa)),
                auc_mean: mean(&aucs),
                auc_sd: sd(&aucs),
            }
        })
        .collect()
}

/// Highest mean AUC among full-variant semi-supervised combinations; ties
/// keep the earlier combination.
pub fn best_combinations(aggs: &[Aggregate], categories: &[Category]) -> Vec<BestCombination> {
    categories
        .iter()
        .filter_map(|c| {
            let mut best: Option<&Aggregate> = None;
            for a in aggs.iter().filter(|a| &a.category == c && a.variant == Variant::Full) {
                if let Some(v) = a.auc_mean {
                    if best.is_none_or(|b| v > b.auc_mean.unwrap()) {
                        best = Some(a);
                    }
                }
            }
            best.map(|b| BestCombination {
                category: c.clone(),
                semantic_model: b.semantic_model.clone(),
                predictive_model: b.predictive_model.clone(),
                auc_mean: b.auc_mean.unwrap(),
                f1_weighted_mean: b.f1_weighted_mean,
                kappa_mean: b.kappa_mean,
            })
        })
        .collect()
}

fn label(sem: &str, model: &str, v: Variant) -> String {
    format!("{sem}/{model}/{v}")
}

/// Paired Wilcoxon test on AUC across repeats.
fn compare(records: &[MetricsRecord], category: &Category, a: &ComboKey, b: &ComboKey) -> Option<Comparison> {
    let by_repeat = |k: &ComboKey| -> BTreeMap<usize, f64> {
        records
            .iter()
            .filter(|r| &combo_key(r) == k)
            .filter_map(|r| r.auc.map(|v| (r.repeat, v)))
            .collect()
    };
    let (ma, mb) = (by_repeat(a), by_repeat(b));
    if mb.is_empty() && !records.iter().any(|r| &combo_key(r) == b) {
        return None;
    }
    let pairs: Vec<(f64, f64)> = ma.iter().filter_map(|(r, x)| mb.get(r).map(|y| (*x, *y))).collect();
    let (xa, xb): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
    let (statistic, p_value, method) = match wilcoxon_signed_rank(&xa, &xb) {
        Ok(w) => (Some(w.statistic), w.p_value, Some(w.method)),
        Err(_) => (None, 1.0, None),
    };
    Some(Comparison {
        category: category.clone(),
        a: label(&a.1, &a.2, a.3),
        b: label(&b.1, &b.2, b.3),
        metric: "auc".into(),
        n_pairs: pairs.len(),
        mean_a: mean(&xa),
        mean_b: mean(&xb),
        statistic,
        p_value,
        method,
    })
}

/// Best combination against both baselines, against itself without lexicon
/// features, and against itself without the extension corpus.
pub fn comparisons(records: &[MetricsRecord], best: &[BestCombination]) -> Vec<Comparison> {
    let mut out = Vec::new();
    for b in best {
        let key = |model: &str, v: Variant| (b.category.clone(), b.semantic_model.clone(), model.to_string(), v);
        let full = key(&b.predictive_model, Variant::Full);
        let others = [
            key(BASELINE_MODELS[0], Variant::Baseline),
            key(BASELINE_MODELS[1], Variant::BaselineSmote),
            key(&b.predictive_model, Variant::NoGam),
            key(&b.predictive_model, Variant::DiscoOnly),
        ];
        out.extend(others.iter().filter_map(|o| compare(records, &b.category, &full, o)));
    }
    out
}

pub fn run_benchmark(
    corpus: &Corpus,
    gam: &BTreeMap<String, GamFeatures>,
    semantic: &[SemanticModel],
    settings: &BenchmarkSettings,
    registry: &StrategyRegistry,
    jobs: Option<usize>,
) -> Result<BenchmarkReport, EvalError> {
    if settings.categories.is_empty() || settings.predictive.is_empty() || semantic.is_empty() {
        return Err(EvalError::Config(
            "need at least one category, predictive model and semantic model".into(),
        ));
    }
    if settings.n_repeats == 0 || settings.n_per_value == 0 {
        return Err(EvalError::Config("n_repeats and n_per_value must be positive".into()));
    }
    for m in &settings.predictive {
        registry.get(m)?;
    }
    let splits = draw_splits(corpus, settings);
    let mut kinds = vec![CellKind::Full];
    if settings.variants.no_gam {
        kinds.push(CellKind::NoGam);
    }
    if settings.variants.disco_only {
        kinds.push(CellKind::DiscoOnly);
    }
    let mut cells = Vec::new();
    for repeat in 0..settings.n_repeats {
        for category in 0..settings.categories.len() {
            for sem in 0..semantic.len() {
                for &kind in &kinds {
                    cells.push(CellSpec {
                        repeat,
                        category,
                        semantic: sem,
                        kind,
                    });
                }
            }
        }
    }
    let ctx = Ctx {
        corpus,
        gam,
        semantic,
        settings,
        registry,
        splits: &splits,
    };
    let run = || -> Vec<Vec<MetricsRecord>> { cells.par_iter().map(|c| run_cell(&ctx, c)).collect() };
    let per_cell = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| EvalError::Config(e.to_string()))?
            .install(run),
        None => run(),
    };
    let mut records: Vec<MetricsRecord> = per_cell.into_iter().flatten().collect();
    // Group by combination, then repeat, for readable output.
    records.sort_by(|a, b| {
        let pos = |r: &MetricsRecord| {
            (
                settings.categories.iter().position(|c| c == &r.category),
                semantic.iter().position(|s| s.name == r.semantic_model),
                r.variant,
                settings.predictive.iter().position(|m| m == &r.predictive_model),
                r.repeat,
            )
        };
        pos(a).cmp(&pos(b))
    });
    let aggregates = aggregate(&records);
    let best = best_combinations(&aggregates, &settings.categories);
    let comparisons = comparisons(&records, &best);
    let splits = splits
        .into_iter()
        .map(|((repeat, category), s)| SplitSummary {
            repeat,
            category,
            seed: s.seed,
            n_train: s.train_ids.len(),
            n_test: s.test_ids.len(),
            train_ids: s.train_ids.into_iter().collect(),
        })
        .collect();
    Ok(BenchmarkReport {
        config: None,
        settings: settings.clone(),
        semantic_models: semantic.iter().map(|s| s.name.clone()).collect(),
        splits,
        records,
        aggregates,
        best,
        comparisons,
    })
}
