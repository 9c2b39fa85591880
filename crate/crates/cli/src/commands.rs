use std::collections::{BTreeMap, BTreeSet};
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ndarray::Axis;
use serde::{Deserialize, Serialize};

use sonnet_core::config::{Pooling, RunConfig};
use sonnet_core::corpus::{corpus_stats, load_corpus, Category, CorpusStats};
use sonnet_core::embeddings::{
    assemble_with_scaling, normalize_lexicon, pool_token_store, read_embeddings, write_embeddings, EmbeddingFile,
    ScalingStat,
};
use sonnet_core::eval::{
    file_stem, min_sample_size, model_seed, prepare_cell, read_report, run_benchmark, summary_text, write_report_files,
    CvSplit, SemanticModel, Variant,
};
use sonnet_core::learners::ModelDump;
use sonnet_core::lexicon::{coverage, CoverageMode, FEATURE_NAMES};
use sonnet_core::pipeline::{gam_features, load_semantic, stem_word, Inputs};
use sonnet_core::synth::{write_planted_fixture, PlantedOptions};
use sonnet_core::textproc::preprocess;

use crate::{Command, ConfigArgs, CoverageModeArg, PoolingArg};

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Preprocess(c) => preprocess_cmd(&c),
        Command::Features(c) => features_cmd(&c),
        Command::Pool {
            cfg,
            input,
            output,
            pooling,
        } => pool_cmd(&cfg, &input, &output, pooling),
        Command::Coverage { cfg, mode } => coverage_cmd(&cfg, mode),
        Command::Train(c) => train_cmd(&c),
        Command::Predict {
            cfg,
            input,
            embeddings,
            models,
        } => predict_cmd(&cfg, &input, &embeddings, models.as_deref()),
        Command::Benchmark { cfg, repeats, jobs } => benchmark_cmd(&cfg, repeats, jobs),
        Command::Report { input, out, no_svg } => report_cmd(&input, out.as_deref(), !no_svg),
        Command::Synth { out, seed, repeats } => {
            let opts = PlantedOptions {
                seed,
                n_repeats: repeats,
                ..Default::default()
            };
            let f = write_planted_fixture(&out, &opts)?;
            println!("{}", f.config.display());
            Ok(())
        }
        Command::Power { alpha, power, effect } => {
            println!("{}", min_sample_size(alpha, power, effect)?);
            Ok(())
        }
    }
}

fn load_config(args: &ConfigArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.out {
        cfg.output_dir = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn output_dir(cfg: &RunConfig) -> Result<PathBuf> {
    std::fs::create_dir_all(&cfg.output_dir)
        .with_context(|| format!("creating {}", cfg.output_dir.display()))?;
    Ok(cfg.output_dir.clone())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[derive(Serialize)]
struct PreprocessStats {
    n_sonnets: usize,
    n_annotated: usize,
    n_tokens: usize,
    words: CorpusStats,
}

fn preprocess_cmd(args: &ConfigArgs) -> Result<()> {
    let cfg = load_config(args)?;
    let inputs = Inputs::load(&cfg, false)?;
    let dir = output_dir(&cfg)?;
    let mut lines = String::new();
    for p in &inputs.processed {
        lines.push_str(&serde_json::to_string(p)?);
        lines.push('\n');
    }
    write_file(&dir.join("processed.jsonl"), &lines)?;
    let stats = PreprocessStats {
        n_sonnets: inputs.corpus.sonnets.len(),
        n_annotated: inputs.corpus.annotations.len(),
        n_tokens: inputs.processed.iter().map(|p| p.len()).sum(),
        words: corpus_stats(&inputs.corpus, &inputs.stopwords),
    };
    write_file(&dir.join("stats.json"), &(serde_json::to_string_pretty(&stats)? + "\n"))?;
    println!(
        "{} sonnets, {} tokens after stopword removal",
        stats.n_sonnets, stats.n_tokens
    );
    Ok(())
}

fn features_cmd(args: &ConfigArgs) -> Result<()> {
    let cfg = load_config(args)?;
    let inputs = Inputs::load(&cfg, false)?;
    let dir = output_dir(&cfg)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["id".to_string()];
    header.extend(FEATURE_NAMES.iter().map(|s| s.to_string()));
    header.extend(
        ["matched_count", "token_count", "degenerate_cor_aro", "degenerate_cor_val"]
            .iter()
            .map(|s| s.to_string()),
    );
    w.write_record(&header)?;
    let mut zero = 0;
    for s in &inputs.corpus.sonnets {
        let f = &inputs.gam[&s.id];
        if f.no_matches() {
            zero += 1;
        }
        let mut row = vec![s.id.clone()];
        row.extend(f.values.iter().map(f64::to_string));
        row.push(f.matched_count.to_string());
        row.push(f.token_count.to_string());
        row.push(f.degenerate_cor_aro.to_string());
        row.push(f.degenerate_cor_val.to_string());
        w.write_record(&row)?;
    }
    let text = String::from_utf8(w.into_inner()?)?;
    write_file(&dir.join("features.csv"), &text)?;
    if zero > 0 {
        log::warn!("{zero} sonnets have no lexicon match; they are excluded from training");
    }
    println!("{} sonnets, {zero} without lexicon matches", inputs.corpus.sonnets.len());
    Ok(())
}

fn pool_cmd(args: &ConfigArgs, input: &Path, output: &str, pooling: PoolingArg) -> Result<()> {
    let cfg = load_config(args)?;
    let inputs = Inputs::load(&cfg, false)?;
    let store = match read_embeddings(input).with_context(|| format!("reading {}", input.display()))? {
        EmbeddingFile::Token(t) => t,
        EmbeddingFile::Sentence(_) => bail!("{} is already sentence-level", input.display()),
    };
    let weights: BTreeMap<String, f64> = match pooling {
        PoolingArg::Affective => normalize_lexicon(&inputs.lexicon)?,
        PoolingArg::Mean => store
            .vectors
            .values()
            .flatten()
            .map(|(t, _)| (stem_word(t), 1.0))
            .collect(),
    };
    let pooled = pool_token_store(&store, &weights, stem_word)?;
    let path = output_dir(&cfg)?.join(output);
    write_embeddings(&path, &EmbeddingFile::Sentence(pooled))?;
    println!("{}", path.display());
    Ok(())
}

fn coverage_cmd(args: &ConfigArgs, mode: CoverageModeArg) -> Result<()> {
    let cfg = load_config(args)?;
    let inputs = Inputs::load(&cfg, false)?;
    let mode = match mode {
        CoverageModeArg::Types => CoverageMode::Types,
        CoverageModeArg::Tokens => CoverageMode::Tokens,
    };
    println!("{}", coverage(&inputs.corpus, &inputs.lexicon, &inputs.stopwords, mode));
    Ok(())
}

/// Everything needed besides the model itself to apply a bundle.
#[derive(Serialize, Deserialize)]
struct BundleMeta {
    category: Category,
    semantic_model: String,
    predictive_model: String,
    class_values: Vec<u8>,
    feature_names: Vec<String>,
    embedding_dim: usize,
    scaling: Vec<ScalingStat>,
    n_labeled: usize,
    n_rows: usize,
    seed: u64,
}

fn safe_name(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn bundle_dir(root: &Path, cat: &Category, sem: &str, model: &str) -> PathBuf {
    root.join(file_stem(cat))
        .join(format!("{}__{}", safe_name(sem), safe_name(model)))
}

fn train_cmd(args: &ConfigArgs) -> Result<()> {
    let cfg = load_config(args)?;
    let inputs = Inputs::load(&cfg, true)?;
    if inputs.semantic.is_empty() {
        bail!("config lists no semantic embedding files");
    }
    let settings = cfg.benchmark_settings()?;
    let registry = cfg.registry();
    let root = output_dir(&cfg)?.join("models");
    let split = CvSplit {
        repeat: 0,
        seed: cfg.seed,
        train_ids: inputs.corpus.annotations.keys().cloned().collect(),
        test_ids: BTreeSet::new(),
        draws: Vec::new(),
    };
    let mut n = 0;
    for cat in &settings.categories {
        for sem in &inputs.semantic {
            let cell = prepare_cell(&inputs.corpus, &inputs.gam, &sem.store, cat, &split, true, false)
                .with_context(|| format!("{cat} / {}", sem.name))?;
            for model in &settings.predictive {
                let strategy = registry.get(model)?;
                let seed = model_seed(cfg.seed, 0, cat, &sem.name, Variant::Full, model);
                let fitted = strategy
                    .fit(&cell.problem, seed)
                    .with_context(|| format!("{cat} / {} / {model}", sem.name))?;
                let dir = bundle_dir(&root, cat, &sem.name, model);
                let meta = BundleMeta {
                    category: cat.clone(),
                    semantic_model: sem.name.clone(),
                    predictive_model: model.clone(),
                    class_values: (0..cat.n_classes()).map(|i| cat.kind.class_value(i)).collect(),
                    feature_names: cell.feature_names.clone(),
                    embedding_dim: sem.store.dim,
                    scaling: cell.scaling.clone(),
                    n_labeled: cell.n_labeled,
                    n_rows: cell.problem.n_rows(),
                    seed,
                };
                write_file(&dir.join("model.json"), &(serde_json::to_string(&fitted.dump())? + "\n"))?;
                write_file(&dir.join("scaling.json"), &(serde_json::to_string_pretty(&meta)? + "\n"))?;
                write_file(&dir.join("config.json"), &(serde_json::to_string_pretty(&cfg.echo())? + "\n"))?;
                n += 1;
            }
        }
    }
    println!("{n} model bundles under {}", root.display());
    Ok(())
}

fn find_bundles(root: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).with_context(|| format!("reading {}", dir.display()))? {
            let p = entry?.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().is_some_and(|n| n == "model.json") {
                out.push(p.parent().expect("file has a parent").to_path_buf());
            }
        }
    }
    out.sort();
    Ok(out)
}

fn predict_cmd(args: &ConfigArgs, input: &Path, extra: &[PathBuf], models: Option<&Path>) -> Result<()> {
    let cfg = load_config(args)?;
    let inputs = Inputs::load(&cfg, true)?;
    let new = load_corpus(input).with_context(|| format!("reading {}", input.display()))?;
    let processed: Vec<_> = new.sonnets.iter().map(|s| preprocess(s, &inputs.stopwords)).collect();
    let gam = gam_features(&processed, &inputs.lexicon);
    let mut stores: BTreeMap<String, SemanticModel> =
        inputs.semantic.into_iter().map(|s| (s.name.clone(), s)).collect();
    let specs: Vec<_> = extra
        .iter()
        .map(|p| sonnet_core::config::SemanticSpec {
            name: None,
            path: p.clone(),
            pooling: Pooling::Affective,
        })
        .collect();
    for s in load_semantic(&specs, &inputs.lexicon)? {
        match stores.get_mut(&s.name) {
            Some(existing) => existing.store.vectors.extend(s.store.vectors),
            None => {
                stores.insert(s.name.clone(), s);
            }
        }
    }
    let root = models.map(Path::to_path_buf).unwrap_or_else(|| cfg.output_dir.join("models"));
    let bundles = find_bundles(&root)?;
    if bundles.is_empty() {
        bail!("no model bundles under {}", root.display());
    }
    let ids: Vec<String> = new.ids();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "category", "semantic_model", "predictive_model", "value", "probability"])?;
    for dir in &bundles {
        let meta: BundleMeta = serde_json::from_str(&std::fs::read_to_string(dir.join("scaling.json"))?)
            .with_context(|| format!("reading {}", dir.join("scaling.json").display()))?;
        let dump: ModelDump = serde_json::from_str(&std::fs::read_to_string(dir.join("model.json"))?)
            .with_context(|| format!("reading {}", dir.join("model.json").display()))?;
        let model = dump.into_classifier();
        let sem = stores
            .get(&meta.semantic_model)
            .with_context(|| format!("no embeddings for semantic model {:?}", meta.semantic_model))?;
        if sem.store.dim != meta.embedding_dim {
            bail!(
                "{}: embedding dim {} but model expects {}",
                meta.semantic_model,
                sem.store.dim,
                meta.embedding_dim
            );
        }
        let gam_ref = (!meta.scaling.is_empty()).then_some(&gam);
        let design = assemble_with_scaling(&ids, &sem.store, gam_ref, &meta.scaling)?;
        let proba = model.predict_proba(design.x.view())?;
        for (id, row) in ids.iter().zip(proba.axis_iter(Axis(0))) {
            for (value, p) in meta.class_values.iter().zip(row.iter()) {
                w.write_record([
                    id.clone(),
                    meta.category.to_string(),
                    meta.semantic_model.clone(),
                    meta.predictive_model.clone(),
                    value.to_string(),
                    p.to_string(),
                ])?;
            }
        }
    }
    let path = output_dir(&cfg)?.join("predictions.csv");
    write_file(&path, &String::from_utf8(w.into_inner()?)?)?;
    println!("{} sonnets x {} bundles -> {}", ids.len(), bundles.len(), path.display());
    Ok(())
}

fn benchmark_cmd(args: &ConfigArgs, repeats: Option<usize>, jobs: Option<usize>) -> Result<()> {
    let mut cfg = load_config(args)?;
    if let Some(r) = repeats {
        cfg.n_repeats = r;
    }
    if let Some(j) = jobs {
        cfg.jobs = Some(j);
    }
    cfg.validate()?;
    let inputs = Inputs::load(&cfg, true)?;
    if inputs.semantic.is_empty() {
        bail!("config lists no semantic embedding files");
    }
    let settings = cfg.benchmark_settings()?;
    let registry = cfg.registry();
    let mut report = run_benchmark(&inputs.corpus, &inputs.gam, &inputs.semantic, &settings, &registry, cfg.jobs)?;
    report.config = Some(cfg.echo());
    let dir = output_dir(&cfg)?;
    let files = write_report_files(&report, &dir, cfg.svg)?;
    let mut out = std::io::stdout().lock();
    write!(out, "{}", summary_text(&report))?;
    writeln!(out, "wrote {} files to {}", files.len(), dir.display())?;
    Ok(())
}

fn report_cmd(input: &Path, out: Option<&Path>, svg: bool) -> Result<()> {
    let report = read_report(input)?;
    let dir = match out {
        Some(d) => d.to_path_buf(),
        None => input.parent().unwrap_or(Path::new(".")).to_path_buf(),
    };
    write_report_files(&report, &dir, svg)?;
    print!("{}", summary_text(&report));
    Ok(())
}
