//! Report files: flat CSV records, per-category SVG box plots and a plain
//! text summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::benchmark::{BenchmarkReport, MetricsRecord};
use super::EvalError;
use crate::corpus::Category;

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn records_csv(records: &[MetricsRecord]) -> Result<String, EvalError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| EvalError::Io(e.to_string());
    w.write_record([
        "category",
        "semantic_model",
        "predictive_model",
        "variant",
        "repeat",
        "f1_weighted",
        "kappa",
        "auc",
        "test_class_counts",
        "n_labeled",
        "n_unlabeled",
        "error",
    ])
    .map_err(io)?;
    for r in records {
        let counts: Vec<String> = r.test_class_counts.iter().map(usize::to_string).collect();
        w.write_record([
            r.category.to_string(),
            r.semantic_model.clone(),
            r.predictive_model.clone(),
            r.variant.to_string(),
            r.repeat.to_string(),
            opt(r.f1_weighted),
            opt(r.kappa),
            opt(r.auc),
            counts.join(";"),
            r.n_labeled.to_string(),
            r.n_unlabeled.to_string(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| EvalError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Minimum, quartiles (linear interpolation) and maximum.
pub fn five_numbers(values: &[f64]) -> Option<[f64; 5]> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let pos = p * (v.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
    };
    Some([v[0], q(0.25), q(0.5), q(0.75), v[v.len() - 1]])
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One box per combination, AUC on a fixed 0..1 axis.
pub fn box_plot_svg(category: &Category, records: &[MetricsRecord]) -> String {
    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for r in records.iter().filter(|r| &r.category == category) {
        let name = format!("{} {} ({})", r.semantic_model, r.predictive_model, r.variant);
        let pos = match groups.iter().position(|(n, _)| *n == name) {
            Some(p) => p,
            None => {
                groups.push((name, Vec::new()));
                groups.len() - 1
            }
        };
        if let Some(a) = r.auc {
            groups[pos].1.push(a);
        }
    }
    let (left, top, plot_h, box_w, gap) = (60.0, 40.0, 300.0, 24.0, 16.0);
    let width = left + groups.len() as f64 * (box_w + gap) + 20.0;
    let label_h = 220.0;
    let height = top + plot_h + label_h;
    let y = |v: f64| top + (1.0 - v) * plot_h;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" font-family=\"sans-serif\" font-size=\"11\">"
    );
    let _ = writeln!(s, "<text x=\"{left}\" y=\"20\" font-size=\"14\">{} (AUC)</text>", escape(&category.to_string()));
    for tick in 0..=10 {
        let v = tick as f64 / 10.0;
        let _ = writeln!(
            s,
            "<line x1=\"{left}\" x2=\"{}\" y1=\"{y}\" y2=\"{y}\" stroke=\"#ddd\"/><text x=\"{}\" y=\"{}\" text-anchor=\"end\">{v:.1}</text>",
            width - 20.0,
            left - 6.0,
            y(v) + 4.0,
            y = y(v)
        );
    }
    for (i, (name, vals)) in groups.iter().enumerate() {
        let x0 = left + gap / 2.0 + i as f64 * (box_w + gap);
        let cx = x0 + box_w / 2.0;
        if let Some([lo, q1, med, q3, hi]) = five_numbers(vals) {
            let _ = writeln!(
                s,
                "<line x1=\"{cx}\" x2=\"{cx}\" y1=\"{}\" y2=\"{}\" stroke=\"#333\"/>",
                y(hi),
                y(lo)
            );
            let _ = writeln!(
                s,
                "<rect x=\"{x0}\" y=\"{}\" width=\"{box_w}\" height=\"{}\" fill=\"#9ecae1\" stroke=\"#333\"/>",
                y(q3),
                (y(q1) - y(q3)).max(0.5)
            );
            let _ = writeln!(
                s,
                "<line x1=\"{x0}\" x2=\"{}\" y1=\"{m}\" y2=\"{m}\" stroke=\"#08306b\" stroke-width=\"2\"/>",
                x0 + box_w,
                m = y(med)
            );
        }
        let ly = top + plot_h + 10.0;
        let _ = writeln!(
            s,
            "<text x=\"{cx}\" y=\"{ly}\" transform=\"rotate(60 {cx} {ly})\">{}</text>",
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into())
}

pub fn summary_text(report: &BenchmarkReport) -> String {
    let mut s = String::new();
    let st = &report.settings;
    let _ = writeln!(
        s,
        "seed {}  repeats {}  n_per_value {}  cv_mode {:?}  records {}",
        st.seed,
        st.n_repeats,
        st.n_per_value,
        st.cv_mode,
        report.records.len()
    );
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:<40} {:<16} {:<20} {:<15} {:>8} {:>8} {:>8} {:>6}",
        "category", "semantic", "predictive", "variant", "F1w", "kappa", "AUC", "fails"
    );
    for a in &report.aggregates {
        let _ = writeln!(
            s,
            "{:<40} {:<16} {:<20} {:<15} {:>8} {:>8} {:>8} {:>6}",
            a.category.to_string(),
            a.semantic_model,
            a.predictive_model,
            a.variant.to_string(),
            fmt_opt(a.f1_weighted_mean),
            fmt_opt(a.kappa_mean),
            fmt_opt(a.auc_mean),
            a.n_failed
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "best combination per category (mean AUC):");
    for b in &report.best {
        let _ = writeln!(
            s,
            "  {}: {} + {}  AUC {:.4}",
            b.category, b.semantic_model, b.predictive_model, b.auc_mean
        );
    }
    if !report.comparisons.is_empty() {
        let _ = writeln!(s);
        let _ = writeln!(s, "Wilcoxon signed-rank (AUC, two-sided):");
        for c in &report.comparisons {
            let _ = writeln!(
                s,
                "  {}: {} vs {}  n={}  stat={}  p={:.4}",
                c.category,
                c.a,
                c.b,
                c.n_pairs,
                c.statistic.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                c.p_value
            );
        }
    }
    s
}

/// File-name-safe form of a category.
pub fn file_stem(category: &Category) -> String {
    category
        .to_string()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect()
}

/// Writes `report.json`, `records.csv`, `summary.txt` and, if `svg`, one
/// `boxplot_<category>.svg` per category into `dir`.
pub fn write_report_files(report: &BenchmarkReport, dir: &Path, svg: bool) -> Result<Vec<String>, EvalError> {
    std::fs::create_dir_all(dir).map_err(|e| EvalError::Io(format!("{}: {e}", dir.display())))?;
    let mut files: BTreeMap<String, String> = BTreeMap::new();
    let mut json = serde_json::to_string_pretty(report).map_err(|e| EvalError::Io(e.to_string()))?;
    json.push('\n');
    files.insert("report.json".into(), json);
    files.insert("records.csv".into(), records_csv(&report.records)?);
    files.insert("summary.txt".into(), summary_text(report));
    if svg {
        for c in &report.settings.categories {
            files.insert(format!("boxplot_{}.svg", file_stem(c)), box_plot_svg(c, &report.records));
        }
    }
    for (name, text) in &files {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| EvalError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(files.into_keys().collect())
}

pub fn read_report(path: &Path) -> Result<BenchmarkReport, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|e| EvalError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| EvalError::Io(format!("{}: {e}", path.display())))
}
