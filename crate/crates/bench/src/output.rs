//! Report files: long-format `results.csv`, per-table text files,
//! `manifest.txt` and grouped-bar plot data.
//!
//! Numbers in the CSV and plot files use Rust's shortest round-trip float
//! formatting, so parsing them back reproduces the values bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use qbench_core::metrics::{EvalReport, MetricSet, METRIC_NAMES};

use crate::pipeline::RunManifest;
use crate::{BenchError, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io { path: path.display().to_string(), source }
}

fn csv_err(path: &Path, e: csv::Error) -> BenchError {
    BenchError::Io { path: path.display().to_string(), source: std::io::Error::other(e) }
}

/// One line of `results.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub dataset: String,
    pub reducer: String,
    pub model: String,
    /// A metric name, or `failed` for a model or run that did not finish.
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub seed: u64,
}

pub const RESULTS_HEADER: [&str; 7] = ["dataset", "reducer", "model", "metric", "mean", "std", "seed"];

pub fn result_rows(manifests: &[RunManifest]) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for m in manifests {
        let c = &m.config;
        let row = |model: &str, metric: &str, mean: f64, std: f64| ResultRow {
            dataset: c.dataset.name.clone(),
            reducer: c.reducer.name().to_string(),
            model: model.to_string(),
            metric: metric.to_string(),
            mean,
            std,
            seed: c.seed,
        };
        if m.error.is_some() {
            rows.extend(c.models.iter().map(|model| row(model.name(), "failed", f64::NAN, f64::NAN)));
            continue;
        }
        for o in &m.outcomes {
            match &o.result {
                Ok(r) => {
                    let (mean, std) = (r.mean.values(), r.std.values());
                    for (i, name) in METRIC_NAMES.iter().enumerate() {
                        rows.push(row(o.model.name(), name, mean[i], std[i]));
                    }
                }
                Err(_) => rows.push(row(o.model.name(), "failed", f64::NAN, f64::NAN)),
            }
        }
    }
    rows
}

pub fn write_results_csv(manifests: &[RunManifest], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(RESULTS_HEADER).map_err(|e| csv_err(path, e))?;
    for r in result_rows(manifests) {
        let rec = [r.dataset, r.reducer, r.model, r.metric, r.mean.to_string(), r.std.to_string(), r.seed.to_string()];
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn parse_results(text: &str) -> Result<Vec<ResultRow>> {
    let bad = |m: String| BenchError::Data(format!("results file: {m}"));
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers().map_err(|e| bad(e.to_string()))?.iter().map(String::from).collect();
    if header != RESULTS_HEADER {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(format!("bad number `{}`", &rec[i])));
        out.push(ResultRow {
            dataset: rec[0].to_string(),
            reducer: rec[1].to_string(),
            model: rec[2].to_string(),
            metric: rec[3].to_string(),
            mean: num(4)?,
            std: num(5)?,
            seed: rec[6].parse().map_err(|_| bad(format!("bad seed `{}`", &rec[6])))?,
        });
    }
    Ok(out)
}

/// Rebuilds mean/std reports from results rows, keyed by dataset. Failed
/// models and incomplete metric sets are skipped. Per-fold values are not
/// stored in the CSV, so `folds` is empty.
pub fn reports_from_results(rows: &[ResultRow]) -> BTreeMap<String, Vec<EvalReport>> {
    type Key = (String, String, String, u64);
    type Cells = [Option<f64>; 5];
    let mut groups: BTreeMap<Key, (Cells, Cells)> = BTreeMap::new();
    let mut order: Vec<Key> = Vec::new();
    for r in rows {
        let Some(i) = METRIC_NAMES.iter().position(|&n| n == r.metric) else { continue };
        let key = (r.dataset.clone(), r.model.clone(), r.reducer.clone(), r.seed);
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        let e = groups.entry(key).or_default();
        e.0[i] = Some(r.mean);
        e.1[i] = Some(r.std);
    }
    let mut out: BTreeMap<String, Vec<EvalReport>> = BTreeMap::new();
    for key in order {
        let (m, s) = &groups[&key];
        if m.iter().chain(s).any(Option::is_none) {
            continue;
        }
        let (dataset, model, reducer, seed) = key;
        out.entry(dataset).or_default().push(EvalReport {
            model,
            reducer,
            seed,
            folds: Vec::new(),
            mean: MetricSet::from_values(m.map(|v| v.unwrap_or(f64::NAN))),
            std: MetricSet::from_values(s.map(|v| v.unwrap_or(f64::NAN))),
        });
    }
    out
}

fn pad(s: &str, w: usize) -> String {
    format!("{s:<w$}")
}

/// Summary table for one manifest: one row per model, cells in
/// percent as `mean (std)`.
pub fn render_table(m: &RunManifest) -> String {
    let c = &m.config;
    let mut out = String::new();
    let _ = writeln!(out, "dataset: {}  reducer: {}  seed: {}", c.dataset.name, c.reducer, c.seed);
    if let Some(e) = &m.error {
        let _ = writeln!(out, "run failed: {e}");
        return out;
    }
    let mut rows: Vec<Vec<String>> = vec![std::iter::once("model".to_string())
        .chain(METRIC_NAMES.iter().map(|s| s.to_string()))
        .collect()];
    for o in &m.outcomes {
        let label = format!("{} [{}]", o.model, o.protocol);
        match &o.result {
            Ok(r) => rows.push(std::iter::once(label).chain(r.formatted()).collect()),
            Err(f) => rows.push(vec![label, format!("failed at {f}")]),
        }
    }
    let widths: Vec<usize> = (0..6)
        .map(|i| rows.iter().filter(|r| r.len() == 6).map(|r| r[i].chars().count()).max().unwrap_or(0))
        .collect();
    for r in &rows {
        let cells: Vec<String> = r.iter().enumerate().map(|(i, s)| pad(s, widths[i])).collect();
        let _ = writeln!(out, "{}", cells.join(" | ").trim_end());
    }
    if !m.reducer_flags.is_empty() {
        let _ = writeln!(out, "reducer flags: {}", m.reducer_flags.join(", "));
    }
    out
}

pub fn render_manifest(manifests: &[RunManifest]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "qbench {}", crate::VERSION);
    for m in manifests {
        let _ = writeln!(out, "\n[run {} {}]", m.config.dataset.name, m.config.reducer);
        out.push_str(&m.config.to_text());
        let _ = writeln!(out, "version = {}", m.version);
        let _ = writeln!(out, "wall_seconds = {:.3}", m.seconds);
        if let Some(e) = &m.error {
            let _ = writeln!(out, "error = {e}");
            continue;
        }
        if let Some(d) = &m.dataset {
            let _ = writeln!(
                out,
                "dataset_rows = {} (read {}, dropped {})\ndataset_features = {}\npositive_fraction = {}\ncontent_hash = {:016x}",
                d.n_samples, d.rows_read, d.rows_dropped, d.n_features, d.positive_fraction, d.content_hash
            );
        }
        for f in &m.folds {
            let _ = writeln!(
                out,
                "fold {} {}: fit {} rows hash {:016x}, eval {} rows hash {:016x}, preprocess hash {:016x}",
                f.kind,
                f.index,
                f.fit_rows.len(),
                f.fit_hash(),
                f.eval_rows.len(),
                f.eval_hash(),
                f.preprocess_hash()
            );
        }
        for o in &m.outcomes {
            let status = match &o.result {
                Ok(_) => "ok".to_string(),
                Err(f) => format!("failed at {f}"),
            };
            let _ = writeln!(out, "model {} [{}] {:.3}s {status}", o.model, o.protocol, o.seconds);
        }
        if !m.reducer_flags.is_empty() {
            let _ = writeln!(out, "reducer_flags = {}", m.reducer_flags.join(","));
        }
    }
    out
}

/// Writes `results.csv`, `tables/{dataset}_{reducer}.txt` and
/// `manifest.txt` under `dir`.
pub fn write_outputs(manifests: &[RunManifest], dir: &Path) -> Result<()> {
    let tables = dir.join("tables");
    fs::create_dir_all(&tables).map_err(io_err(&tables))?;
    write_results_csv(manifests, &dir.join("results.csv"))?;
    for m in manifests {
        let p = tables.join(format!("{}_{}.txt", m.config.dataset.name, m.config.reducer));
        fs::write(&p, render_table(m)).map_err(io_err(&p))?;
    }
    let p = dir.join("manifest.txt");
    fs::write(&p, render_manifest(manifests)).map_err(io_err(&p))
}

/// One bar group: a model/reducer pair with its five metric means and
/// standard deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotGroup {
    pub model: String,
    pub reducer: String,
    pub seed: u64,
    pub mean: [f64; 5],
    pub std: [f64; 5],
}

impl From<&EvalReport> for PlotGroup {
    fn from(r: &EvalReport) -> Self {
        PlotGroup { model: r.model.clone(), reducer: r.reducer.clone(), seed: r.seed, mean: r.mean.values(), std: r.std.values() }
    }
}

const PLOT_HEADER: &str = "group\tmodel\treducer\tseed\tstat";

pub fn render_plotdata(reports: &[EvalReport]) -> String {
    let mut out = String::from(PLOT_HEADER);
    for n in METRIC_NAMES {
        out.push('\t');
        out.push_str(n);
    }
    out.push('\n');
    for r in reports {
        let g = PlotGroup::from(r);
        for (stat, vals) in [("mean", g.mean), ("std", g.std)] {
            let _ = write!(out, "{}({})\t{}\t{}\t{}\t{stat}", g.model, g.reducer, g.model, g.reducer, g.seed);
            for v in vals {
                let _ = write!(out, "\t{v}");
            }
            out.push('\n');
        }
    }
    out
}

/// Tab-separated grid with a mean row and a std row per report, grouped
/// as `model(reducer)`.
pub fn emit_plotdata(reports: &[EvalReport], path: &Path) -> Result<()> {
    if reports.is_empty() {
        return Err(BenchError::Runtime("no reports to plot".into()));
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    fs::write(path, render_plotdata(reports)).map_err(io_err(path))
}

pub fn parse_plotdata(text: &str) -> Result<Vec<PlotGroup>> {
    let bad = |m: String| BenchError::Data(format!("plot data: {m}"));
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.starts_with(PLOT_HEADER) => {}
        _ => return Err(bad("missing header".into())),
    }
    let mut out: Vec<PlotGroup> = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 10 {
            return Err(bad(format!("line {}: expected 10 fields, got {}", i + 2, f.len())));
        }
        let seed = f[3].parse().map_err(|_| bad(format!("line {}: bad seed", i + 2)))?;
        let mut vals = [0.0; 5];
        for (k, v) in vals.iter_mut().enumerate() {
            *v = f[5 + k].parse().map_err(|_| bad(format!("line {}: bad number `{}`", i + 2, f[5 + k])))?;
        }
        match f[4] {
            "mean" => out.push(PlotGroup { model: f[1].into(), reducer: f[2].into(), seed, mean: vals, std: [f64::NAN; 5] }),
            "std" => match out.last_mut() {
                Some(g) if g.model == f[1] && g.reducer == f[2] && g.seed == seed => g.std = vals,
                _ => return Err(bad(format!("line {}: std row without its mean row", i + 2))),
            },
            other => return Err(bad(format!("line {}: unknown stat `{other}`", i + 2))),
        }
    }
    Ok(out)
}
