//! Confusion-matrix metrics for binary classifiers and their aggregation
//! over cross-validation folds.
//!
//! Class 1 is the positive class. Undefined ratios (0/0) resolve to 0 so
//! that a classifier that never predicts the positive class reports zero
//! precision, recall, F1 and MCC instead of NaN. Balanced accuracy is the
//! mean of the true-positive and true-negative rates.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("y_true has {truth} labels but y_pred has {pred}")]
    LengthMismatch { truth: usize, pred: usize },
    #[error("label {label} at position {index} is outside {{0, 1}}")]
    BadLabel { index: usize, label: u8 },
    #[error("no samples to evaluate")]
    Empty,
    #[error("cannot aggregate zero folds")]
    NoFolds,
}

pub type Result<T> = std::result::Result<T, MetricsError>;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionCounts> {
    if y_true.len() != y_pred.len() {
        return Err(MetricsError::LengthMismatch { truth: y_true.len(), pred: y_pred.len() });
    }
    let mut c = ConfusionCounts::default();
    for (index, (&t, &p)) in y_true.iter().zip(y_pred).enumerate() {
        match (t, p) {
            (1, 1) => c.tp += 1,
            (0, 1) => c.fp += 1,
            (0, 0) => c.tn += 1,
            (1, 0) => c.fn_ += 1,
            _ => return Err(MetricsError::BadLabel { index, label: if t > 1 { t } else { p } }),
        }
    }
    Ok(c)
}

/// Precision, recall, F1, MCC and balanced accuracy, all as fractions.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MetricSet {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub mcc: f64,
    pub balanced_accuracy: f64,
    /// Set when y_true lacked one class, so one balanced-accuracy term is 0
    /// by convention rather than measured.
    pub missing_class: bool,
}

/// Metric names in table order.
pub const METRIC_NAMES: [&str; 5] = ["precision", "recall", "f1", "mcc", "balanced_accuracy"];

impl MetricSet {
    pub fn values(&self) -> [f64; 5] {
        [self.precision, self.recall, self.f1, self.mcc, self.balanced_accuracy]
    }

    pub fn from_values(v: [f64; 5]) -> MetricSet {
        MetricSet {
            precision: v[0],
            recall: v[1],
            f1: v[2],
            mcc: v[3],
            balanced_accuracy: v[4],
            missing_class: false,
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        METRIC_NAMES.iter().position(|&n| n == name).map(|i| self.values()[i])
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn metrics(c: &ConfusionCounts) -> Result<MetricSet> {
    if c.total() == 0 {
        return Err(MetricsError::Empty);
    }
    let (tp, fp, tn, fn_) = (c.tp as f64, c.fp as f64, c.tn as f64, c.fn_ as f64);
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = ratio(2.0 * precision * recall, precision + recall);
    let den = ((tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_)).sqrt();
    let mcc = ratio(tp * tn - fp * fn_, den);
    let tnr = ratio(tn, tn + fp);
    let balanced_accuracy = (recall + tnr) / 2.0;
    Ok(MetricSet {
        precision,
        recall,
        f1,
        mcc,
        balanced_accuracy,
        missing_class: c.tp + c.fn_ == 0 || c.tn + c.fp == 0,
    })
}

pub fn evaluate(y_true: &[u8], y_pred: &[u8]) -> Result<MetricSet> {
    metrics(&confusion(y_true, y_pred)?)
}

/// Per-fold metrics plus their mean and population standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub model: String,
    pub reducer: String,
    pub seed: u64,
    pub folds: Vec<MetricSet>,
    pub mean: MetricSet,
    pub std: MetricSet,
}

impl EvalReport {
    /// `"mean (std)"` in percent with two decimals, per metric.
    pub fn formatted(&self) -> [String; 5] {
        let (m, s) = (self.mean.values(), self.std.values());
        std::array::from_fn(|i| format_cell(m[i], s[i]))
    }

    /// Whether a standard deviation is meaningful (more than one fold).
    pub fn has_spread(&self) -> bool {
        self.folds.len() > 1
    }
}

pub fn format_cell(mean: f64, std: f64) -> String {
    format!("{:.2} ({:.2})", 100.0 * mean, 100.0 * std)
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.model, self.reducer)?;
        for cell in self.formatted() {
            write!(f, " | {cell}")?;
        }
        Ok(())
    }
}

pub fn aggregate(model: &str, reducer: &str, seed: u64, per_fold: Vec<MetricSet>) -> Result<EvalReport> {
    if per_fold.is_empty() {
        return Err(MetricsError::NoFolds);
    }
    let n = per_fold.len() as f64;
    let mut mean = [0.0; 5];
    for m in &per_fold {
        mean.iter_mut().zip(m.values()).for_each(|(a, v)| *a += v);
    }
    mean.iter_mut().for_each(|a| *a /= n);
    let mut var = [0.0; 5];
    for m in &per_fold {
        for (i, v) in m.values().iter().enumerate() {
            var[i] += (v - mean[i]).powi(2);
        }
    }
    let std = var.map(|v| (v / n).sqrt());
    let mut mean_set = MetricSet::from_values(mean);
    mean_set.missing_class = per_fold.iter().any(|m| m.missing_class);
    Ok(EvalReport {
        model: model.to_string(),
        reducer: reducer.to_string(),
        seed,
        folds: per_fold,
        mean: mean_set,
        std: MetricSet::from_values(std),
    })
}
