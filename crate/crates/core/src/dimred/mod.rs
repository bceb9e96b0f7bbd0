//! Linear dimensionality reduction: SVD, PCA, supervised kurtosis
//! projection pursuit and split-half Fisher LDA.
//!
//! Every method produces a [`Reducer`], an affine map `x ↦ (x − mean)·P`
//! fitted on training rows only. Reducers can be dumped to a plain-text
//! key/value format and parsed back losslessly.

mod kurtosis;
mod lda;
mod pca;
mod skpp;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::data::{DataError, DataTable};
use crate::linalg::{LinalgError, Matrix};

pub use kurtosis::{kurtosis, KurtosisIndex};
pub use lda::{feature_halves, fisher_ratio, fit_lda, fit_lda_split, FISHER_WEAK_THRESHOLD};
pub use pca::{fit_pca, fit_svd};
pub use skpp::{fit_skpp, pooled_class_kurtosis, SkppOptions};

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error("sample has zero variance; kurtosis index is undefined")]
    ZeroVariance,
    #[error("kurtosis needs at least 2 values, got {0}")]
    TooFewValues(usize),
    #[error("requested {requested} components but only {available} features")]
    TooManyComponents { requested: usize, available: usize },
    #[error("{method} needs at least {needed} features, got {got}")]
    TooFewFeatures { method: &'static str, needed: usize, got: usize },
    #[error("reducer expects {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("training table is empty")]
    EmptyTable,
    #[error("class {0} is absent from the training labels")]
    MissingClass(u8),
    #[error("class means coincide on features {columns:?}; between-class scatter is zero")]
    DegenerateClasses { columns: Vec<usize> },
    #[error("projection pursuit found no direction with a finite index after {restarts} restarts")]
    SkppFailed { restarts: usize },
    #[error("cannot parse reducer dump: {0}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Data(#[from] DataError),
}

pub type Result<T> = std::result::Result<T, ReduceError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReductionMethod {
    Svd,
    Pca,
    Skpp,
    /// Single Fisher direction over all features.
    Lda,
    /// One Fisher direction per contiguous half of the features.
    LdaSplit,
    /// Fixed user-supplied projection.
    Identity,
}

impl ReductionMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::Svd => "svd",
            Self::Pca => "pca",
            Self::Skpp => "skpp",
            Self::Lda => "lda",
            Self::LdaSplit => "lda_split",
            Self::Identity => "identity",
        }
    }
}

impl fmt::Display for ReductionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReductionMethod {
    type Err = ReduceError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "svd" => Self::Svd,
            "pca" => Self::Pca,
            "skpp" => Self::Skpp,
            "lda" => Self::Lda,
            "lda_split" | "lda-split" => Self::LdaSplit,
            "identity" => Self::Identity,
            other => return Err(ReduceError::Parse(format!("unknown method `{other}`"))),
        })
    }
}

/// A fitted affine projection `x ↦ (x − mean)·projection`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reducer {
    pub method: ReductionMethod,
    pub mean: Vec<f64>,
    /// n_features × components, unit-norm columns.
    pub projection: Matrix,
    /// Method-specific diagnostics (eigenvalues, achieved indices, ...).
    pub metadata: BTreeMap<String, f64>,
    /// Warnings raised while fitting, e.g. `degenerate` or `weak_half_1`.
    pub flags: Vec<String>,
}

impl Reducer {
    /// Projection with zero mean, mostly useful for tests and fixed maps.
    pub fn identity(n_features: usize) -> Reducer {
        Reducer {
            method: ReductionMethod::Identity,
            mean: vec![0.0; n_features],
            projection: Matrix::identity(n_features),
            metadata: BTreeMap::new(),
            flags: Vec::new(),
        }
    }

    pub fn n_features(&self) -> usize {
        self.projection.rows()
    }

    pub fn components(&self) -> usize {
        self.projection.cols()
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }

    pub fn transform_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_features() {
            return Err(ReduceError::DimensionMismatch { expected: self.n_features(), got: x.len() });
        }
        let centered: Vec<f64> = x.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        let k = self.components();
        let mut out = vec![0.0; k];
        for (i, c) in centered.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            for (o, p) in out.iter_mut().zip(self.projection.row(i)) {
                *o += c * p;
            }
        }
        Ok(out)
    }

    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.n_features() {
            return Err(ReduceError::DimensionMismatch { expected: self.n_features(), got: x.cols() });
        }
        let mut data = Vec::with_capacity(x.rows() * self.components());
        for row in x.row_iter() {
            data.extend(self.transform_row(row)?);
        }
        Ok(Matrix::new(x.rows(), self.components(), data)?)
    }

    pub fn transform_table(&self, table: &DataTable) -> Result<DataTable> {
        let names = (0..self.components()).map(|k| format!("{}_{k}", self.method)).collect();
        Ok(table.with_features(self.transform(table.features())?, names)?)
    }

    /// Plain-text dump: `key = value` lines followed by the projection rows.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
        out.push_str(&format!("method = {}\n", self.method));
        out.push_str(&format!("n_features = {}\n", self.n_features()));
        out.push_str(&format!("components = {}\n", self.components()));
        out.push_str(&format!("mean = {}\n", join(&self.mean)));
        for (k, v) in &self.metadata {
            out.push_str(&format!("meta.{k} = {v}\n"));
        }
        for flag in &self.flags {
            out.push_str(&format!("flag = {flag}\n"));
        }
        out.push_str("projection =\n");
        for row in self.projection.row_iter() {
            out.push_str(&join(row));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Reducer> {
        let err = |m: &str| ReduceError::Parse(m.to_string());
        let parse_f64 = |s: &str| s.parse::<f64>().map_err(|_| err(&format!("bad number `{s}`")));
        let mut method = None;
        let mut n_features = None;
        let mut components = None;
        let mut mean = Vec::new();
        let mut metadata = BTreeMap::new();
        let mut flags = Vec::new();
        let mut lines = text.lines();
        for line in lines.by_ref() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if line == "projection =" {
                break;
            }
            let (key, value) = line.split_once(" = ").or_else(|| line.split_once('=')).ok_or_else(|| err(line))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "method" => method = Some(value.parse()?),
                "n_features" => n_features = Some(value.parse::<usize>().map_err(|_| err(value))?),
                "components" => components = Some(value.parse::<usize>().map_err(|_| err(value))?),
                "mean" => mean = value.split_whitespace().map(parse_f64).collect::<Result<_>>()?,
                "flag" => flags.push(value.to_string()),
                k if k.starts_with("meta.") => {
                    metadata.insert(k["meta.".len()..].to_string(), parse_f64(value)?);
                }
                other => return Err(err(&format!("unknown key `{other}`"))),
            }
        }
        let method = method.ok_or_else(|| err("missing method"))?;
        let d = n_features.ok_or_else(|| err("missing n_features"))?;
        let k = components.ok_or_else(|| err("missing components"))?;
        let mut data = Vec::with_capacity(d * k);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            for tok in line.split_whitespace() {
                data.push(parse_f64(tok)?);
            }
        }
        if mean.len() != d {
            return Err(err("mean length does not match n_features"));
        }
        let projection = Matrix::new(d, k, data)?;
        Ok(Reducer { method, mean, projection, metadata, flags })
    }
}

fn column_means(x: &Matrix) -> Vec<f64> {
    let n = x.rows().max(1) as f64;
    let mut means = vec![0.0; x.cols()];
    for row in x.row_iter() {
        means.iter_mut().zip(row).for_each(|(m, v)| *m += v);
    }
    means.iter_mut().for_each(|m| *m /= n);
    means
}

fn center(x: &Matrix, mean: &[f64]) -> Matrix {
    let data = x.row_iter().flat_map(|r| r.iter().zip(mean).map(|(v, m)| v - m)).collect();
    Matrix::new(x.rows(), x.cols(), data).expect("centering preserves shape and finiteness")
}

fn check_components(train: &DataTable, n_components: usize) -> Result<()> {
    if train.n_samples() == 0 {
        return Err(ReduceError::EmptyTable);
    }
    if n_components == 0 || n_components > train.n_features() {
        return Err(ReduceError::TooManyComponents { requested: n_components, available: train.n_features() });
    }
    Ok(())
}
