//! Classical baseline classifiers: logistic regression, k-nearest
//! neighbours, CART, Gaussian naive Bayes and a soft-margin SVM.
//!
//! All of them take a [`DataTable`] with labels in {0, 1} and produce a
//! model implementing [`Classifier`].

mod cart;
mod knn;
mod logistic;
mod naive_bayes;
mod svm;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::data::DataTable;
use crate::linalg::{LinalgError, Matrix};

pub use cart::{binary_entropy, gini, train_cart, CartModel, CartParams, Criterion, TreeNode};
pub use knn::{train_knn, KnnModel};
pub use logistic::{log_loss, sigmoid, train_logistic, LogisticModel, LogisticParams};
pub use naive_bayes::{train_nb, GaussianNbModel, VARIANCE_FLOOR};
pub use svm::{scale_gamma, train_svm, train_svm_precomputed, train_svm_precomputed_with, DualSolution, SvmKernel, SvmModel, SvmParams};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training data must contain both classes (only class {present} found)")]
    SingleClass { present: u8 },
    #[error("training set is empty")]
    Empty,
    #[error("model expects {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid neighbour count k={k} for {n} training samples")]
    InvalidK { k: usize, n: usize },
    #[error("loss became non-finite at iteration {iteration} even after step halving")]
    NonFiniteLoss { iteration: usize },
    #[error("precomputed kernel is not positive semidefinite (Cholesky pivot {index} = {pivot:e})")]
    NotPsd { index: usize, pivot: f64 },
    #[error("kernel matrix is {rows}x{cols} but there are {n} labels")]
    KernelShape { rows: usize, cols: usize, n: usize },
    #[error("SMO did not reach KKT tolerance within {iterations} iterations (gap {gap:e})")]
    SvmNotConverged { iterations: usize, gap: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, ModelError>;

/// A fitted binary classifier over fixed-width feature vectors.
pub trait Classifier {
    fn n_features(&self) -> usize;

    fn predict_row(&self, x: &[f64]) -> Result<u8>;

    fn predict(&self, x: &Matrix) -> Result<Vec<u8>> {
        if x.cols() != self.n_features() {
            return Err(ModelError::DimensionMismatch { expected: self.n_features(), got: x.cols() });
        }
        x.row_iter().map(|r| self.predict_row(r)).collect()
    }
}

pub(crate) fn check_dim(expected: usize, x: &[f64]) -> Result<()> {
    if x.len() != expected {
        return Err(ModelError::DimensionMismatch { expected, got: x.len() });
    }
    Ok(())
}

pub(crate) fn require_both_classes(labels: &[u8]) -> Result<()> {
    if labels.is_empty() {
        return Err(ModelError::Empty);
    }
    let pos = labels.iter().filter(|&&l| l == 1).count();
    if pos == 0 {
        return Err(ModelError::SingleClass { present: 0 });
    }
    if pos == labels.len() {
        return Err(ModelError::SingleClass { present: 1 });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Logistic,
    Knn,
    Cart,
    NaiveBayes,
    Svm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [Self::Logistic, Self::Knn, Self::Cart, Self::NaiveBayes, Self::Svm];

    pub fn name(self) -> &'static str {
        match self {
            Self::Logistic => "lr",
            Self::Knn => "knn",
            Self::Cart => "cart",
            Self::NaiveBayes => "nb",
            Self::Svm => "svm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "lr" | "logistic" => Self::Logistic,
            "knn" => Self::Knn,
            "cart" | "tree" => Self::Cart,
            "nb" | "naive_bayes" => Self::NaiveBayes,
            "svm" | "svc" => Self::Svm,
            other => return Err(ModelError::InvalidParameter(format!("unknown model `{other}`"))),
        })
    }
}

/// Hyperparameters for every baseline, defaulting to the benchmark values.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalParams {
    pub logistic: LogisticParams,
    pub knn_k: usize,
    pub cart: CartParams,
    pub svm_c: f64,
    /// `None` uses [`scale_gamma`] on the training features.
    pub svm_gamma: Option<f64>,
}

impl Default for ClassicalParams {
    fn default() -> Self {
        Self {
            logistic: LogisticParams::default(),
            knn_k: 7,
            cart: CartParams::default(),
            svm_c: 1.0,
            svm_gamma: None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum TrainedModel {
    Logistic(LogisticModel),
    Knn(KnnModel),
    Cart(CartModel),
    NaiveBayes(GaussianNbModel),
    Svm(SvmModel),
}

impl TrainedModel {
    pub fn fit(kind: ModelKind, train: &DataTable, params: &ClassicalParams) -> Result<TrainedModel> {
        Ok(match kind {
            ModelKind::Logistic => TrainedModel::Logistic(train_logistic(train, &params.logistic)?),
            ModelKind::Knn => TrainedModel::Knn(train_knn(train, params.knn_k)?),
            ModelKind::Cart => TrainedModel::Cart(train_cart(train, &params.cart)?),
            ModelKind::NaiveBayes => TrainedModel::NaiveBayes(train_nb(train)?),
            ModelKind::Svm => {
                let gamma = params.svm_gamma.unwrap_or_else(|| scale_gamma(train.features()));
                let svm = SvmParams { c: params.svm_c, kernel: SvmKernel::Rbf { gamma }, ..SvmParams::default() };
                TrainedModel::Svm(train_svm(train, &svm)?)
            }
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            TrainedModel::Logistic(_) => ModelKind::Logistic,
            TrainedModel::Knn(_) => ModelKind::Knn,
            TrainedModel::Cart(_) => ModelKind::Cart,
            TrainedModel::NaiveBayes(_) => ModelKind::NaiveBayes,
            TrainedModel::Svm(_) => ModelKind::Svm,
        }
    }

    fn inner(&self) -> &(dyn Classifier + Sync) {
        match self {
            TrainedModel::Logistic(m) => m,
            TrainedModel::Knn(m) => m,
            TrainedModel::Cart(m) => m,
            TrainedModel::NaiveBayes(m) => m,
            TrainedModel::Svm(m) => m,
        }
    }
}

impl Classifier for TrainedModel {
    fn n_features(&self) -> usize {
        self.inner().n_features()
    }

    fn predict_row(&self, x: &[f64]) -> Result<u8> {
        self.inner().predict_row(x)
    }

    fn predict(&self, x: &Matrix) -> Result<Vec<u8>> {
        self.inner().predict(x)
    }
}
