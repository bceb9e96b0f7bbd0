//! Run configuration: defaults, `key = value` files and validation.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use qbench_core::classical::ModelKind;
use qbench_core::dimred::ReductionMethod;
use qbench_core::quantum::FeatureMapKind;

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DatasetKind {
    UciCredit,
    BankFraud,
    Custom,
}

impl DatasetKind {
    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::UciCredit => "uci_credit",
            DatasetKind::BankFraud => "bank_fraud",
            DatasetKind::Custom => "custom",
        }
    }
}

impl FromStr for DatasetKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uci_credit" | "uci" => Ok(DatasetKind::UciCredit),
            "bank_fraud" | "fraud" => Ok(DatasetKind::BankFraud),
            "custom" => Ok(DatasetKind::Custom),
            other => Err(BenchError::Config(format!("unknown dataset `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    /// Label used in outputs.
    pub name: String,
    pub path: PathBuf,
    pub target: String,
    pub drop_columns: Vec<String>,
}

impl DatasetSpec {
    /// Column layout of the published CSV files, read from `data/` by
    /// default.
    pub fn preset(kind: DatasetKind) -> DatasetSpec {
        let (path, target, drop) = match kind {
            DatasetKind::UciCredit => ("data/UCI_Credit_Card.csv", "default.payment.next.month", vec!["ID".to_string()]),
            DatasetKind::BankFraud => ("data/fraud_detection_bank_dataset.csv", "targets", Vec::new()),
            DatasetKind::Custom => ("data.csv", "target", Vec::new()),
        };
        DatasetSpec { kind, name: kind.name().to_string(), path: PathBuf::from(path), target: target.to_string(), drop_columns: drop }
    }
}

/// Dimensionality reduction applied before every model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReducerChoice {
    None,
    Method(ReductionMethod),
}

impl ReducerChoice {
    pub const SWEEP: [ReducerChoice; 4] = [
        ReducerChoice::Method(ReductionMethod::Svd),
        ReducerChoice::Method(ReductionMethod::Pca),
        ReducerChoice::Method(ReductionMethod::Skpp),
        ReducerChoice::Method(ReductionMethod::LdaSplit),
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReducerChoice::None => "none",
            ReducerChoice::Method(m) => m.name(),
        }
    }

    /// Output width for `n_features` inputs when targeting `n_qubits`.
    pub fn output_dim(self, n_features: usize, n_qubits: usize) -> usize {
        match self {
            ReducerChoice::None | ReducerChoice::Method(ReductionMethod::Identity) => n_features,
            ReducerChoice::Method(ReductionMethod::LdaSplit) => 2,
            ReducerChoice::Method(ReductionMethod::Lda) => 1,
            ReducerChoice::Method(_) => n_qubits,
        }
    }
}

impl fmt::Display for ReducerChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReducerChoice {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "identity" => Ok(ReducerChoice::None),
            other => other.parse().map(ReducerChoice::Method).map_err(|e| BenchError::Config(e.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelChoice {
    Classical(ModelKind),
    Qsvc,
    Vqc,
}

impl ModelChoice {
    pub const ALL: [ModelChoice; 7] = [
        ModelChoice::Classical(ModelKind::Logistic),
        ModelChoice::Classical(ModelKind::Knn),
        ModelChoice::Classical(ModelKind::Cart),
        ModelChoice::Classical(ModelKind::NaiveBayes),
        ModelChoice::Classical(ModelKind::Svm),
        ModelChoice::Qsvc,
        ModelChoice::Vqc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelChoice::Classical(k) => k.name(),
            ModelChoice::Qsvc => "qsvc",
            ModelChoice::Vqc => "vqc",
        }
    }

    pub fn is_quantum(self) -> bool {
        matches!(self, ModelChoice::Qsvc | ModelChoice::Vqc)
    }
}

impl fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelChoice {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "qsvc" => Ok(ModelChoice::Qsvc),
            "vqc" | "vqa" => Ok(ModelChoice::Vqc),
            other => other.parse().map(ModelChoice::Classical).map_err(|e| BenchError::Config(e.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqcSettings {
    pub layers: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub entangling: bool,
}

impl Default for VqcSettings {
    fn default() -> Self {
        Self { layers: 4, epochs: 100, learning_rate: 0.5, entangling: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: DatasetSpec,
    pub reducer: ReducerChoice,
    pub models: Vec<ModelChoice>,
    pub n_train: usize,
    pub n_test: usize,
    pub n_qubits: usize,
    pub folds: usize,
    pub seed: u64,
    /// Encoding of the QSVC kernel. The VQC always uses angle encoding.
    pub featuremap: FeatureMapKind,
    pub reps: usize,
    pub vqc: VqcSettings,
    pub svm_c: f64,
    pub knn_k: usize,
    /// Cross-validate the VQC too instead of a single train/test split.
    pub cv_all: bool,
    /// Cross-validate on every loaded row instead of the training subsample.
    pub full_data: bool,
    pub standardize: bool,
    pub stratified: bool,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: DatasetSpec::preset(DatasetKind::UciCredit),
            reducer: ReducerChoice::None,
            models: ModelChoice::ALL[..5].to_vec(),
            n_train: 800,
            n_test: 200,
            n_qubits: 2,
            folds: 10,
            seed: 0,
            featuremap: FeatureMapKind::Zz,
            reps: 2,
            vqc: VqcSettings::default(),
            svm_c: 1.0,
            knn_k: 7,
            cv_all: false,
            full_data: false,
            standardize: true,
            stratified: true,
            out_dir: PathBuf::from("results"),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, BenchError> {
    value.trim().parse().map_err(|_| BenchError::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, BenchError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(BenchError::Config(format!("invalid boolean `{value}` for `{key}`"))),
    }
}

fn split_list(value: &str) -> Vec<String> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

impl RunConfig {
    /// Applies one setting. Setting `dataset` resets path, target and
    /// dropped columns to that preset, so it should come first.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), BenchError> {
        let key = key.trim().replace('-', "_");
        match key.as_str() {
            "dataset" => {
                let kind: DatasetKind = value.parse()?;
                self.dataset = DatasetSpec::preset(kind);
            }
            "dataset_name" => self.dataset.name = value.trim().to_string(),
            "data" | "data_path" => self.dataset.path = PathBuf::from(value.trim()),
            "target" => self.dataset.target = value.trim().to_string(),
            "drop" | "drop_columns" => self.dataset.drop_columns = split_list(value),
            "reducer" => self.reducer = value.parse()?,
            "models" => {
                self.models = split_list(value).iter().map(|m| m.parse()).collect::<Result<_, _>>()?;
            }
            "n_train" => self.n_train = parse(&key, value)?,
            "n_test" => self.n_test = parse(&key, value)?,
            "n_qubits" => self.n_qubits = parse(&key, value)?,
            "folds" => self.folds = parse(&key, value)?,
            "seed" => self.seed = parse(&key, value)?,
            "featuremap" => {
                self.featuremap = value.parse().map_err(|e: qbench_core::quantum::QuantumError| {
                    BenchError::Config(e.to_string())
                })?
            }
            "reps" => self.reps = parse(&key, value)?,
            "vqc_layers" => self.vqc.layers = parse(&key, value)?,
            "vqc_epochs" => self.vqc.epochs = parse(&key, value)?,
            "vqc_lr" => self.vqc.learning_rate = parse(&key, value)?,
            "vqc_entangling" => self.vqc.entangling = parse_bool(&key, value)?,
            "svm_c" => self.svm_c = parse(&key, value)?,
            "knn_k" => self.knn_k = parse(&key, value)?,
            "cv_all" => self.cv_all = parse_bool(&key, value)?,
            "full_data" => self.full_data = parse_bool(&key, value)?,
            "standardize" => self.standardize = parse_bool(&key, value)?,
            "stratified" => self.stratified = parse_bool(&key, value)?,
            "out" | "out_dir" => self.out_dir = PathBuf::from(value.trim()),
            other => return Err(BenchError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<(), BenchError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| BenchError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            entries.push((k.trim().to_string(), v.trim().to_string()));
        }
        // presets first so explicit paths and targets override them
        entries.sort_by_key(|(k, _)| k != "dataset");
        for (k, v) in entries {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<RunConfig, BenchError> {
        let mut c = RunConfig::default();
        c.apply_text(text)?;
        Ok(c)
    }

    /// Checks that do not need the data.
    pub fn validate(&self) -> Result<(), BenchError> {
        let err = |m: String| Err(BenchError::Config(m));
        if self.models.is_empty() {
            return err("no models selected".into());
        }
        if self.n_train == 0 {
            return err("n_train must be positive".into());
        }
        if self.folds < 2 {
            return err(format!("folds must be at least 2, got {}", self.folds));
        }
        if self.n_qubits == 0 || self.n_qubits > qbench_core::quantum::MAX_QUBITS {
            return err(format!("n_qubits must be in 1..={}", qbench_core::quantum::MAX_QUBITS));
        }
        if !(self.svm_c > 0.0 && self.svm_c.is_finite()) {
            return err("svm_c must be positive".into());
        }
        if !(self.vqc.learning_rate > 0.0 && self.vqc.learning_rate.is_finite()) {
            return err("vqc_lr must be positive".into());
        }
        if self.featuremap == FeatureMapKind::Zz && self.reps == 0 {
            return err("reps must be at least 1".into());
        }
        let quantum = self.models.iter().any(|m| m.is_quantum());
        if quantum && self.reducer != ReducerChoice::None {
            let dim = self.reducer.output_dim(usize::MAX, self.n_qubits);
            if dim != self.n_qubits {
                return err(format!(
                    "reducer {} yields {dim} features but quantum models need n_qubits = {}",
                    self.reducer, self.n_qubits
                ));
            }
        }
        Ok(())
    }

    /// Checks that need the loaded feature count.
    pub fn validate_width(&self, n_features: usize) -> Result<(), BenchError> {
        let dim = self.reducer.output_dim(n_features, self.n_qubits);
        if self.models.iter().any(|m| m.is_quantum()) && dim != self.n_qubits {
            return Err(BenchError::Config(format!(
                "reducer {} yields {dim} features but quantum models need n_qubits = {}",
                self.reducer, self.n_qubits
            )));
        }
        Ok(())
    }

    /// `key = value` echo in a fixed key order.
    pub fn to_text(&self) -> String {
        let models: Vec<&str> = self.models.iter().map(|m| m.name()).collect();
        let mut out = String::new();
        let mut put = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        put("dataset", self.dataset.kind.name().to_string());
        put("dataset_name", self.dataset.name.clone());
        put("data", self.dataset.path.display().to_string());
        put("target", self.dataset.target.clone());
        put("drop", self.dataset.drop_columns.join(","));
        put("reducer", self.reducer.name().to_string());
        put("models", models.join(","));
        put("n_train", self.n_train.to_string());
        put("n_test", self.n_test.to_string());
        put("n_qubits", self.n_qubits.to_string());
        put("folds", self.folds.to_string());
        put("seed", self.seed.to_string());
        put("featuremap", self.featuremap.to_string());
        put("reps", self.reps.to_string());
        put("vqc_layers", self.vqc.layers.to_string());
        put("vqc_epochs", self.vqc.epochs.to_string());
        put("vqc_lr", self.vqc.learning_rate.to_string());
        put("vqc_entangling", self.vqc.entangling.to_string());
        put("svm_c", self.svm_c.to_string());
        put("knn_k", self.knn_k.to_string());
        put("cv_all", self.cv_all.to_string());
        put("full_data", self.full_data.to_string());
        put("standardize", self.standardize.to_string());
        put("stratified", self.stratified.to_string());
        put("out_dir", self.out_dir.display().to_string());
        out
    }
}
