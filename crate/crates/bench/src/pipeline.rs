use std::hash::Hasher;
use std::time::Instant;

use fnv::FnvHasher;
use rayon::prelude::*;

use qbench_core::classical::{Classifier, ClassicalParams, TrainedModel};
use qbench_core::data::{kfold, load_csv, subsample, DataTable, Scaler};
use qbench_core::dimred::{fit_lda, fit_lda_split, fit_pca, fit_skpp, fit_svd, ReductionMethod, Reducer, SkppOptions};
use qbench_core::metrics::{aggregate, evaluate, EvalReport, MetricSet};
use qbench_core::quantum::{train_qsvc, train_vqc, AngleScaler, FeatureMapKind, FeatureMapSpec, VqcParams};

use crate::config::{ModelChoice, ReducerChoice, RunConfig};
use crate::{BenchError, Result};

/// Shape and content hash of the loaded table.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetInfo {
    pub rows_read: usize,
    pub rows_dropped: usize,
    pub n_samples: usize,
    pub n_features: usize,
    pub positive_fraction: f64,
    pub content_hash: u64,
}

/// Rows (indices into the loaded table) used to fit and to score one fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldRecord {
    /// `"cv"` for a cross-validation fold, `"split"` for the held-out split.
    pub kind: &'static str,
    pub index: usize,
    pub fit_rows: Vec<usize>,
    pub eval_rows: Vec<usize>,
    /// Rows the scaler and reducer were actually fitted on.
    pub preprocess_rows: Vec<usize>,
}

impl FoldRecord {
    pub fn fit_hash(&self) -> u64 {
        index_hash(&self.fit_rows)
    }

    pub fn eval_hash(&self) -> u64 {
        index_hash(&self.eval_rows)
    }

    pub fn preprocess_hash(&self) -> u64 {
        index_hash(&self.preprocess_rows)
    }
}

/// FNV-1a over the little-endian bytes of each index.
pub fn index_hash(indices: &[usize]) -> u64 {
    let mut h = FnvHasher::default();
    for &i in indices {
        h.write(&(i as u64).to_le_bytes());
    }
    h.finish()
}

fn table_hash(t: &DataTable) -> u64 {
    let mut h = FnvHasher::default();
    for row in t.features().row_iter() {
        for v in row {
            h.write(&v.to_bits().to_le_bytes());
        }
    }
    h.write(t.labels());
    h.finish()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageFailure {
    pub stage: &'static str,
    pub message: String,
}

impl StageFailure {
    fn new(stage: &'static str, err: impl std::fmt::Display) -> StageFailure {
        StageFailure { stage, message: err.to_string() }
    }
}

impl std::fmt::Display for StageFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.stage, self.message)
    }
}

#[derive(Debug, Clone)]
pub struct ModelOutcome {
    pub model: ModelChoice,
    /// `"cv"` or `"split"`.
    pub protocol: &'static str,
    pub result: std::result::Result<EvalReport, StageFailure>,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub config: RunConfig,
    pub dataset: Option<DatasetInfo>,
    pub folds: Vec<FoldRecord>,
    pub outcomes: Vec<ModelOutcome>,
    /// Reducer warnings seen in any fold, deduplicated.
    pub reducer_flags: Vec<String>,
    /// Set when the whole run failed before any model was trained.
    pub error: Option<String>,
    pub seconds: f64,
    pub version: &'static str,
}

impl RunManifest {
    pub fn failed(config: RunConfig, error: &BenchError) -> RunManifest {
        RunManifest {
            config,
            dataset: None,
            folds: Vec::new(),
            outcomes: Vec::new(),
            reducer_flags: Vec::new(),
            error: Some(error.to_string()),
            seconds: 0.0,
            version: crate::VERSION,
        }
    }

    pub fn all_succeeded(&self) -> bool {
        self.error.is_none() && self.outcomes.iter().all(|o| o.result.is_ok())
    }

    pub fn report(&self, model: ModelChoice) -> Option<&EvalReport> {
        self.outcomes.iter().find(|o| o.model == model).and_then(|o| o.result.as_ref().ok())
    }
}

/// Scaled and reduced tables for one fit/eval pair.
struct Prepared {
    fit: DataTable,
    eval: DataTable,
    flags: Vec<String>,
}

fn fit_reducer(choice: ReducerChoice, train: &DataTable, config: &RunConfig) -> qbench_core::dimred::Result<Option<Reducer>> {
    let k = config.n_qubits;
    let method = match choice {
        ReducerChoice::None | ReducerChoice::Method(ReductionMethod::Identity) => return Ok(None),
        ReducerChoice::Method(m) => m,
    };
    let r = match method {
        ReductionMethod::Svd => fit_svd(train, k)?,
        ReductionMethod::Pca => fit_pca(train, k)?,
        ReductionMethod::Skpp => fit_skpp(train, k, SkppOptions { seed: config.seed, ..SkppOptions::default() })?,
        ReductionMethod::Lda => fit_lda(train)?,
        ReductionMethod::LdaSplit => fit_lda_split(train)?,
        ReductionMethod::Identity => unreachable!(),
    };
    Ok(Some(r))
}

fn prepare(data: &DataTable, fit_rows: &[usize], eval_rows: &[usize], config: &RunConfig) -> std::result::Result<Prepared, StageFailure> {
    let mut fit = data.subset(fit_rows);
    let mut eval = data.subset(eval_rows);
    if config.standardize {
        let scaler = Scaler::fit(fit.features());
        fit = scaler.transform_table(&fit).map_err(|e| StageFailure::new("scale", e))?;
        eval = scaler.transform_table(&eval).map_err(|e| StageFailure::new("scale", e))?;
    }
    let mut flags = Vec::new();
    if let Some(r) = fit_reducer(config.reducer, &fit, config).map_err(|e| StageFailure::new("reduce", e))? {
        fit = r.transform_table(&fit).map_err(|e| StageFailure::new("reduce", e))?;
        eval = r.transform_table(&eval).map_err(|e| StageFailure::new("reduce", e))?;
        flags = r.flags.clone();
    }
    Ok(Prepared { fit, eval, flags })
}

/// Min-max maps the reduced features onto rotation angles in `[0, π]`.
fn to_angles(p: &Prepared) -> std::result::Result<(DataTable, DataTable), StageFailure> {
    let s = AngleScaler::fit(p.fit.features());
    let enc = |t: &DataTable| {
        let x = s.transform(t.features()).map_err(|e| StageFailure::new("encode", e))?;
        t.with_features(x, t.feature_names().to_vec()).map_err(|e| StageFailure::new("encode", e))
    };
    Ok((enc(&p.fit)?, enc(&p.eval)?))
}

fn fit_and_score(model: ModelChoice, p: &Prepared, config: &RunConfig) -> std::result::Result<MetricSet, StageFailure> {
    let pred = match model {
        ModelChoice::Classical(kind) => {
            let params = ClassicalParams { knn_k: config.knn_k, svm_c: config.svm_c, ..ClassicalParams::default() };
            let m = TrainedModel::fit(kind, &p.fit, &params).map_err(|e| StageFailure::new("fit", e))?;
            m.predict(p.eval.features()).map_err(|e| StageFailure::new("predict", e))?
        }
        ModelChoice::Qsvc => {
            let (fit, eval) = to_angles(p)?;
            let spec = match config.featuremap {
                FeatureMapKind::Angle => FeatureMapSpec::angle(config.n_qubits),
                FeatureMapKind::Zz => FeatureMapSpec::zz(config.n_qubits, config.reps),
            };
            let m = train_qsvc(&fit, &spec, config.svm_c).map_err(|e| StageFailure::new("fit", e))?;
            m.predict(eval.features()).map_err(|e| StageFailure::new("predict", e))?
        }
        ModelChoice::Vqc => {
            let (fit, eval) = to_angles(p)?;
            let params = VqcParams {
                n_layers: config.vqc.layers,
                epochs: config.vqc.epochs,
                learning_rate: config.vqc.learning_rate,
                seed: config.seed,
                entangling: config.vqc.entangling,
                ..VqcParams::default()
            };
            let t = train_vqc(&fit, &params).map_err(|e| StageFailure::new("fit", e))?;
            t.model.predict(eval.features()).map_err(|e| StageFailure::new("predict", e))?
        }
    };
    evaluate(p.eval.labels(), &pred).map_err(|e| StageFailure::new("evaluate", e))
}

fn uses_cv(model: ModelChoice, config: &RunConfig) -> bool {
    model != ModelChoice::Vqc || config.cv_all
}

fn score_model(
    model: ModelChoice,
    prepared: &[std::result::Result<Prepared, StageFailure>],
    config: &RunConfig,
    protocol: &'static str,
) -> ModelOutcome {
    let start = Instant::now();
    let per_fold: std::result::Result<Vec<MetricSet>, StageFailure> = prepared
        .par_iter()
        .map(|p| fit_and_score(model, p.as_ref().map_err(Clone::clone)?, config))
        .collect();
    let result = per_fold.and_then(|folds| {
        aggregate(model.name(), config.reducer.name(), config.seed, folds).map_err(|e| StageFailure::new("aggregate", e))
    });
    ModelOutcome { model, protocol, result, seconds: start.elapsed().as_secs_f64() }
}

/// Runs every selected model on one dataset with one reducer.
///
/// CV models use `folds`-fold cross-validation over the training subsample
/// (or every row with `full_data`); the VQC, unless `cv_all`, is fitted on
/// the training subsample and scored on the test subsample. Scaling and
/// reduction are refitted on each fit part. Model failures are recorded in
/// the manifest rather than returned.
pub fn run_benchmark(config: &RunConfig) -> Result<RunManifest> {
    let start = Instant::now();
    config.validate()?;
    let (data, report) = load_csv(&config.dataset.path, &config.dataset.target, &config.dataset.drop_columns)
        .map_err(|e| BenchError::Data(e.to_string()))?;
    config.validate_width(data.n_features())?;
    let info = DatasetInfo {
        rows_read: report.rows_read,
        rows_dropped: report.rows_dropped,
        n_samples: data.n_samples(),
        n_features: data.n_features(),
        positive_fraction: data.positive_fraction(),
        content_hash: table_hash(&data),
    };

    let split = subsample(data.labels(), config.n_train, config.n_test, config.seed, config.stratified)
        .map_err(|e| BenchError::Data(e.to_string()))?;
    let pool: Vec<usize> = if config.full_data { (0..data.n_samples()).collect() } else { split.train_indices.clone() };

    let mut folds = Vec::new();
    let cv_models: Vec<ModelChoice> = config.models.iter().copied().filter(|&m| uses_cv(m, config)).collect();
    let split_models: Vec<ModelChoice> = config.models.iter().copied().filter(|&m| !uses_cv(m, config)).collect();

    if !cv_models.is_empty() {
        let plan = kfold(pool.len(), config.folds, config.seed).map_err(|e| BenchError::Data(e.to_string()))?;
        for (i, (fit, eval)) in plan.folds.iter().enumerate() {
            let fit_rows: Vec<usize> = fit.iter().map(|&j| pool[j]).collect();
            let eval_rows = eval.iter().map(|&j| pool[j]).collect();
            folds.push(FoldRecord { kind: "cv", index: i, preprocess_rows: fit_rows.clone(), fit_rows, eval_rows });
        }
    }
    if !split_models.is_empty() {
        let fit_rows = split.train_indices.clone();
        folds.push(FoldRecord {
            kind: "split",
            index: 0,
            preprocess_rows: fit_rows.clone(),
            fit_rows,
            eval_rows: split.test_indices.clone(),
        });
    }

    let prepared: Vec<_> =
        folds.par_iter().map(|f| prepare(&data, &f.preprocess_rows, &f.eval_rows, config)).collect();
    let mut reducer_flags: Vec<String> =
        prepared.iter().filter_map(|p| p.as_ref().ok()).flat_map(|p| p.flags.iter().cloned()).collect();
    reducer_flags.sort();
    reducer_flags.dedup();

    let n_cv = folds.iter().filter(|f| f.kind == "cv").count();
    let outcomes = config
        .models
        .iter()
        .map(|&m| {
            if uses_cv(m, config) {
                score_model(m, &prepared[..n_cv], config, "cv")
            } else {
                score_model(m, &prepared[n_cv..], config, "split")
            }
        })
        .collect();

    Ok(RunManifest {
        config: config.clone(),
        dataset: Some(info),
        folds,
        outcomes,
        reducer_flags,
        error: None,
        seconds: start.elapsed().as_secs_f64(),
        version: crate::VERSION,
    })
}
