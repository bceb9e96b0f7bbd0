//! Tabular data ingestion and sampling plans.
//!
//! CSV files are read with a header row; the target column is binarized to
//! {0, 1} and removed from the features. Rows with missing or non-numeric
//! cells are dropped rather than imputed.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{LinalgError, Matrix};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("target column `{0}` not found in header")]
    MissingTarget(String),
    #[error("target value `{value}` on line {line} is not binary (expected 0 or 1)")]
    NonBinaryTarget { value: String, line: u64 },
    #[error("no rows left after cleaning ({dropped} dropped)")]
    EmptyAfterCleaning { dropped: usize },
    #[error("labels contain only class {present}; both classes are required")]
    SingleClass { present: u8 },
    #[error("requested {requested} rows but only {available} are available")]
    InsufficientRows { requested: usize, available: usize },
    #[error("class {class} would be absent from the {part} part of the split")]
    ClassAbsent { class: u8, part: &'static str },
    #[error("invalid fold count k={k} for n={n} samples")]
    InvalidFolds { k: usize, n: usize },
    #[error("labels length {labels} does not match {rows} feature rows")]
    LabelMismatch { labels: usize, rows: usize },
    #[error("label {0} is outside {{0, 1}}")]
    BadLabel(u8),
    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, DataError>;

/// Numeric feature matrix with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    features: Matrix,
    labels: Vec<u8>,
    feature_names: Vec<String>,
}

impl DataTable {
    pub fn new(features: Matrix, labels: Vec<u8>, feature_names: Vec<String>) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(DataError::LabelMismatch { labels: labels.len(), rows: features.rows() });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
            return Err(DataError::BadLabel(bad));
        }
        if feature_names.len() != features.cols() {
            return Err(DataError::DimensionMismatch {
                expected: features.cols(),
                got: feature_names.len(),
            });
        }
        features.check_finite()?;
        Ok(Self { features, labels, feature_names })
    }

    /// Table with generated feature names `x0, x1, ...`.
    pub fn unnamed(features: Matrix, labels: Vec<u8>) -> Result<Self> {
        let names = (0..features.cols()).map(|j| format!("x{j}")).collect();
        Self::new(features, labels, names)
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_samples(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    /// Count of (class 0, class 1) labels.
    pub fn class_counts(&self) -> [usize; 2] {
        class_counts(&self.labels)
    }

    pub fn positive_fraction(&self) -> f64 {
        self.class_counts()[1] as f64 / self.n_samples().max(1) as f64
    }

    pub fn has_both_classes(&self) -> bool {
        let [neg, pos] = self.class_counts();
        neg > 0 && pos > 0
    }

    pub fn require_both_classes(&self) -> Result<()> {
        match self.class_counts() {
            [_, 0] => Err(DataError::SingleClass { present: 0 }),
            [0, _] => Err(DataError::SingleClass { present: 1 }),
            _ => Ok(()),
        }
    }

    pub fn subset(&self, indices: &[usize]) -> DataTable {
        DataTable {
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    pub fn select_features(&self, columns: &[usize]) -> DataTable {
        DataTable {
            features: self.features.select_columns(columns),
            labels: self.labels.clone(),
            feature_names: columns.iter().map(|&j| self.feature_names[j].clone()).collect(),
        }
    }

    /// Replace the feature matrix (same row count), keeping labels.
    pub fn with_features(&self, features: Matrix, names: Vec<String>) -> Result<DataTable> {
        DataTable::new(features, self.labels.clone(), names)
    }

    /// Write the table as CSV with the label in a trailing `target` column.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut writer = csv::Writer::from_path(path)?;
        let mut header: Vec<&str> = self.feature_names.iter().map(String::as_str).collect();
        header.push("target");
        writer.write_record(&header)?;
        for (row, label) in self.features.row_iter().zip(&self.labels) {
            let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            record.push(label.to_string());
            writer.write_record(&record)?;
        }
        writer.flush().map_err(|source| DataError::Io { path: path.display().to_string(), source })?;
        Ok(())
    }
}

pub fn class_counts(labels: &[u8]) -> [usize; 2] {
    labels.iter().fold([0, 0], |mut acc, &l| {
        acc[usize::from(l == 1)] += 1;
        acc
    })
}

/// Rows discarded during cleaning.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub rows_read: usize,
    pub rows_dropped: usize,
    /// 1-based data line numbers (header excluded) of the first dropped rows.
    pub dropped_lines: Vec<u64>,
}

const MAX_REPORTED_LINES: usize = 20;

/// Load a headered CSV, binarize `target_column`, drop `drop_columns`.
pub fn load_csv(
    path: impl AsRef<Path>,
    target_column: &str,
    drop_columns: &[String],
) -> Result<(DataTable, LoadReport)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|source| DataError::Io { path: path.display().to_string(), source })?;
    read_csv(file, target_column, drop_columns)
}

/// Same as [`load_csv`] over any reader.
pub fn read_csv<R: std::io::Read>(
    reader: R,
    target_column: &str,
    drop_columns: &[String],
) -> Result<(DataTable, LoadReport)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let target_idx = header
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| DataError::MissingTarget(target_column.to_string()))?;
    let dropped: HashSet<&str> = drop_columns.iter().map(String::as_str).collect();
    let keep: Vec<usize> = (0..header.len())
        .filter(|&j| j != target_idx && !dropped.contains(header[j].as_str()))
        .collect();
    let names: Vec<String> = keep.iter().map(|&j| header[j].clone()).collect();

    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut report = LoadReport::default();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        let line = line as u64 + 1;
        report.rows_read += 1;
        let label = match parse_label(record.get(target_idx).unwrap_or("")) {
            Some(Ok(l)) => l,
            Some(Err(())) => {
                return Err(DataError::NonBinaryTarget {
                    value: record.get(target_idx).unwrap_or("").to_string(),
                    line,
                })
            }
            None => {
                report.drop_line(line);
                continue;
            }
        };
        let row: Option<Vec<f64>> = keep
            .iter()
            .map(|&j| record.get(j).and_then(|s| s.trim().parse::<f64>().ok()).filter(|v| v.is_finite()))
            .collect();
        match row {
            Some(row) => {
                data.extend(row);
                labels.push(label);
            }
            None => report.drop_line(line),
        }
    }
    if labels.is_empty() {
        return Err(DataError::EmptyAfterCleaning { dropped: report.rows_dropped });
    }
    let features = Matrix::new(labels.len(), keep.len(), data)?;
    let table = DataTable::new(features, labels, names)?;
    table.require_both_classes()?;
    Ok((table, report))
}

impl LoadReport {
    fn drop_line(&mut self, line: u64) {
        self.rows_dropped += 1;
        if self.dropped_lines.len() < MAX_REPORTED_LINES {
            self.dropped_lines.push(line);
        }
    }
}

// None: missing/unparseable (row dropped). Some(Err): numeric but not 0/1.
fn parse_label(cell: &str) -> Option<std::result::Result<u8, ()>> {
    let v: f64 = cell.trim().parse().ok()?;
    if v == 0.0 {
        Some(Ok(0))
    } else if v == 1.0 {
        Some(Ok(1))
    } else {
        Some(Err(()))
    }
}

/// Per-column z-score parameters fitted on a training table.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    pub means: Vec<f64>,
    /// Population standard deviation; zero marks a constant column.
    pub stds: Vec<f64>,
}

impl Scaler {
    pub fn fit(features: &Matrix) -> Scaler {
        let n = features.rows().max(1) as f64;
        let d = features.cols();
        let mut means = vec![0.0; d];
        for row in features.row_iter() {
            means.iter_mut().zip(row).for_each(|(m, x)| *m += x);
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut vars = vec![0.0; d];
        for row in features.row_iter() {
            for ((v, x), m) in vars.iter_mut().zip(row).zip(&means) {
                *v += (x - m) * (x - m);
            }
        }
        let stds = vars.iter().map(|v| (v / n).sqrt()).collect();
        Scaler { means, stds }
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(x, (m, s))| if *s > 0.0 { (x - m) / s } else { 0.0 })
            .collect()
    }

    pub fn transform(&self, features: &Matrix) -> Result<Matrix> {
        if features.cols() != self.means.len() {
            return Err(DataError::DimensionMismatch { expected: self.means.len(), got: features.cols() });
        }
        let data = features.row_iter().flat_map(|r| self.transform_row(r)).collect();
        Ok(Matrix::new(features.rows(), features.cols(), data)?)
    }

    pub fn transform_table(&self, table: &DataTable) -> Result<DataTable> {
        table.with_features(self.transform(table.features())?, table.feature_names().to_vec())
    }
}

/// Z-score every feature column; constant columns map to 0.
pub fn standardize(table: &DataTable) -> Result<(DataTable, Scaler)> {
    let scaler = Scaler::fit(table.features());
    let out = scaler.transform_table(table)?;
    Ok((out, scaler))
}

/// Disjoint train/test index sets drawn from a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub seed: u64,
}

/// Draw `n_train` + `n_test` rows without replacement.
///
/// When `stratified`, each class contributes to each part in proportion to
/// its share of the full table (largest-remainder rounding).
pub fn subsample(labels: &[u8], n_train: usize, n_test: usize, seed: u64, stratified: bool) -> Result<SplitPlan> {
    let n = labels.len();
    if n_train + n_test > n {
        return Err(DataError::InsufficientRows { requested: n_train + n_test, available: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = if stratified {
        let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for (i, &l) in labels.iter().enumerate() {
            by_class[usize::from(l == 1)].push(i);
        }
        let sizes = [by_class[0].len(), by_class[1].len()];
        let mut train_quota = proportional_quota(n_train, sizes);
        let mut test_quota = proportional_quota(n_test, sizes);
        // Rounding can overcommit one class only when nearly every row is
        // requested; shift the excess to the other class.
        for c in 0..2 {
            let over = (train_quota[c] + test_quota[c]).saturating_sub(sizes[c]);
            if over > 0 {
                let from_test = over.min(test_quota[c]);
                test_quota[c] -= from_test;
                test_quota[1 - c] += from_test;
                train_quota[c] -= over - from_test;
                train_quota[1 - c] += over - from_test;
            }
        }
        let mut train = Vec::with_capacity(n_train);
        let mut test = Vec::with_capacity(n_test);
        for c in 0..2 {
            by_class[c].shuffle(&mut rng);
            train.extend_from_slice(&by_class[c][..train_quota[c]]);
            test.extend_from_slice(&by_class[c][train_quota[c]..train_quota[c] + test_quota[c]]);
        }
        for (part, quota) in [("train", train_quota), ("test", test_quota)] {
            let total: usize = quota.iter().sum();
            for c in 0..2u8 {
                if total > 0 && quota[c as usize] == 0 {
                    return Err(DataError::ClassAbsent { class: c, part });
                }
            }
        }
        (train, test)
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        let test = all[n_train..n_train + n_test].to_vec();
        all.truncate(n_train);
        (all, test)
    };
    train.shuffle(&mut rng);
    test.shuffle(&mut rng);
    Ok(SplitPlan { train_indices: train, test_indices: test, seed })
}

// Hamilton apportionment of `total` across classes of the given sizes.
fn proportional_quota(total: usize, sizes: [usize; 2]) -> [usize; 2] {
    let n: usize = sizes.iter().sum();
    if n == 0 {
        return [0, 0];
    }
    let exact = sizes.map(|s| total as f64 * s as f64 / n as f64);
    let mut quota = exact.map(|e| e.floor() as usize);
    let mut remaining = total - quota.iter().sum::<usize>();
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())));
    for &c in order.iter().cycle() {
        if remaining == 0 {
            break;
        }
        quota[c] += 1;
        remaining -= 1;
    }
    quota
}

/// k-fold partition of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    /// (train, test) index pairs.
    pub folds: Vec<(Vec<usize>, Vec<usize>)>,
    pub k: usize,
}

/// Shuffle `0..n` and cut it into `k` folds whose sizes differ by at most
/// one (the first `n % k` folds get the extra element).
pub fn kfold(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 || k > n {
        return Err(DataError::InvalidFolds { k, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        let test = order[start..start + size].to_vec();
        let train = order[..start].iter().chain(&order[start + size..]).copied().collect();
        folds.push((train, test));
        start += size;
    }
    Ok(FoldPlan { folds, k })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(csv: &str, target: &str) -> Result<(DataTable, LoadReport)> {
        read_csv(csv.as_bytes(), target, &[])
    }

    #[test]
    fn drops_non_numeric_rows() {
        let (t, r) = toy("a,b,y\n1,2,0\n3,oops,1\n5,6,1\n", "y").unwrap();
        assert_eq!(t.n_samples(), 2);
        assert_eq!(t.labels(), &[0, 1]);
        assert_eq!(t.feature_names(), &["a", "b"]);
        assert_eq!(r.rows_dropped, 1);
        assert_eq!(r.dropped_lines, vec![2]);
    }

    #[test]
    fn drop_columns_and_target_removed() {
        let (t, _) = read_csv("ID,a,y\n1,2.5,0\n2,3.5,1\n".as_bytes(), "y", &["ID".into()]).unwrap();
        assert_eq!(t.feature_names(), &["a"]);
        assert_eq!(t.features().data(), &[2.5, 3.5]);
    }

    #[test]
    fn load_errors() {
        assert!(matches!(toy("a,b\n1,2\n", "y"), Err(DataError::MissingTarget(_))));
        assert!(matches!(toy("a,y\n1,2\n", "y"), Err(DataError::NonBinaryTarget { line: 1, .. })));
        assert!(matches!(toy("a,y\nx,1\n", "y"), Err(DataError::EmptyAfterCleaning { dropped: 1 })));
        assert!(matches!(toy("a,y\n1,1\n2,1\n", "y"), Err(DataError::SingleClass { present: 1 })));
        assert!(matches!(
            load_csv("/nonexistent/file.csv", "y", &[]),
            Err(DataError::Io { .. })
        ));
    }

    #[test]
    fn standardize_closed_form() {
        let f = Matrix::from_rows(&[vec![1.0, 5.0], vec![2.0, 5.0], vec![3.0, 5.0]]).unwrap();
        let t = DataTable::unnamed(f, vec![0, 1, 0]).unwrap();
        let (s, scaler) = standardize(&t).unwrap();
        let col = s.features().column(0);
        let z = 1.5_f64.sqrt();
        for (got, want) in col.iter().zip([-z, 0.0, z]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(s.features().column(1), vec![0.0; 3]);
        assert_eq!(scaler.stds[1], 0.0);
    }

    #[test]
    fn kfold_sizes() {
        let plan = kfold(1000, 10, 1).unwrap();
        assert!(plan.folds.iter().all(|(_, t)| t.len() == 100));
        let plan = kfold(1003, 10, 1).unwrap();
        let sizes: Vec<usize> = plan.folds.iter().map(|(_, t)| t.len()).collect();
        assert_eq!(sizes.iter().filter(|&&s| s == 101).count(), 3);
        assert_eq!(sizes.iter().filter(|&&s| s == 100).count(), 7);
        let loo = kfold(10, 10, 3).unwrap();
        assert!(loo.folds.iter().all(|(tr, te)| te.len() == 1 && tr.len() == 9));
        assert!(matches!(kfold(5, 6, 0), Err(DataError::InvalidFolds { .. })));
        assert!(matches!(kfold(5, 1, 0), Err(DataError::InvalidFolds { .. })));
    }

    #[test]
    fn exhaustive_subsample_is_permutation() {
        let labels: Vec<u8> = (0..50).map(|i| u8::from(i % 4 == 0)).collect();
        for stratified in [false, true] {
            let plan = subsample(&labels, 50, 0, 9, stratified).unwrap();
            let mut idx = plan.train_indices.clone();
            idx.sort_unstable();
            assert_eq!(idx, (0..50).collect::<Vec<_>>());
            assert!(plan.test_indices.is_empty());
        }
    }

    #[test]
    fn subsample_errors() {
        let labels = vec![0, 0, 0, 1];
        assert!(matches!(subsample(&labels, 4, 1, 0, true), Err(DataError::InsufficientRows { .. })));
        // one positive cannot be in both parts
        assert!(matches!(subsample(&labels, 2, 2, 0, true), Err(DataError::ClassAbsent { .. })));
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn kfold_partitions(n in 2usize..300, k in 2usize..20, seed in any::<u64>()) {
            prop_assume!(k <= n);
            let plan = kfold(n, k, seed).unwrap();
            let mut seen = vec![0usize; n];
            let sizes: Vec<usize> = plan.folds.iter().map(|(_, t)| t.len()).collect();
            for (train, test) in &plan.folds {
                prop_assert_eq!(train.len() + test.len(), n);
                for &i in test { seen[i] += 1; }
                let test_set: HashSet<_> = test.iter().collect();
                prop_assert!(train.iter().all(|i| !test_set.contains(i)));
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            prop_assert_eq!(plan, kfold(n, k, seed).unwrap());
        }

        #[test]
        fn stratified_subsample_proportions(
            n0 in 5usize..400, n1 in 5usize..400, frac in 0.1f64..0.9, seed in any::<u64>()
        ) {
            let labels: Vec<u8> = std::iter::repeat(0).take(n0).chain(std::iter::repeat(1).take(n1)).collect();
            let n = n0 + n1;
            let n_train = ((n as f64) * frac * 0.8) as usize;
            let n_test = ((n as f64) * (1.0 - frac) * 0.8) as usize;
            let plan = match subsample(&labels, n_train, n_test, seed, true) {
                Ok(p) => p,
                Err(DataError::ClassAbsent { .. }) => return Ok(()),
                Err(e) => panic!("{e}"),
            };
            prop_assert_eq!(plan.train_indices.len(), n_train);
            prop_assert_eq!(plan.test_indices.len(), n_test);
            let p = n1 as f64 / n as f64;
            for part in [&plan.train_indices, &plan.test_indices] {
                let pos = part.iter().filter(|&&i| labels[i] == 1).count() as f64;
                prop_assert!((pos - p * part.len() as f64).abs() <= 1.0);
            }
            let train: HashSet<_> = plan.train_indices.iter().collect();
            prop_assert!(plan.test_indices.iter().all(|i| !train.contains(i)));
            prop_assert_eq!(&plan, &subsample(&labels, n_train, n_test, seed, true).unwrap());
        }

        #[test]
        fn scaler_reapplication_is_idempotent(seed in any::<u64>()) {
            use rand::Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<f64> = (0..40).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let t = DataTable::unnamed(Matrix::new(10, 4, data).unwrap(), vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1]).unwrap();
            let (s, scaler) = standardize(&t).unwrap();
            let again = scaler.transform_table(&t).unwrap();
            prop_assert_eq!(&s, &again);
            for j in 0..4 {
                let col = s.features().column(j);
                let mean = col.iter().sum::<f64>() / 10.0;
                let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 10.0;
                prop_assert!(mean.abs() < 1e-9);
                prop_assert!((var.sqrt() - 1.0).abs() < 1e-9);
            }
        }
    }
}
