use std::collections::BTreeMap;

use super::{center, check_components, column_means, ReductionMethod, Reducer, Result};
use crate::data::DataTable;
use crate::linalg::{self, complete_orthonormal, Matrix, DEFAULT_TOL};

// Relative eigen/singular gap below which two values count as tied.
const DEGENERATE_GAP: f64 = 1e-9;
const RANK_TOL: f64 = 1e-12;

/// Principal components: top eigenvectors of the (population) covariance
/// of the mean-centered training features.
pub fn fit_pca(train: &DataTable, n_components: usize) -> Result<Reducer> {
    check_components(train, n_components)?;
    let x = train.features();
    let mean = column_means(x);
    let centered = center(x, &mean);
    let n = x.rows() as f64;
    let mut cov = centered.gram();
    cov = Matrix::new(cov.rows(), cov.cols(), cov.into_data().into_iter().map(|v| v / n).collect())?;
    let eig = linalg::eig_symmetric(&cov, DEFAULT_TOL)?;

    let columns: Vec<Vec<f64>> = (0..n_components).map(|k| eig.eigenvector(k)).collect();
    let mut metadata = BTreeMap::new();
    for (k, v) in eig.eigenvalues.iter().enumerate() {
        metadata.insert(format!("eigenvalue_{k}"), *v);
    }
    let flags = spectrum_flags(&eig.eigenvalues, n_components);
    Ok(Reducer {
        method: ReductionMethod::Pca,
        mean,
        projection: Matrix::from_columns(&columns)?,
        metadata,
        flags,
    })
}

/// Right singular vectors of the raw (uncentered) training matrix.
///
/// When there are fewer rows than requested components the basis is
/// padded with an orthonormal complement and flagged `rank_deficient`.
pub fn fit_svd(train: &DataTable, n_components: usize) -> Result<Reducer> {
    check_components(train, n_components)?;
    let x = train.features();
    let d = x.cols();
    let s = linalg::svd(x, DEFAULT_TOL)?;
    let available = s.singular_values.len().min(n_components);
    let mut columns: Vec<Vec<f64>> = (0..available).map(|k| s.vt.row(k).to_vec()).collect();
    let mut values = s.singular_values.clone();
    if available < n_components {
        columns.extend(complete_orthonormal(&columns, n_components - available, d));
        values.resize(n_components + 1, 0.0);
    }
    let mut metadata = BTreeMap::new();
    for (k, v) in s.singular_values.iter().enumerate() {
        metadata.insert(format!("singular_value_{k}"), *v);
    }
    let flags = spectrum_flags(&values, n_components);
    Ok(Reducer {
        method: ReductionMethod::Svd,
        mean: vec![0.0; d],
        projection: Matrix::from_columns(&columns)?,
        metadata,
        flags,
    })
}

// `degenerate`: a retained value ties with its neighbour, so the
// subspace (or its ordering) is not unique. `rank_deficient`: a retained
// value is numerically zero.
fn spectrum_flags(values: &[f64], k: usize) -> Vec<String> {
    let mut flags = Vec::new();
    let top = values.first().copied().unwrap_or(0.0).abs().max(f64::MIN_POSITIVE);
    let upto = (k + 1).min(values.len());
    if values[..upto].windows(2).any(|w| (w[0] - w[1]).abs() <= DEGENERATE_GAP * top) {
        flags.push("degenerate".to_string());
    }
    if values.get(k - 1).is_some_and(|&v| v <= RANK_TOL * top) {
        flags.push("rank_deficient".to_string());
    }
    flags
}
