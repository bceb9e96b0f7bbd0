//! Fisher linear discriminant for binary labels, and the split-half
//! variant that turns one discriminant per feature half into a
//! two-dimensional embedding.

use std::collections::BTreeMap;

use super::{column_means, ReduceError, ReductionMethod, Reducer, Result};
use crate::data::DataTable;
use crate::linalg::{dot, norm, solve_spd, Matrix};

/// Fisher ratios (with pooled per-sample scatter) below this mark a half
/// whose discriminant carries essentially no class information.
pub const FISHER_WEAK_THRESHOLD: f64 = 0.05;

const RIDGE: f64 = 1e-6;

struct Discriminant {
    direction: Vec<f64>,
    /// (wᵀΔμ)² / (wᵀ S_W w / n), unregularized.
    fisher_ratio: f64,
}

struct Scatter {
    mean_diff: Vec<f64>,
    within: Matrix,
    n: usize,
}

fn scatter(x: &Matrix, labels: &[u8]) -> Result<Scatter> {
    let d = x.cols();
    let mut sums = [vec![0.0; d], vec![0.0; d]];
    let mut counts = [0usize; 2];
    for (row, &l) in x.row_iter().zip(labels) {
        let c = usize::from(l);
        counts[c] += 1;
        sums[c].iter_mut().zip(row).for_each(|(s, v)| *s += v);
    }
    for c in 0..2 {
        if counts[c] == 0 {
            return Err(ReduceError::MissingClass(c as u8));
        }
    }
    let means: Vec<Vec<f64>> =
        (0..2).map(|c| sums[c].iter().map(|s| s / counts[c] as f64).collect()).collect();
    let mut within = Matrix::zeros(d, d);
    for (row, &l) in x.row_iter().zip(labels) {
        let mu = &means[usize::from(l)];
        let dev: Vec<f64> = row.iter().zip(mu).map(|(v, m)| v - m).collect();
        for i in 0..d {
            for j in i..d {
                within[(i, j)] += dev[i] * dev[j];
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            within[(i, j)] = within[(j, i)];
        }
    }
    let mean_diff = means[1].iter().zip(&means[0]).map(|(a, b)| a - b).collect();
    Ok(Scatter { mean_diff, within, n: x.rows() })
}

/// Fisher ratio of direction `w` on `(x, labels)`: squared projected mean
/// difference over pooled within-class variance along `w`.
pub fn fisher_ratio(x: &Matrix, labels: &[u8], w: &[f64]) -> Result<f64> {
    let s = scatter(x, labels)?;
    Ok(ratio_from_scatter(&s, w))
}

fn ratio_from_scatter(s: &Scatter, w: &[f64]) -> f64 {
    let between = dot(w, &s.mean_diff).powi(2);
    let sw = s.within.matvec(w).expect("scatter is d×d");
    let within = dot(w, &sw) / s.n as f64;
    if within <= 0.0 {
        return if between > 0.0 { f64::INFINITY } else { 0.0 };
    }
    between / within
}

fn discriminant(x: &Matrix, labels: &[u8], columns: &[usize]) -> Result<Discriminant> {
    let s = scatter(x, labels)?;
    let d = x.cols();
    let scale = x.max_abs().max(1.0);
    if norm(&s.mean_diff) <= 1e-12 * scale {
        return Err(ReduceError::DegenerateClasses { columns: columns.to_vec() });
    }
    let trace = s.within.trace();
    let eps = if trace > 0.0 { RIDGE * trace / d as f64 } else { 1e-12 };
    let mut reg = s.within.clone();
    for i in 0..d {
        reg[(i, i)] += eps;
    }
    let w = solve_spd(&reg, &s.mean_diff)?;
    let nw = norm(&w);
    let direction: Vec<f64> = w.iter().map(|v| v / nw).collect();
    // (Δμ)ᵀ S⁻¹ Δμ > 0, so class 1 already projects above class 0
    let fisher_ratio = ratio_from_scatter(&s, &direction);
    Ok(Discriminant { direction, fisher_ratio })
}

/// Contiguous feature halves; the first takes the extra column when the
/// count is odd.
pub fn feature_halves(d: usize) -> (Vec<usize>, Vec<usize>) {
    let first = d.div_ceil(2);
    ((0..first).collect(), (first..d).collect())
}

/// One-component Fisher LDA over all features.
pub fn fit_lda(train: &DataTable) -> Result<Reducer> {
    if train.n_samples() == 0 {
        return Err(ReduceError::EmptyTable);
    }
    let d = train.n_features();
    let columns: Vec<usize> = (0..d).collect();
    let disc = discriminant(train.features(), train.labels(), &columns)?;
    let mut metadata = BTreeMap::new();
    metadata.insert("fisher_ratio".to_string(), disc.fisher_ratio);
    let mut flags = Vec::new();
    if disc.fisher_ratio < FISHER_WEAK_THRESHOLD {
        flags.push("weak".to_string());
    }
    Ok(Reducer {
        method: ReductionMethod::Lda,
        mean: column_means(train.features()),
        projection: Matrix::from_columns(&[disc.direction])?,
        metadata,
        flags,
    })
}

/// Split-half LDA: features are cut into two contiguous halves and each
/// half is reduced to its own Fisher direction, giving two outputs.
pub fn fit_lda_split(train: &DataTable) -> Result<Reducer> {
    let d = train.n_features();
    if d < 2 {
        return Err(ReduceError::TooFewFeatures { method: "lda_split", needed: 2, got: d });
    }
    if train.n_samples() == 0 {
        return Err(ReduceError::EmptyTable);
    }
    let (h1, h2) = feature_halves(d);
    let mut projection = Matrix::zeros(d, 2);
    let mut metadata = BTreeMap::new();
    let mut flags = Vec::new();
    for (k, half) in [h1, h2].iter().enumerate() {
        let x = train.features().select_columns(half);
        let disc = discriminant(&x, train.labels(), half)?;
        for (&j, &v) in half.iter().zip(&disc.direction) {
            projection[(j, k)] = v;
        }
        metadata.insert(format!("fisher_ratio_{}", k + 1), disc.fisher_ratio);
        metadata.insert(format!("half_{}_width", k + 1), half.len() as f64);
        if disc.fisher_ratio < FISHER_WEAK_THRESHOLD {
            flags.push(format!("weak_half_{}", k + 1));
        }
    }
    Ok(Reducer {
        method: ReductionMethod::LdaSplit,
        mean: column_means(train.features()),
        projection,
        metadata,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halves() {
        assert_eq!(feature_halves(5), (vec![0, 1, 2], vec![3, 4]));
        assert_eq!(feature_halves(2), (vec![0], vec![1]));
        assert_eq!(feature_halves(23).0.len(), 12);
    }

    #[test]
    fn identical_means_rejected() {
        let f = Matrix::from_rows(&[vec![1.0, 0.0], vec![-1.0, 0.0], vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        let t = DataTable::unnamed(f, vec![0, 0, 1, 1]).unwrap();
        assert!(matches!(fit_lda(&t), Err(ReduceError::DegenerateClasses { .. })));
    }

    #[test]
    fn singular_scatter_survives_ridge() {
        // second column constant: S_W is singular without the ridge
        let f = Matrix::from_rows(&[vec![0.0, 2.0], vec![0.5, 2.0], vec![2.0, 2.0], vec![2.5, 2.0]]).unwrap();
        let t = DataTable::unnamed(f, vec![0, 0, 1, 1]).unwrap();
        let r = fit_lda(&t).unwrap();
        let w = r.projection.column(0);
        assert!((w[0] - 1.0).abs() < 1e-9 && w[1].abs() < 1e-9);
    }

    #[test]
    fn one_class_rejected() {
        let t = DataTable::unnamed(Matrix::identity(2), vec![1, 1]).unwrap();
        assert!(matches!(fit_lda_split(&t), Err(ReduceError::MissingClass(0))));
        let narrow = DataTable::unnamed(Matrix::new(2, 1, vec![0.0, 1.0]).unwrap(), vec![0, 1]).unwrap();
        assert!(matches!(fit_lda_split(&narrow), Err(ReduceError::TooFewFeatures { .. })));
    }
}
