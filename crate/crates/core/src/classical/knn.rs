use rayon::prelude::*;

use super::{check_dim, Classifier, ModelError, Result};
use crate::data::DataTable;
use crate::linalg::Matrix;

/// Brute-force Euclidean k-nearest-neighbour majority vote.
///
/// Distance ties are ordered by training index; vote ties go to class 0.
#[derive(Debug, Clone)]
pub struct KnnModel {
    train: Matrix,
    labels: Vec<u8>,
    pub k: usize,
}

pub fn train_knn(train: &DataTable, k: usize) -> Result<KnnModel> {
    let n = train.n_samples();
    if n == 0 {
        return Err(ModelError::Empty);
    }
    if k == 0 || k > n {
        return Err(ModelError::InvalidK { k, n });
    }
    Ok(KnnModel { train: train.features().clone(), labels: train.labels().to_vec(), k })
}

impl KnnModel {
    /// Indices of the k nearest training rows, nearest first.
    pub fn neighbours(&self, x: &[f64]) -> Result<Vec<usize>> {
        check_dim(self.train.cols(), x)?;
        let mut d: Vec<(f64, usize)> = self
            .train
            .row_iter()
            .enumerate()
            .map(|(i, row)| (row.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        let k = self.k;
        let by_dist = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < d.len() {
            d.select_nth_unstable_by(k - 1, by_dist);
            d.truncate(k);
        }
        d.sort_by(by_dist);
        Ok(d.into_iter().map(|(_, i)| i).collect())
    }
}

impl Classifier for KnnModel {
    fn n_features(&self) -> usize {
        self.train.cols()
    }

    fn predict_row(&self, x: &[f64]) -> Result<u8> {
        let ones = self.neighbours(x)?.iter().filter(|&&i| self.labels[i] == 1).count();
        Ok(u8::from(2 * ones > self.k))
    }

    fn predict(&self, x: &Matrix) -> Result<Vec<u8>> {
        if x.cols() != self.n_features() {
            return Err(ModelError::DimensionMismatch { expected: self.n_features(), got: x.cols() });
        }
        let rows: Vec<&[f64]> = x.row_iter().collect();
        rows.par_iter().map(|r| self.predict_row(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> DataTable {
        let f = Matrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![5.0, 5.0], vec![6.0, 5.0], vec![5.0, 6.0]])
            .unwrap();
        DataTable::unnamed(f, vec![0, 0, 1, 1, 1]).unwrap()
    }

    #[test]
    fn exact_match_with_k1() {
        let m = train_knn(&table(), 1).unwrap();
        assert_eq!(m.predict_row(&[1.0, 0.0]).unwrap(), 0);
        assert_eq!(m.predict_row(&[6.0, 5.0]).unwrap(), 1);
    }

    #[test]
    fn global_vote() {
        let m = train_knn(&table(), 5).unwrap();
        assert_eq!(m.predict_row(&[0.0, 0.0]).unwrap(), 1);
    }

    #[test]
    fn vote_tie_goes_to_zero() {
        let f = Matrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let m = train_knn(&DataTable::unnamed(f, vec![1, 0]).unwrap(), 2).unwrap();
        assert_eq!(m.predict_row(&[0.5]).unwrap(), 0);
    }

    #[test]
    fn distance_ties_by_index() {
        let f = Matrix::from_rows(&[vec![-1.0], vec![1.0], vec![3.0]]).unwrap();
        let m = train_knn(&DataTable::unnamed(f, vec![1, 0, 0]).unwrap(), 1).unwrap();
        assert_eq!(m.neighbours(&[0.0]).unwrap(), vec![0]);
    }

    #[test]
    fn invalid_k() {
        assert!(matches!(train_knn(&table(), 0), Err(ModelError::InvalidK { .. })));
        assert!(matches!(train_knn(&table(), 6), Err(ModelError::InvalidK { .. })));
    }
}
