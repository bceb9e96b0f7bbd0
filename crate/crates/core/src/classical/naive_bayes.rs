use super::{check_dim, require_both_classes, Classifier, Result};
use crate::data::DataTable;

/// Per-class feature variances are floored at this value.
pub const VARIANCE_FLOOR: f64 = 1e-9;

/// Gaussian naive Bayes: independent per-feature normal likelihoods
/// weighted by empirical class priors.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNbModel {
    pub priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
}

pub fn train_nb(train: &DataTable) -> Result<GaussianNbModel> {
    require_both_classes(train.labels())?;
    let d = train.n_features();
    let mut counts = [0usize; 2];
    let mut sums = [vec![0.0; d], vec![0.0; d]];
    for (row, &l) in train.features().row_iter().zip(train.labels()) {
        let c = usize::from(l);
        counts[c] += 1;
        sums[c].iter_mut().zip(row).for_each(|(s, v)| *s += v);
    }
    let means: [Vec<f64>; 2] =
        std::array::from_fn(|c| sums[c].iter().map(|s| s / counts[c] as f64).collect());
    let mut sq = [vec![0.0; d], vec![0.0; d]];
    for (row, &l) in train.features().row_iter().zip(train.labels()) {
        let c = usize::from(l);
        for ((s, v), m) in sq[c].iter_mut().zip(row).zip(&means[c]) {
            *s += (v - m) * (v - m);
        }
    }
    let variances = std::array::from_fn(|c| sq[c].iter().map(|s| (s / counts[c] as f64).max(VARIANCE_FLOOR)).collect());
    let n = train.n_samples() as f64;
    Ok(GaussianNbModel { priors: [counts[0] as f64 / n, counts[1] as f64 / n], means, variances })
}

impl GaussianNbModel {
    /// Unnormalized log posterior `log P(c) + Σ log N(x_j; μ_cj, σ²_cj)`.
    pub fn log_joint(&self, x: &[f64]) -> Result<[f64; 2]> {
        check_dim(self.means[0].len(), x)?;
        Ok(std::array::from_fn(|c| {
            let ll: f64 = x
                .iter()
                .zip(&self.means[c])
                .zip(&self.variances[c])
                .map(|((v, m), s2)| -0.5 * ((2.0 * std::f64::consts::PI * s2).ln() + (v - m) * (v - m) / s2))
                .sum();
            self.priors[c].ln() + ll
        }))
    }

    /// `P(class = 1 | x)`.
    pub fn posterior(&self, x: &[f64]) -> Result<f64> {
        let [l0, l1] = self.log_joint(x)?;
        let m = l0.max(l1);
        let (e0, e1) = ((l0 - m).exp(), (l1 - m).exp());
        Ok(e1 / (e0 + e1))
    }
}

impl Classifier for GaussianNbModel {
    fn n_features(&self) -> usize {
        self.means[0].len()
    }

    fn predict_row(&self, x: &[f64]) -> Result<u8> {
        let [l0, l1] = self.log_joint(x)?;
        Ok(u8::from(l1 > l0))
    }
}
