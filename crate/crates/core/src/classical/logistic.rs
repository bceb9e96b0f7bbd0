use super::{check_dim, require_both_classes, Classifier, ModelError, Result};
use crate::data::DataTable;
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticParams {
    pub max_iter: usize,
    pub learning_rate: f64,
    /// Gradient norm at which the run counts as converged.
    pub grad_tol: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self { max_iter: 1000, learning_rate: 0.1, grad_tol: 1e-5 }
    }
}

/// `P(y = 1 | x) = σ(β₀ + β·x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    /// β₀ followed by one coefficient per feature.
    pub coefficients: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub final_loss: f64,
    pub final_grad_norm: f64,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

// log(1 + e^z) without overflow
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn logit(beta: &[f64], x: &[f64]) -> f64 {
    beta[0] + beta[1..].iter().zip(x).map(|(b, v)| b * v).sum::<f64>()
}

/// Mean binary cross-entropy of coefficients `beta` on `(x, y)`.
pub fn log_loss(beta: &[f64], x: &Matrix, y: &[u8]) -> f64 {
    let n = x.rows() as f64;
    x.row_iter()
        .zip(y)
        .map(|(row, &l)| {
            let z = logit(beta, row);
            // -[y log σ(z) + (1-y) log(1-σ(z))]
            if l == 1 {
                softplus(-z)
            } else {
                softplus(z)
            }
        })
        .sum::<f64>()
        / n
}

fn gradient(beta: &[f64], x: &Matrix, y: &[u8]) -> Vec<f64> {
    let n = x.rows() as f64;
    let mut g = vec![0.0; beta.len()];
    for (row, &l) in x.row_iter().zip(y) {
        let r = sigmoid(logit(beta, row)) - f64::from(l);
        g[0] += r;
        g[1..].iter_mut().zip(row).for_each(|(gi, v)| *gi += r * v);
    }
    g.iter_mut().for_each(|gi| *gi /= n);
    g
}

/// Full-batch gradient descent on mean log-loss with step halving whenever
/// a step would increase the loss or make it non-finite.
pub fn train_logistic(train: &DataTable, params: &LogisticParams) -> Result<LogisticModel> {
    require_both_classes(train.labels())?;
    if train.n_samples() < 2 {
        return Err(ModelError::Empty);
    }
    let x = train.features();
    let y = train.labels();
    let mut beta = vec![0.0; x.cols() + 1];
    let mut loss = log_loss(&beta, x, y);
    let mut lr = params.learning_rate;
    let mut grad = gradient(&beta, x, y);
    let mut iterations = 0;
    let mut gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    while iterations < params.max_iter && gnorm >= params.grad_tol {
        iterations += 1;
        let mut halvings = 0;
        loop {
            let trial: Vec<f64> = beta.iter().zip(&grad).map(|(b, g)| b - lr * g).collect();
            let trial_loss = log_loss(&trial, x, y);
            if trial_loss.is_finite() && trial_loss <= loss {
                beta = trial;
                loss = trial_loss;
                break;
            }
            halvings += 1;
            lr *= 0.5;
            if halvings > 60 {
                if !trial_loss.is_finite() {
                    return Err(ModelError::NonFiniteLoss { iteration: iterations });
                }
                // cannot make progress at any step size: treat as stationary
                break;
            }
        }
        if halvings > 60 {
            break;
        }
        grad = gradient(&beta, x, y);
        gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    }
    Ok(LogisticModel {
        coefficients: beta,
        iterations,
        converged: gnorm < params.grad_tol,
        final_loss: loss,
        final_grad_norm: gnorm,
    })
}

impl LogisticModel {
    pub fn probability(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.coefficients.len() - 1, x)?;
        Ok(sigmoid(logit(&self.coefficients, x)))
    }
}

impl Classifier for LogisticModel {
    fn n_features(&self) -> usize {
        self.coefficients.len() - 1
    }

    fn predict_row(&self, x: &[f64]) -> Result<u8> {
        Ok(u8::from(self.probability(x)? >= 0.5))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(xs: &[f64], ys: &[u8]) -> DataTable {
        DataTable::unnamed(Matrix::new(xs.len(), 1, xs.to_vec()).unwrap(), ys.to_vec()).unwrap()
    }

    #[test]
    fn separable_1d() {
        let t = table(&[-2.0, -1.0, -0.5, 0.5, 1.0, 2.0], &[0, 0, 0, 1, 1, 1]);
        let m = train_logistic(&t, &LogisticParams::default()).unwrap();
        assert!(m.coefficients[1] > 0.0);
        assert_eq!(m.predict(t.features()).unwrap(), t.labels());
    }

    #[test]
    fn zero_logit_is_half() {
        let m = LogisticModel {
            coefficients: vec![0.0, 3.0],
            iterations: 0,
            converged: true,
            final_loss: 0.0,
            final_grad_norm: 0.0,
        };
        assert_eq!(m.probability(&[0.0]).unwrap(), 0.5);
        // P = 0.5 falls on the positive side of the threshold
        assert_eq!(m.predict_row(&[0.0]).unwrap(), 1);
    }

    #[test]
    fn rejects_single_class() {
        let t = table(&[1.0, 2.0], &[1, 1]);
        assert!(matches!(train_logistic(&t, &LogisticParams::default()), Err(ModelError::SingleClass { .. })));
    }

    #[test]
    fn converged_runs_are_stationary() {
        let xs = [-1.5, -1.0, -0.3, 0.2, 0.4, 0.9, 1.3, -0.1];
        let ys = [0, 0, 1, 0, 1, 1, 1, 0];
        let t = table(&xs, &ys);
        let params = LogisticParams { max_iter: 20_000, learning_rate: 0.5, ..Default::default() };
        let m = train_logistic(&t, &params).unwrap();
        assert!(m.converged);
        let g = gradient(&m.coefficients, t.features(), t.labels());
        assert!(g.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-4);
    }

    #[test]
    fn huge_features_do_not_blow_up() {
        let t = table(&[-1e6, -2e5, 3e5, 9e5], &[0, 1, 0, 1]);
        let m = train_logistic(&t, &LogisticParams::default()).unwrap();
        assert!(m.final_loss.is_finite());
    }
}
