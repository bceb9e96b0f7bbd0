//! Variational quantum classifier.
//!
//! Angle-encoded input followed by strongly entangling layers: a general
//! rotation on every qubit, then a CNOT ring whose range grows with the
//! layer index. The class score is `⟨Z⟩` on qubit 0 and label 1 is
//! predicted when it is positive.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::encoding::{FeatureMapKind, FeatureMapSpec};
use super::state::{Circuit, Gate};
use super::{QuantumError, Result};
use crate::classical::{Classifier, ModelError};
use crate::data::DataTable;
use crate::linalg::Matrix;

const SHIFT: f64 = PI / 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct VqcModel {
    pub n_qubits: usize,
    pub n_layers: usize,
    /// Flattened `layers × qubits × 3` rotation angles `(φ, θ, ω)`.
    pub weights: Vec<f64>,
    pub encoding: FeatureMapSpec,
    /// `false` drops the CNOT rings.
    pub entangling: bool,
}

impl VqcModel {
    pub fn new(n_qubits: usize, n_layers: usize, weights: Vec<f64>) -> Result<VqcModel> {
        if weights.len() != n_layers * n_qubits * 3 {
            return Err(QuantumError::DimensionMismatch { expected: n_layers * n_qubits * 3, got: weights.len() });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(QuantumError::InvalidParameter("weights must be finite".into()));
        }
        Ok(VqcModel { n_qubits, n_layers, weights, encoding: FeatureMapSpec::angle(n_qubits), entangling: true })
    }

    /// Weights drawn uniformly from `[0, 2π)`.
    pub fn random(n_qubits: usize, n_layers: usize, seed: u64) -> VqcModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = (0..n_layers * n_qubits * 3).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        VqcModel { n_qubits, n_layers, weights, encoding: FeatureMapSpec::angle(n_qubits), entangling: true }
    }

    pub fn weight(&self, layer: usize, qubit: usize, k: usize) -> f64 {
        self.weights[(layer * self.n_qubits + qubit) * 3 + k]
    }

    pub fn circuit(&self, x: &[f64]) -> Result<Circuit> {
        self.circuit_with(&self.weights, x)
    }

    fn circuit_with(&self, weights: &[f64], x: &[f64]) -> Result<Circuit> {
        if self.encoding.kind != FeatureMapKind::Angle {
            return Err(QuantumError::InvalidParameter("the classifier uses angle encoding".into()));
        }
        let mut circ = self.encoding.circuit(x)?;
        let n = self.n_qubits;
        for layer in 0..self.n_layers {
            for qubit in 0..n {
                let w = &weights[(layer * n + qubit) * 3..][..3];
                circ.push(Gate::Rot { qubit, phi: w[0], theta: w[1], omega: w[2] });
            }
            if self.entangling && n > 1 {
                let range = layer % (n - 1) + 1;
                for qubit in 0..n {
                    circ.push(Gate::Cnot { control: qubit, target: (qubit + range) % n });
                }
            }
        }
        Ok(circ)
    }

    fn forward_with(&self, weights: &[f64], x: &[f64]) -> Result<f64> {
        self.circuit_with(weights, x)?.run()?.expectation_z(0)
    }

    /// Parameter-shift derivative of `⟨Z₀⟩` with respect to every weight.
    pub fn expectation_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut w = self.weights.clone();
        let mut grad = Vec::with_capacity(w.len());
        for k in 0..w.len() {
            let orig = w[k];
            w[k] = orig + SHIFT;
            let plus = self.forward_with(&w, x)?;
            w[k] = orig - SHIFT;
            let minus = self.forward_with(&w, x)?;
            w[k] = orig;
            grad.push((plus - minus) / 2.0);
        }
        Ok(grad)
    }
}

/// `⟨Z₀⟩` after encoding `x` and running the variational layers.
pub fn vqc_forward(model: &VqcModel, x: &[f64]) -> Result<f64> {
    model.forward_with(&model.weights, x)
}

fn target(label: u8) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

fn check_batch(x: &Matrix, labels: &[u8]) -> Result<()> {
    if x.rows() == 0 {
        return Err(QuantumError::EmptyBatch);
    }
    if x.rows() != labels.len() {
        return Err(QuantumError::DimensionMismatch { expected: x.rows(), got: labels.len() });
    }
    Ok(())
}

/// Mean of `(⟨Z₀⟩ − t)²` over the batch, with `t = ±1`.
pub fn vqc_loss(model: &VqcModel, x: &Matrix, labels: &[u8]) -> Result<f64> {
    check_batch(x, labels)?;
    let rows: Vec<&[f64]> = x.row_iter().collect();
    let terms: Vec<f64> = rows
        .par_iter()
        .zip(labels.par_iter())
        .map(|(r, &l)| vqc_forward(model, r).map(|f| (f - target(l)).powi(2)))
        .collect::<Result<_>>()?;
    Ok(terms.iter().sum::<f64>() / x.rows() as f64)
}

/// Gradient of [`vqc_loss`] by the parameter-shift rule. Per-sample terms
/// are summed in row order.
pub fn vqc_gradient(model: &VqcModel, x: &Matrix, labels: &[u8]) -> Result<Vec<f64>> {
    check_batch(x, labels)?;
    let rows: Vec<&[f64]> = x.row_iter().collect();
    let per_sample: Vec<Vec<f64>> = rows
        .par_iter()
        .zip(labels.par_iter())
        .map(|(r, &l)| {
            let f = vqc_forward(model, r)?;
            let scale = 2.0 * (f - target(l));
            Ok(model.expectation_gradient(r)?.into_iter().map(|g| scale * g).collect())
        })
        .collect::<Result<_>>()?;
    let n = x.rows() as f64;
    let mut grad = vec![0.0; model.weights.len()];
    for g in &per_sample {
        grad.iter_mut().zip(g).for_each(|(a, b)| *a += b);
    }
    grad.iter_mut().for_each(|v| *v /= n);
    Ok(grad)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqcParams {
    pub n_layers: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Halve the step until the loss does not increase; a step that cannot
    /// be made non-increasing is skipped.
    pub lr_halving: bool,
    pub entangling: bool,
}

impl Default for VqcParams {
    fn default() -> Self {
        Self { n_layers: 4, epochs: 100, learning_rate: 0.5, seed: 0, lr_halving: true, entangling: true }
    }
}

#[derive(Debug, Clone)]
pub struct VqcTraining {
    /// Weights with the lowest training loss seen.
    pub model: VqcModel,
    /// Training loss before the first epoch and after each epoch.
    pub loss_trace: Vec<f64>,
    pub best_loss: f64,
}

const MAX_HALVINGS: usize = 20;

/// Full-batch gradient descent on the square loss.
pub fn train_vqc(train: &DataTable, params: &VqcParams) -> Result<VqcTraining> {
    train.require_both_classes()?;
    let x = train.features();
    let y = train.labels();
    let n_qubits = x.cols();
    let mut model = VqcModel::random(n_qubits, params.n_layers, params.seed);
    model.entangling = params.entangling;
    let finite = |loss: f64, epoch: usize| {
        if loss.is_finite() {
            Ok(loss)
        } else {
            Err(QuantumError::NonFiniteLoss { epoch })
        }
    };
    let mut loss = finite(vqc_loss(&model, x, y)?, 0)?;
    let mut best = (loss, model.weights.clone());
    let mut trace = vec![loss];
    let mut lr = params.learning_rate;
    for epoch in 1..=params.epochs {
        let grad = vqc_gradient(&model, x, y)?;
        let mut trial = model.clone();
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            trial.weights = model.weights.iter().zip(&grad).map(|(w, g)| w - lr * g).collect();
            let trial_loss = vqc_loss(&trial, x, y)?;
            if !params.lr_halving {
                loss = finite(trial_loss, epoch)?;
                accepted = true;
                break;
            }
            if trial_loss.is_finite() && trial_loss <= loss {
                loss = trial_loss;
                accepted = true;
                break;
            }
            lr /= 2.0;
        }
        if accepted {
            model.weights = trial.weights;
        }
        trace.push(loss);
        if loss < best.0 {
            best = (loss, model.weights.clone());
        }
    }
    model.weights = best.1;
    Ok(VqcTraining { model, loss_trace: trace, best_loss: best.0 })
}

impl Classifier for VqcModel {
    fn n_features(&self) -> usize {
        self.n_qubits
    }

    fn predict_row(&self, x: &[f64]) -> crate::classical::Result<u8> {
        if x.len() != self.n_qubits {
            return Err(ModelError::DimensionMismatch { expected: self.n_qubits, got: x.len() });
        }
        let f = vqc_forward(self, x).map_err(|e| ModelError::InvalidParameter(e.to_string()))?;
        Ok(u8::from(f > 0.0))
    }

    fn predict(&self, x: &Matrix) -> crate::classical::Result<Vec<u8>> {
        if x.cols() != self.n_qubits {
            return Err(ModelError::DimensionMismatch { expected: self.n_qubits, got: x.cols() });
        }
        let rows: Vec<&[f64]> = x.row_iter().collect();
        rows.par_iter().map(|r| self.predict_row(r)).collect()
    }
}
