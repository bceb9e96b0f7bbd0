use rayon::prelude::*;

use super::encoding::FeatureMapSpec;
use super::state::StateVector;
use super::{QuantumError, Result};
use crate::classical::{train_svm_precomputed, Classifier, ModelError, SvmModel};
use crate::data::DataTable;
use crate::linalg::Matrix;

fn encode_rows(x: &Matrix, spec: &FeatureMapSpec) -> Result<Vec<StateVector>> {
    if x.cols() != spec.n_qubits {
        return Err(QuantumError::DimensionMismatch { expected: spec.n_qubits, got: x.cols() });
    }
    let rows: Vec<&[f64]> = x.row_iter().collect();
    rows.par_iter().map(|r| spec.encode(r)).collect()
}

fn fidelity_matrix(a: &[StateVector], b: &[StateVector]) -> Result<Matrix> {
    let cols = b.len();
    let data: Vec<f64> = a
        .par_iter()
        .flat_map_iter(|sa| b.iter().map(move |sb| sa.fidelity(sb).expect("states share a register")))
        .collect();
    Ok(Matrix::new(a.len(), cols, data)?)
}

/// `K[i][j] = |⟨φ(aᵢ)|φ(bⱼ)⟩|²`.
pub fn quantum_kernel(xs_a: &Matrix, xs_b: &Matrix, spec: &FeatureMapSpec) -> Result<Matrix> {
    let a = encode_rows(xs_a, spec)?;
    let b = encode_rows(xs_b, spec)?;
    fidelity_matrix(&a, &b)
}

/// Gram matrix of `x` with itself.
pub fn training_gram(x: &Matrix, spec: &FeatureMapSpec) -> Result<Matrix> {
    let states = encode_rows(x, spec)?;
    fidelity_matrix(&states, &states)
}

/// SVM trained on a fidelity Gram matrix.
#[derive(Debug, Clone)]
pub struct QsvcModel {
    pub spec: FeatureMapSpec,
    pub svm: SvmModel,
    /// Feature rows of the support vectors, aligned with `svm.dual_coef`.
    pub support_features: Vec<Vec<f64>>,
    support_states: Vec<StateVector>,
}

pub fn train_qsvc(train: &DataTable, spec: &FeatureMapSpec, c: f64) -> Result<QsvcModel> {
    let x = train.features();
    let states = encode_rows(x, spec)?;
    let gram = fidelity_matrix(&states, &states)?;
    let svm = train_svm_precomputed(&gram, train.labels(), c)?;
    let support_features = svm.support_indices.iter().map(|&i| x.row(i).to_vec()).collect();
    let support_states = svm.support_indices.iter().map(|&i| states[i].clone()).collect();
    Ok(QsvcModel { spec: *spec, svm, support_features, support_states })
}

impl QsvcModel {
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        let s = self.spec.encode(x)?;
        let mut acc = self.svm.bias;
        for (sv, coef) in self.support_states.iter().zip(&self.svm.dual_coef) {
            acc += coef * sv.fidelity(&s)?;
        }
        Ok(acc)
    }
}

impl Classifier for QsvcModel {
    fn n_features(&self) -> usize {
        self.spec.n_qubits
    }

    fn predict_row(&self, x: &[f64]) -> crate::classical::Result<u8> {
        if x.len() != self.spec.n_qubits {
            return Err(ModelError::DimensionMismatch { expected: self.spec.n_qubits, got: x.len() });
        }
        Ok(u8::from(self.decision(x).map_err(|e| ModelError::InvalidParameter(e.to_string()))? > 0.0))
    }

    fn predict(&self, x: &Matrix) -> crate::classical::Result<Vec<u8>> {
        if x.cols() != self.n_features() {
            return Err(ModelError::DimensionMismatch { expected: self.n_features(), got: x.cols() });
        }
        let rows: Vec<&[f64]> = x.row_iter().collect();
        rows.par_iter().map(|r| self.predict_row(r)).collect()
    }
}
