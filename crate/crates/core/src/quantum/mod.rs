//! Exact statevector simulation, data encodings, the fidelity kernel and
//! the two quantum classifiers.

mod encoding;
mod kernel;
mod state;
mod vqc;

use thiserror::Error;

use crate::classical::ModelError;
use crate::data::DataError;
use crate::linalg::LinalgError;

pub use encoding::{encode_angle, encode_zz, AngleScaler, FeatureMapKind, FeatureMapSpec, RotationAxis};
pub use kernel::{quantum_kernel, train_qsvc, training_gram, QsvcModel};
pub use state::{apply_gate, Circuit, Gate, StateVector, MAX_QUBITS};
pub use vqc::{train_vqc, vqc_forward, vqc_gradient, vqc_loss, VqcModel, VqcParams, VqcTraining};

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("control and target are both qubit {0}")]
    SameQubit(usize),
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported register size: {0} qubits")]
    UnsupportedQubitCount(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty batch")]
    EmptyBatch,
    #[error("training loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, QuantumError>;
