use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::state::{Circuit, Gate, StateVector};
use super::{QuantumError, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureMapKind {
    /// One rotation per qubit, giving a product state.
    Angle,
    /// Hadamard layer, single-qubit phases and pairwise ZZ phases, repeated.
    Zz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RotationAxis {
    X,
    #[default]
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FeatureMapSpec {
    pub kind: FeatureMapKind,
    pub n_qubits: usize,
    /// Layer repetitions for the ZZ map. The angle map is a single layer.
    pub reps: usize,
    pub rotation_axis: RotationAxis,
}

impl FeatureMapSpec {
    pub fn angle(n_qubits: usize) -> FeatureMapSpec {
        FeatureMapSpec { kind: FeatureMapKind::Angle, n_qubits, reps: 1, rotation_axis: RotationAxis::Y }
    }

    pub fn zz(n_qubits: usize, reps: usize) -> FeatureMapSpec {
        FeatureMapSpec { kind: FeatureMapKind::Zz, n_qubits, reps, rotation_axis: RotationAxis::Y }
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_qubits {
            return Err(QuantumError::DimensionMismatch { expected: self.n_qubits, got: x.len() });
        }
        if self.kind == FeatureMapKind::Zz && self.reps == 0 {
            return Err(QuantumError::InvalidParameter("ZZ feature map needs reps >= 1".into()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(QuantumError::InvalidParameter("non-finite feature value".into()));
        }
        Ok(())
    }

    /// Gate list preparing `|φ(x)⟩` from `|0…0⟩`.
    pub fn circuit(&self, x: &[f64]) -> Result<Circuit> {
        self.check(x)?;
        let mut circ = Circuit::new(self.n_qubits);
        match self.kind {
            FeatureMapKind::Angle => {
                for (qubit, &theta) in x.iter().enumerate() {
                    circ.push(match self.rotation_axis {
                        RotationAxis::X => Gate::Rx { qubit, theta },
                        RotationAxis::Y => Gate::Ry { qubit, theta },
                        RotationAxis::Z => Gate::Rz { qubit, theta },
                    });
                }
            }
            FeatureMapKind::Zz => {
                for _ in 0..self.reps {
                    for qubit in 0..self.n_qubits {
                        circ.push(Gate::H { qubit });
                    }
                    for (qubit, &v) in x.iter().enumerate() {
                        circ.push(Gate::Phase { qubit, phi: 2.0 * v });
                    }
                    for i in 0..self.n_qubits {
                        for j in i + 1..self.n_qubits {
                            circ.push(Gate::Cnot { control: i, target: j });
                            circ.push(Gate::Phase { qubit: j, phi: 2.0 * (PI - x[i]) * (PI - x[j]) });
                            circ.push(Gate::Cnot { control: i, target: j });
                        }
                    }
                }
            }
        }
        Ok(circ)
    }

    pub fn encode(&self, x: &[f64]) -> Result<StateVector> {
        self.circuit(x)?.run()
    }
}

impl fmt::Display for FeatureMapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureMapKind::Angle => "angle",
            FeatureMapKind::Zz => "zz",
        })
    }
}

impl FromStr for FeatureMapKind {
    type Err = QuantumError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "angle" => Ok(FeatureMapKind::Angle),
            "zz" => Ok(FeatureMapKind::Zz),
            other => Err(QuantumError::InvalidParameter(format!("unknown feature map `{other}`"))),
        }
    }
}

/// `⊗ᵢ R(xᵢ)|0ⁿ⟩` with the spec's rotation axis.
pub fn encode_angle(x: &[f64], spec: &FeatureMapSpec) -> Result<StateVector> {
    FeatureMapSpec { kind: FeatureMapKind::Angle, ..*spec }.encode(x)
}

pub fn encode_zz(x: &[f64], spec: &FeatureMapSpec) -> Result<StateVector> {
    FeatureMapSpec { kind: FeatureMapKind::Zz, ..*spec }.encode(x)
}

/// Per-column min-max map onto `[0, π]` fitted on training features.
/// Values outside the training range are clipped; constant columns map to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleScaler {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl AngleScaler {
    pub fn fit(x: &Matrix) -> AngleScaler {
        let mut mins = vec![f64::INFINITY; x.cols()];
        let mut maxs = vec![f64::NEG_INFINITY; x.cols()];
        for row in x.row_iter() {
            for (j, &v) in row.iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        AngleScaler { mins, maxs }
    }

    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.mins.len() {
            return Err(QuantumError::DimensionMismatch { expected: self.mins.len(), got: row.len() });
        }
        Ok(row
            .iter()
            .zip(self.mins.iter().zip(&self.maxs))
            .map(|(&v, (&lo, &hi))| if hi > lo { PI * ((v.clamp(lo, hi) - lo) / (hi - lo)) } else { 0.0 })
            .collect())
    }

    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        let rows = x.row_iter().map(|r| self.transform_row(r)).collect::<Result<Vec<_>>>()?;
        if rows.is_empty() {
            return Ok(Matrix::zeros(0, x.cols()));
        }
        Ok(Matrix::from_rows(&rows)?)
    }
}
