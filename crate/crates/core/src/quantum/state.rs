//! Dense statevector simulation.
//!
//! Basis states are indexed with qubit 0 as the most significant bit, so
//! `|q0 q1 … q(n-1)⟩` reads left to right. `|10⟩` on two qubits is index 2.

use std::fmt;

use num_complex::Complex64;

use super::{QuantumError, Result};

/// Registers larger than this are refused.
pub const MAX_QUBITS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Rx { qubit: usize, theta: f64 },
    Ry { qubit: usize, theta: f64 },
    Rz { qubit: usize, theta: f64 },
    H { qubit: usize },
    Cnot { control: usize, target: usize },
    Cz { control: usize, target: usize },
    Phase { qubit: usize, phi: f64 },
    /// `RZ(omega) · RY(theta) · RZ(phi)`.
    Rot { qubit: usize, phi: f64, theta: f64, omega: f64 },
}

type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn rz(theta: f64) -> Mat2 {
    let zero = c(0.0, 0.0);
    [[Complex64::from_polar(1.0, -theta / 2.0), zero], [zero, Complex64::from_polar(1.0, theta / 2.0)]]
}

fn ry(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rx { qubit, .. }
            | Gate::Ry { qubit, .. }
            | Gate::Rz { qubit, .. }
            | Gate::H { qubit }
            | Gate::Phase { qubit, .. }
            | Gate::Rot { qubit, .. } => vec![qubit],
            Gate::Cnot { control, target } | Gate::Cz { control, target } => vec![control, target],
        }
    }

    fn single_qubit(&self) -> Option<(usize, Mat2)> {
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        Some(match *self {
            Gate::Rx { qubit, theta } => {
                let (s, co) = (theta / 2.0).sin_cos();
                (qubit, [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]])
            }
            Gate::Ry { qubit, theta } => (qubit, ry(theta)),
            Gate::Rz { qubit, theta } => (qubit, rz(theta)),
            Gate::H { qubit } => {
                let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                (qubit, [[h, h], [h, -h]])
            }
            Gate::Phase { qubit, phi } => (qubit, [[one, zero], [zero, Complex64::from_polar(1.0, phi)]]),
            Gate::Rot { qubit, phi, theta, omega } => (qubit, mul2(&rz(omega), &mul2(&ry(theta), &rz(phi)))),
            Gate::Cnot { .. } | Gate::Cz { .. } => return None,
        })
    }

    /// Unitary on the gate's own qubits: 2×2, or 4×4 in the
    /// `|control target⟩` basis.
    pub fn matrix(&self) -> Vec<Vec<Complex64>> {
        if let Some((_, m)) = self.single_qubit() {
            return m.iter().map(|r| r.to_vec()).collect();
        }
        let mut m = vec![vec![c(0.0, 0.0); 4]; 4];
        match self {
            Gate::Cnot { .. } => {
                m[0][0] = c(1.0, 0.0);
                m[1][1] = c(1.0, 0.0);
                m[2][3] = c(1.0, 0.0);
                m[3][2] = c(1.0, 0.0);
            }
            _ => {
                for (i, row) in m.iter_mut().enumerate() {
                    row[i] = c(if i == 3 { -1.0 } else { 1.0 }, 0.0);
                }
            }
        }
        m
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Rx { qubit, theta } => write!(f, "RX q{qubit} {theta:.12}"),
            Gate::Ry { qubit, theta } => write!(f, "RY q{qubit} {theta:.12}"),
            Gate::Rz { qubit, theta } => write!(f, "RZ q{qubit} {theta:.12}"),
            Gate::H { qubit } => write!(f, "H q{qubit}"),
            Gate::Cnot { control, target } => write!(f, "CNOT q{control} q{target}"),
            Gate::Cz { control, target } => write!(f, "CZ q{control} q{target}"),
            Gate::Phase { qubit, phi } => write!(f, "P q{qubit} {phi:.12}"),
            Gate::Rot { qubit, phi, theta, omega } => write!(f, "ROT q{qubit} {phi:.12} {theta:.12} {omega:.12}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<StateVector> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(QuantumError::UnsupportedQubitCount(n_qubits));
        }
        let mut amplitudes = vec![c(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = c(1.0, 0.0);
        Ok(StateVector { n_qubits, amplitudes })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<StateVector> {
        let n = amplitudes.len();
        if n < 2 || !n.is_power_of_two() || n.trailing_zeros() as usize > MAX_QUBITS {
            return Err(QuantumError::DimensionMismatch { expected: 2, got: n });
        }
        Ok(StateVector { n_qubits: n.trailing_zeros() as usize, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(QuantumError::DimensionMismatch { expected: self.n_qubits, got: other.n_qubits });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    /// `⟨Z⟩` on one qubit.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let m = self.mask(qubit);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(b, a)| if b & m == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(QuantumError::QubitOutOfRange { qubit: q, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        for q in gate.qubits() {
            self.check_qubit(q)?;
        }
        if let Some((q, u)) = gate.single_qubit() {
            let m = self.mask(q);
            for b in 0..self.amplitudes.len() {
                if b & m == 0 {
                    let (a0, a1) = (self.amplitudes[b], self.amplitudes[b | m]);
                    self.amplitudes[b] = u[0][0] * a0 + u[0][1] * a1;
                    self.amplitudes[b | m] = u[1][0] * a0 + u[1][1] * a1;
                }
            }
            return Ok(());
        }
        match *gate {
            Gate::Cnot { control, target } | Gate::Cz { control, target } if control == target => {
                Err(QuantumError::SameQubit(control))
            }
            Gate::Cnot { control, target } => {
                let (cm, tm) = (self.mask(control), self.mask(target));
                for b in 0..self.amplitudes.len() {
                    if b & cm != 0 && b & tm == 0 {
                        self.amplitudes.swap(b, b | tm);
                    }
                }
                Ok(())
            }
            Gate::Cz { control, target } => {
                let both = self.mask(control) | self.mask(target);
                for (b, a) in self.amplitudes.iter_mut().enumerate() {
                    if b & both == both {
                        *a = -*a;
                    }
                }
                Ok(())
            }
            _ => unreachable!("single-qubit gates handled above"),
        }
    }
}

/// Returns `gate · state`, leaving `state` untouched.
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

/// A gate sequence on a fixed register, starting from `|0…0⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Circuit {
        Circuit { n_qubits, gates: Vec::new() }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn run(&self) -> Result<StateVector> {
        let mut s = StateVector::zero(self.n_qubits)?;
        for g in &self.gates {
            s.apply(g)?;
        }
        Ok(s)
    }

    /// One gate per line, preceded by a `qubits = n` header.
    pub fn trace(&self) -> String {
        let mut out = format!("qubits = {}\n", self.n_qubits);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}
