//! Statevector simulation of parameterized Ry/Rz/CNOT circuits.
//!
//! Qubit 0 is the most significant bit of the amplitude index, matching the
//! leftmost Kronecker factor and the leftmost character of a Pauli label.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{DiscreteOperator, C64};

pub const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0).expect("index 0 is always valid")
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps amplitudes of length 2^n, rescaling to unit norm.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amps.len())?;
        let norm = norm(&amps);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("state has zero or non-finite norm".into()));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    fn apply_single(&mut self, q: usize, m: [[C64; 2]; 2]) {
        let stride = 1usize << (self.n_qubits - 1 - q);
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for i in base..base + stride {
                let a0 = self.amps[i];
                let a1 = self.amps[i + stride];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
            base += 2 * stride;
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let cbit = 1usize << (self.n_qubits - 1 - control);
        let tbit = 1usize << (self.n_qubits - 1 - target);
        for i in 0..self.amps.len() {
            if i & cbit != 0 && i & tbit == 0 {
                self.amps.swap(i, i | tbit);
            }
        }
    }
}

fn norm(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rotation {
    Ry,
    Rz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    Ry { qubit: usize, slot: usize },
    Rz { qubit: usize, slot: usize },
    Cnot { control: usize, target: usize },
    X { qubit: usize },
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Ry { qubit, slot } => write!(f, "RY q{qubit} p{slot}"),
            Gate::Rz { qubit, slot } => write!(f, "RZ q{qubit} p{slot}"),
            Gate::Cnot { control, target } => write!(f, "CNOT q{control} q{target}"),
            Gate::X { qubit } => write!(f, "X q{qubit}"),
        }
    }
}

pub fn ry_matrix(theta: f64) -> [[C64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ]
}

pub fn rz_matrix(theta: f64) -> [[C64; 2]; 2] {
    let zero = C64::new(0.0, 0.0);
    [
        [C64::from_polar(1.0, -theta / 2.0), zero],
        [zero, C64::from_polar(1.0, theta / 2.0)],
    ]
}

const PAULI_X: [[C64; 2]; 2] = [
    [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
            n_params: 0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::IndexOutOfRange {
                index: q,
                dim: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Appends a rotation with a fresh parameter slot and returns the slot.
    pub fn push_rotation(&mut self, rot: Rotation, qubit: usize) -> Result<usize> {
        self.check_qubit(qubit)?;
        let slot = self.n_params;
        self.n_params += 1;
        self.gates.push(match rot {
            Rotation::Ry => Gate::Ry { qubit, slot },
            Rotation::Rz => Gate::Rz { qubit, slot },
        });
        Ok(slot)
    }

    pub fn push_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::InvalidArgument("CNOT control equals target".into()));
        }
        self.gates.push(Gate::Cnot { control, target });
        Ok(())
    }

    pub fn push_x(&mut self, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        self.gates.push(Gate::X { qubit });
        Ok(())
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count()
    }

    /// One gate per line, e.g. `RY q0 p3` or `CNOT q0 q1`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Entanglement {
    #[default]
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub reps: usize,
    pub rotations: Vec<Rotation>,
    #[serde(default)]
    pub entanglement: Entanglement,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, reps: usize) -> Self {
        Self {
            n_qubits,
            reps,
            rotations: vec![Rotation::Ry, Rotation::Rz],
            entanglement: Entanglement::Full,
        }
    }
}

/// Hardware-efficient ansatz: `reps + 1` rotation layers (each rotation kind
/// applied to every qubit in turn) separated by full CNOT blocks.
pub fn efficient_su2_ansatz(spec: &AnsatzSpec) -> Result<Circuit> {
    if spec.reps < 1 {
        return Err(Error::InvalidArgument("ansatz reps must be at least 1".into()));
    }
    if spec.n_qubits < 1 {
        return Err(Error::InvalidArgument("ansatz needs at least one qubit".into()));
    }
    if spec.rotations.is_empty() {
        return Err(Error::InvalidArgument("ansatz needs at least one rotation".into()));
    }
    let n = spec.n_qubits;
    let mut c = Circuit::new(n);
    for layer in 0..=spec.reps {
        for &rot in &spec.rotations {
            for q in 0..n {
                c.push_rotation(rot, q)?;
            }
        }
        if layer < spec.reps {
            for i in 0..n {
                for j in i + 1..n {
                    c.push_cnot(i, j)?;
                }
            }
        }
    }
    Ok(c)
}

pub fn apply_circuit(c: &Circuit, params: &[f64], init: &StateVector) -> Result<StateVector> {
    if params.len() != c.n_params {
        return Err(Error::ParamCount {
            expected: c.n_params,
            got: params.len(),
        });
    }
    if init.n_qubits != c.n_qubits {
        return Err(Error::Shape {
            expected: 1 << c.n_qubits,
            got: init.dim(),
        });
    }
    let mut psi = init.clone();
    for g in &c.gates {
        match *g {
            Gate::Ry { qubit, slot } => psi.apply_single(qubit, ry_matrix(params[slot])),
            Gate::Rz { qubit, slot } => psi.apply_single(qubit, rz_matrix(params[slot])),
            Gate::Cnot { control, target } => psi.apply_cnot(control, target),
            Gate::X { qubit } => psi.apply_single(qubit, PAULI_X),
        }
    }
    Ok(psi)
}

/// Real part of ψ†Hψ.
pub fn expectation_dense(h: &DiscreteOperator, psi: &StateVector) -> Result<f64> {
    if h.dim() != psi.dim() {
        return Err(Error::Shape {
            expected: h.dim(),
            got: psi.dim(),
        });
    }
    Ok(h.quadratic_form(&psi.amps))
}
