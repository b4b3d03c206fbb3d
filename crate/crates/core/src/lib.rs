//! Truncated-Hilbert-space Hamiltonians for minisuperspace and inflationary
//! cosmology models, with Pauli decomposition, a statevector VQE, Trotterized
//! evolution and Wheeler-DeWitt special functions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod config;
pub mod eoh;
pub mod error;
pub mod format;
pub mod friedmann;
pub mod models;
pub mod operator;
pub mod optim;
pub mod pauli;
pub mod quad;
pub mod tunneling;
pub mod vqe;
pub mod wdw;

pub use circuit::{AnsatzSpec, Circuit, StateVector};
pub use error::{Error, Result};
pub use operator::{BasisKind, BosonRegister, DiscreteOperator, C64};
pub use pauli::{PauliSum, PauliTerm};
