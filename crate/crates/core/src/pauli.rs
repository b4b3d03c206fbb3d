//! Pauli-basis decomposition of Hermitian operators on `n` qubits.
//!
//! A label is stored as an `(x, z)` bit-mask pair with qubit 0 in the most
//! significant bit, so `Y` on a qubit sets both bits. Coefficients for all
//! labels sharing an `x` mask come from one Walsh-Hadamard transform of the
//! diagonal `H[k, k ^ x]`, giving O(4^n · n) work in total.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::circuit::{qubits_for_dim, StateVector};
use crate::error::{Error, Result};
use crate::format::g17;
use crate::operator::{DiscreteOperator, C64};

pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliLabel {
    n_qubits: usize,
    x: usize,
    z: usize,
}

impl PauliLabel {
    pub fn from_masks(n_qubits: usize, x: usize, z: usize) -> Self {
        Self { n_qubits, x, z }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> usize {
        self.x
    }

    pub fn z_mask(&self) -> usize {
        self.z
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn char_at(&self, qubit: usize) -> char {
        let bit = 1usize << (self.n_qubits - 1 - qubit);
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            write!(f, "{}", self.char_at(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.len();
        if n == 0 || n > usize::BITS as usize - 1 {
            return Err(Error::Parse(format!("bad Pauli label length in '{s}'")));
        }
        let (mut x, mut z) = (0usize, 0usize);
        for (q, c) in s.chars().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match c {
                'I' => {}
                'X' => x |= bit,
                'Y' => {
                    x |= bit;
                    z |= bit
                }
                'Z' => z |= bit,
                other => return Err(Error::Parse(format!("bad Pauli character '{other}'"))),
            }
        }
        Ok(Self { n_qubits: n, x, z })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coeff: f64,
    pub label: PauliLabel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
    zero_tol: f64,
}

/// i^k for k mod 4.
fn i_pow(k: u32) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

fn parity_sign(bits: usize) -> f64 {
    if bits.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn walsh_hadamard(v: &mut [C64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let a = v[i];
                let b = v[i + h];
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// All 4^n coefficients Tr(P·H)/2^n, complex, indexed `[x][z]`.
fn raw_coefficients(h: &DiscreteOperator) -> Result<(usize, Vec<Vec<C64>>)> {
    let dim = h.dim();
    let n = qubits_for_dim(dim)?;
    let m = h.matrix();
    let scale = 1.0 / dim as f64;
    let mut out = Vec::with_capacity(dim);
    let mut buf = vec![C64::new(0.0, 0.0); dim];
    for x in 0..dim {
        for (k, b) in buf.iter_mut().enumerate() {
            *b = m[(k, k ^ x)];
        }
        walsh_hadamard(&mut buf);
        let row = (0..dim).map(|z| i_pow((x & z).count_ones()) * buf[z] * scale).collect();
        out.push(row);
    }
    Ok((n, out))
}

/// Largest |Im Tr(P·H)|/2^n over all labels; zero for exactly Hermitian input.
pub fn max_imaginary_coefficient(h: &DiscreteOperator) -> Result<f64> {
    let (_, raw) = raw_coefficients(h)?;
    Ok(raw.iter().flatten().fold(0.0f64, |acc, c| acc.max(c.im.abs())))
}

pub fn decompose(h: &DiscreteOperator, zero_tol: f64) -> Result<PauliSum> {
    qubits_for_dim(h.dim())?;
    h.ensure_hermitian()?;
    let (n, raw) = raw_coefficients(h)?;
    let mut terms = Vec::new();
    for (x, row) in raw.iter().enumerate() {
        for (z, c) in row.iter().enumerate() {
            if c.re.abs() > zero_tol {
                terms.push(PauliTerm {
                    coeff: c.re,
                    label: PauliLabel::from_masks(n, x, z),
                });
            }
        }
    }
    terms.sort_by_cached_key(|t| t.label.to_string());
    Ok(PauliSum {
        n_qubits: n,
        terms,
        zero_tol,
    })
}

pub fn reconstruct(s: &PauliSum) -> DiscreteOperator {
    let dim = 1usize << s.n_qubits;
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for t in &s.terms {
        let phase = i_pow(t.label.y_count()) * t.coeff;
        for k in 0..dim {
            m[(k ^ t.label.x, k)] += phase * parity_sign(k & t.label.z);
        }
    }
    DiscreteOperator::from_matrix(m).expect("square by construction")
}

/// Σ c·⟨ψ|P|ψ⟩ evaluated term by term.
pub fn expectation(s: &PauliSum, psi: &StateVector) -> Result<f64> {
    if psi.n_qubits() != s.n_qubits {
        return Err(Error::Shape {
            expected: 1 << s.n_qubits,
            got: psi.dim(),
        });
    }
    let a = psi.amplitudes();
    let mut total = 0.0;
    for t in &s.terms {
        let mut acc = C64::new(0.0, 0.0);
        for (k, ak) in a.iter().enumerate() {
            acc += a[k ^ t.label.x].conj() * ak * parity_sign(k & t.label.z);
        }
        total += t.coeff * (i_pow(t.label.y_count()) * acc).re;
    }
    Ok(total)
}

impl PauliSum {
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>, zero_tol: f64) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for t in &terms {
            if t.label.n_qubits != n_qubits {
                return Err(Error::Shape {
                    expected: n_qubits,
                    got: t.label.n_qubits,
                });
            }
            if !seen.insert(t.label) {
                return Err(Error::InvalidArgument(format!("duplicate label {}", t.label)));
            }
        }
        let terms = terms.into_iter().filter(|t| t.coeff.abs() > zero_tol).collect();
        Ok(Self {
            n_qubits,
            terms,
            zero_tol,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    pub fn coeff(&self, label: &str) -> Option<f64> {
        let l: PauliLabel = label.parse().ok()?;
        self.terms.iter().find(|t| t.label == l).map(|t| t.coeff)
    }

    /// Σ c² · 2^n, equal to ‖H‖_F² for a complete decomposition.
    pub fn frobenius_norm_sq(&self) -> f64 {
        let dim = (1usize << self.n_qubits) as f64;
        self.terms.iter().map(|t| t.coeff * t.coeff).sum::<f64>() * dim
    }

    /// Splits into one operator per term, in term order.
    pub fn term_operators(&self) -> Vec<DiscreteOperator> {
        self.terms
            .iter()
            .map(|t| {
                reconstruct(&PauliSum {
                    n_qubits: self.n_qubits,
                    terms: vec![t.clone()],
                    zero_tol: 0.0,
                })
            })
            .collect()
    }

    /// One term per line, `coeff LABEL`, coefficients at 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&g17(t.coeff));
            out.push(' ');
            out.push_str(&t.label.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut n = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(c), Some(l), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse(format!("line {}: expected 'coeff LABEL'", lineno + 1)));
            };
            let coeff: f64 = c
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad coefficient '{c}'", lineno + 1)))?;
            let label: PauliLabel = l.parse()?;
            match n {
                None => n = Some(label.n_qubits),
                Some(k) if k != label.n_qubits => {
                    return Err(Error::Parse(format!("line {}: label length differs", lineno + 1)))
                }
                _ => {}
            }
            terms.push(PauliTerm { coeff, label });
        }
        let n = n.ok_or_else(|| Error::Parse("empty Pauli sum needs a qubit count".into()))?;
        Self::new(n, terms, 0.0)
    }
}
