//! Truncated position and momentum operators in the three discrete bases,
//! tensor-product lifting for multi-mode registers, and spectral calculus.
//!
//! All operators are dense complex matrices in double precision. Mode 0 of a
//! [`BosonRegister`] is the leftmost Kronecker factor.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance used when an operation requires a Hermitian input.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    /// Harmonic-oscillator (Gaussian) basis: sparse X and P.
    #[default]
    Oscillator,
    /// Position basis: diagonal X, dense P from the Sylvester transform.
    Position,
    /// Finite-difference basis: diagonal X, tridiagonal P².
    #[serde(rename = "fd")]
    FiniteDifference,
}

impl BasisKind {
    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Oscillator => "oscillator",
            BasisKind::Position => "position",
            BasisKind::FiniteDifference => "fd",
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "oscillator" | "osc" => Ok(BasisKind::Oscillator),
            "position" | "pos" => Ok(BasisKind::Position),
            "fd" | "finite-difference" | "finitedifference" => Ok(BasisKind::FiniteDifference),
            other => Err(Error::Parse(format!(
                "unknown basis '{other}' (expected oscillator|position|fd)"
            ))),
        }
    }
}

/// Dense complex operator on a truncated Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteOperator {
    m: DMatrix<C64>,
}

/// Eigen-decomposition of a Hermitian operator, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: DMatrix<C64>,
}

impl Spectrum {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k).iter().copied().collect()
    }
}

impl DiscreteOperator {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Shape {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        Ok(Self { m })
    }

    pub fn from_real(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        Self {
            m: DMatrix::from_fn(dim, dim, |i, j| C64::new(f(i, j), 0.0)),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = DVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0)));
        Self {
            m: DMatrix::from_diagonal(&d),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    /// max |A - A†| entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.m[(i, j)] - self.m[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Errors unless the operator is Hermitian to `HERMITIAN_TOL` scaled by its
    /// largest entry.
    pub fn ensure_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian { defect });
        }
        Ok(())
    }

    /// (A + A†)/2. Removes round-off asymmetry from products of Hermitian factors.
    pub fn hermitian_part(&self) -> Self {
        Self {
            m: (&self.m + self.m.adjoint()) * C64::new(0.5, 0.0),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.m
            .iter()
            .zip(other.m.iter())
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).norm()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            m: &self.m * C64::new(s, 0.0),
        }
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self { m: &self.m * s }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.dim());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// (AB + BA)/2.
    pub fn sym_product(&self, other: &Self) -> Self {
        (&(self * other) + &(other * self)).scale(0.5)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            m: self.m.kronecker(&other.m),
        }
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        debug_assert_eq!(v.len(), n);
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (j, vj) in v.iter().enumerate() {
                acc += self.m[(i, j)] * vj;
            }
            *o = acc;
        }
        out
    }

    /// Rayleigh quotient ⟨v|A|v⟩ (real part), without normalization.
    pub fn quadratic_form(&self, v: &[C64]) -> f64 {
        let av = self.apply(v);
        v.iter().zip(av.iter()).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Diagonal entries' real parts.
    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m[(i, i)].re).collect()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.m[(i, j)].norm() <= tol))
    }

    /// Hermitian eigen-decomposition, eigenvalues ascending.
    pub fn eigh(&self) -> Result<Spectrum> {
        self.ensure_hermitian()?;
        let herm = self.hermitian_part();
        if herm.is_diagonal(0.0) {
            let d = herm.real_diagonal();
            let mut order: Vec<usize> = (0..d.len()).collect();
            order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
            let n = d.len();
            let mut vectors = DMatrix::zeros(n, n);
            for (col, &row) in order.iter().enumerate() {
                vectors[(row, col)] = C64::new(1.0, 0.0);
            }
            return Ok(Spectrum {
                values: order.iter().map(|&k| d[k]).collect(),
                vectors,
            });
        }
        let eig = herm.m.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let n = order.len();
        let mut vectors = DMatrix::zeros(n, n);
        for (col, &k) in order.iter().enumerate() {
            vectors.set_column(col, &eig.eigenvectors.column(k));
        }
        Ok(Spectrum {
            values: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
            vectors,
        })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigh()?.values)
    }
}

impl Add for &DiscreteOperator {
    type Output = DiscreteOperator;
    fn add(self, rhs: Self) -> DiscreteOperator {
        DiscreteOperator { m: &self.m + &rhs.m }
    }
}

impl Sub for &DiscreteOperator {
    type Output = DiscreteOperator;
    fn sub(self, rhs: Self) -> DiscreteOperator {
        DiscreteOperator { m: &self.m - &rhs.m }
    }
}

impl Mul for &DiscreteOperator {
    type Output = DiscreteOperator;
    fn mul(self, rhs: Self) -> DiscreteOperator {
        DiscreteOperator { m: &self.m * &rhs.m }
    }
}

impl Neg for &DiscreteOperator {
    type Output = DiscreteOperator;
    fn neg(self) -> DiscreteOperator {
        DiscreteOperator { m: -&self.m }
    }
}

impl Add for DiscreteOperator {
    type Output = DiscreteOperator;
    fn add(self, rhs: Self) -> DiscreteOperator {
        DiscreteOperator { m: self.m + rhs.m }
    }
}

impl Sub for DiscreteOperator {
    type Output = DiscreteOperator;
    fn sub(self, rhs: Self) -> DiscreteOperator {
        DiscreteOperator { m: self.m - rhs.m }
    }
}

/// Ordered per-mode truncation dimensions of a multi-boson system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BosonRegister {
    modes: Vec<usize>,
}

impl BosonRegister {
    pub fn new(modes: Vec<usize>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidArgument("register needs at least one mode".into()));
        }
        if let Some(&bad) = modes.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidTruncation(bad));
        }
        Ok(Self { modes })
    }

    pub fn uniform(n_modes: usize, dim: usize) -> Result<Self> {
        Self::new(vec![dim; n_modes])
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn total_dim(&self) -> usize {
        self.modes.iter().product()
    }
}

fn check_truncation(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidTruncation(n))
    } else {
        Ok(())
    }
}

/// Grid point `j` (0-based) of the position or finite-difference basis.
pub fn grid_point(basis: BasisKind, n: usize, j: usize) -> f64 {
    let centered = 2.0 * (j as f64 + 1.0) - (n as f64 + 1.0);
    match basis {
        BasisKind::Position => (2.0 * PI / (4.0 * n as f64)).sqrt() * centered,
        BasisKind::FiniteDifference => (1.0 / (2.0 * n as f64)).sqrt() * centered,
        BasisKind::Oscillator => f64::NAN,
    }
}

/// Sample points of a diagonal-position basis.
pub fn grid(basis: BasisKind, n: usize) -> Vec<f64> {
    (0..n).map(|j| grid_point(basis, n, j)).collect()
}

fn ladder_offdiag(n: usize) -> impl Fn(usize, usize) -> f64 {
    move |i, j| {
        if j == i + 1 && j < n {
            (j as f64).sqrt()
        } else {
            0.0
        }
    }
}

/// Truncated annihilation operator a with a|k⟩ = √k |k−1⟩.
pub fn annihilation(n: usize) -> Result<DiscreteOperator> {
    check_truncation(n)?;
    let f = ladder_offdiag(n);
    Ok(DiscreteOperator::from_real(n, f))
}

/// Unitary Sylvester-type transform that maps X_pos to P_pos.
pub fn sylvester_transform(n: usize) -> Result<DiscreteOperator> {
    check_truncation(n)?;
    let nf = n as f64;
    let norm = 1.0 / nf.sqrt();
    let m = DMatrix::from_fn(n, n, |j, k| {
        let cj = 2.0 * (j as f64 + 1.0) - (nf + 1.0);
        let ck = 2.0 * (k as f64 + 1.0) - (nf + 1.0);
        C64::from_polar(norm, 2.0 * PI / (4.0 * nf) * cj * ck)
    });
    DiscreteOperator::from_matrix(m)
}

pub fn build_position(basis: BasisKind, n: usize) -> Result<DiscreteOperator> {
    check_truncation(n)?;
    match basis {
        BasisKind::Oscillator => {
            let a = annihilation(n)?;
            Ok((&a + &a.adjoint()).scale(std::f64::consts::FRAC_1_SQRT_2))
        }
        BasisKind::Position | BasisKind::FiniteDifference => Ok(DiscreteOperator::diagonal(&grid(basis, n))),
    }
}

pub fn build_momentum(basis: BasisKind, n: usize) -> Result<DiscreteOperator> {
    check_truncation(n)?;
    match basis {
        BasisKind::Oscillator => {
            let a = annihilation(n)?;
            let diff = &a.adjoint() - &a;
            Ok(diff.scale_complex(C64::new(0.0, std::f64::consts::FRAC_1_SQRT_2)))
        }
        BasisKind::Position => {
            let f = sylvester_transform(n)?;
            let x = build_position(basis, n)?;
            Ok((&(&f.adjoint() * &x) * &f).hermitian_part())
        }
        BasisKind::FiniteDifference => Err(Error::UnsupportedBasis {
            basis: "fd",
            what: "first-derivative momentum",
        }),
    }
}

pub fn build_momentum_squared(basis: BasisKind, n: usize) -> Result<DiscreteOperator> {
    check_truncation(n)?;
    match basis {
        BasisKind::FiniteDifference => {
            let half = n as f64 / 2.0;
            Ok(DiscreteOperator::from_real(n, |i, j| {
                if i == j {
                    2.0 * half
                } else if i.abs_diff(j) == 1 {
                    -half
                } else {
                    0.0
                }
            }))
        }
        _ => {
            let p = build_momentum(basis, n)?;
            Ok((&p * &p).hermitian_part())
        }
    }
}

/// I ⊗ … ⊗ op ⊗ … ⊗ I with `op` at `mode` (mode 0 leftmost).
pub fn lift_to_mode(op: &DiscreteOperator, mode: usize, reg: &BosonRegister) -> Result<DiscreteOperator> {
    let dims = reg.modes();
    if mode >= dims.len() {
        return Err(Error::IndexOutOfRange {
            index: mode,
            dim: dims.len(),
        });
    }
    if op.dim() != dims[mode] {
        return Err(Error::Shape {
            expected: dims[mode],
            got: op.dim(),
        });
    }
    let left: usize = dims[..mode].iter().product();
    let right: usize = dims[mode + 1..].iter().product();
    let mut out = op.clone();
    if left > 1 {
        out = DiscreteOperator::identity(left).kron(&out);
    }
    if right > 1 {
        out = out.kron(&DiscreteOperator::identity(right));
    }
    Ok(out)
}

/// f(A) = U f(D) U† for Hermitian A.
pub fn apply_scalar_function(op: &DiscreteOperator, f: impl Fn(f64) -> f64) -> Result<DiscreteOperator> {
    let spec = op.eigh()?;
    let values: Vec<f64> = spec.values.iter().map(|&x| f(x)).collect();
    Ok(reassemble(&spec.vectors, &values))
}

/// U diag(values) U†, Hermitian-projected.
pub(crate) fn reassemble(vectors: &DMatrix<C64>, values: &[f64]) -> DiscreteOperator {
    let n = values.len();
    let mut scaled = vectors.clone();
    for (k, &v) in values.iter().enumerate() {
        scaled.column_mut(k).scale_mut(v);
    }
    let m = scaled * vectors.adjoint();
    debug_assert_eq!(m.nrows(), n);
    DiscreteOperator { m }.hermitian_part()
}

/// f(A₀ ⊗ I, I ⊗ A₁, …) for per-mode Hermitian operators: the lifted operators
/// commute, so f is applied on their joint eigenbasis ⊗ₘ Uₘ.
pub fn apply_joint_function(mode_ops: &[DiscreteOperator], f: impl Fn(&[f64]) -> f64) -> Result<DiscreteOperator> {
    if mode_ops.is_empty() {
        return Err(Error::InvalidArgument("no mode operators".into()));
    }
    let spectra = mode_ops.iter().map(|op| op.eigh()).collect::<Result<Vec<_>>>()?;
    let dims: Vec<usize> = mode_ops.iter().map(|o| o.dim()).collect();
    let total: usize = dims.iter().product();

    let mut u = spectra[0].vectors.clone();
    for s in &spectra[1..] {
        u = u.kronecker(&s.vectors);
    }

    let mut args = vec![0.0; dims.len()];
    let values: Vec<f64> = (0..total)
        .map(|mut idx| {
            for m in (0..dims.len()).rev() {
                args[m] = spectra[m].values[idx % dims[m]];
                idx /= dims[m];
            }
            f(&args)
        })
        .collect();
    Ok(reassemble(&u, &values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn oscillator_position_n2() {
        let x = build_position(BasisKind::Oscillator, 2).unwrap();
        assert_abs_diff_eq!(x.get(0, 1).re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(x.get(1, 0).re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_eq!(x.get(0, 0), C64::new(0.0, 0.0));
    }

    #[test]
    fn position_basis_n2() {
        let x = build_position(BasisKind::Position, 2).unwrap();
        assert_abs_diff_eq!(x.get(0, 0).re, -0.88622693, epsilon = 1e-8);
        assert_abs_diff_eq!(x.get(1, 1).re, 0.88622693, epsilon = 1e-8);
    }

    #[test]
    fn fd_position_n4() {
        let x = build_position(BasisKind::FiniteDifference, 4).unwrap();
        let s = (1.0f64 / 8.0).sqrt();
        for (j, c) in [-3.0, -1.0, 1.0, 3.0].iter().enumerate() {
            assert_abs_diff_eq!(x.get(j, j).re, s * c, epsilon = 1e-15);
        }
    }

    #[test]
    fn oscillator_momentum_n2() {
        let p = build_momentum(BasisKind::Oscillator, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(p.get(0, 1).im, -s, epsilon = 1e-15);
        assert_abs_diff_eq!(p.get(1, 0).im, s, epsilon = 1e-15);
        assert_abs_diff_eq!(p.get(0, 1).re, 0.0);
    }

    #[test]
    fn fd_momentum_is_unsupported() {
        let err = build_momentum(BasisKind::FiniteDifference, 4).unwrap_err();
        assert!(matches!(err, Error::UnsupportedBasis { .. }));
        assert!(err.to_string().contains("build_momentum_squared"));
    }

    #[test]
    fn truncation_below_two_rejected() {
        for basis in [BasisKind::Oscillator, BasisKind::Position, BasisKind::FiniteDifference] {
            assert_eq!(build_position(basis, 1), Err(Error::InvalidTruncation(1)));
            assert_eq!(build_momentum_squared(basis, 0), Err(Error::InvalidTruncation(0)));
        }
    }

    #[test]
    fn fd_momentum_squared_n2() {
        let p2 = build_momentum_squared(BasisKind::FiniteDifference, 2).unwrap();
        let expect = [[2.0, -1.0], [-1.0, 2.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(p2.get(i, j).re, expect[i][j]);
            }
        }
    }

    #[test]
    fn fd_momentum_squared_gershgorin() {
        let p2 = build_momentum_squared(BasisKind::FiniteDifference, 4).unwrap();
        for e in p2.eigenvalues().unwrap() {
            assert!((-1e-12..=8.0 + 1e-12).contains(&e), "{e}");
        }
    }

    #[test]
    fn commutator_corner_law() {
        let n = 16;
        let x = build_position(BasisKind::Oscillator, n).unwrap();
        let p = build_momentum(BasisKind::Oscillator, n).unwrap();
        let c = x.commutator(&p);
        for i in 0..n {
            for j in 0..n {
                let expect = if i != j {
                    0.0
                } else if i == n - 1 {
                    1.0 - n as f64
                } else {
                    1.0
                };
                assert_abs_diff_eq!(c.get(i, j).re, 0.0, epsilon = 1e-13);
                assert_abs_diff_eq!(c.get(i, j).im, expect, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn truncated_oscillator_diagonal() {
        let n = 16;
        let x = build_position(BasisKind::Oscillator, n).unwrap();
        let p2 = build_momentum_squared(BasisKind::Oscillator, n).unwrap();
        let h = (&(&x * &x) + &p2).scale(0.5);
        assert!(h.is_diagonal(1e-13));
        let d = h.real_diagonal();
        for (k, v) in d.iter().enumerate().take(n - 1) {
            assert_abs_diff_eq!(*v, k as f64 + 0.5, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(d[n - 1], 7.5, epsilon = 1e-13);
        assert_abs_diff_eq!(h.eigenvalues().unwrap()[0], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn sylvester_is_unitary_and_preserves_spectrum() {
        for n in [2, 5, 16] {
            let f = sylvester_transform(n).unwrap();
            let ff = &f.adjoint() * &f;
            assert!(ff.max_abs_diff(&DiscreteOperator::identity(n)) <= 1e-12);
            let x = build_position(BasisKind::Position, n).unwrap().eigenvalues().unwrap();
            let p = build_momentum(BasisKind::Position, n).unwrap().eigenvalues().unwrap();
            for (a, b) in x.iter().zip(&p) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn lift_orders_modes_left_to_right() {
        let x = build_position(BasisKind::Oscillator, 2).unwrap();
        let reg = BosonRegister::uniform(2, 2).unwrap();
        let id = DiscreteOperator::identity(2);
        assert_eq!(lift_to_mode(&x, 0, &reg).unwrap(), x.kron(&id));
        assert_eq!(lift_to_mode(&x, 1, &reg).unwrap(), id.kron(&x));
    }

    #[test]
    fn lifted_operators_on_distinct_modes_commute() {
        let reg = BosonRegister::uniform(2, 8).unwrap();
        let x1 = lift_to_mode(&build_position(BasisKind::Oscillator, 8).unwrap(), 0, &reg).unwrap();
        let p2 = lift_to_mode(&build_momentum(BasisKind::Oscillator, 8).unwrap(), 1, &reg).unwrap();
        assert_eq!(x1.commutator(&p2).max_abs(), 0.0);
    }

    #[test]
    fn lift_shape_mismatch() {
        let x = build_position(BasisKind::Oscillator, 4).unwrap();
        let reg = BosonRegister::uniform(2, 2).unwrap();
        assert!(matches!(lift_to_mode(&x, 0, &reg), Err(Error::Shape { .. })));
        assert!(matches!(lift_to_mode(&x, 3, &reg), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn lifted_spectrum_has_multiplicity() {
        let x = build_position(BasisKind::Oscillator, 4).unwrap();
        let reg = BosonRegister::new(vec![4, 3]).unwrap();
        let lifted = lift_to_mode(&x, 0, &reg).unwrap();
        let base = x.eigenvalues().unwrap();
        let ev = lifted.eigenvalues().unwrap();
        let mut expect: Vec<f64> = base.iter().flat_map(|&v| [v; 3]).collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&expect) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn scalar_function_identity_and_exp() {
        let x = build_position(BasisKind::Oscillator, 8).unwrap();
        let same = apply_scalar_function(&x, |v| v).unwrap();
        assert!(same.max_abs_diff(&x) <= 1e-12);

        let d = DiscreteOperator::diagonal(&[0.0, 2f64.ln()]);
        let e = apply_scalar_function(&d, f64::exp).unwrap();
        assert_abs_diff_eq!(e.get(0, 0).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.get(1, 1).re, 2.0, epsilon = 1e-15);
        assert_eq!(e.get(0, 1), C64::new(0.0, 0.0));
    }

    #[test]
    fn scalar_function_square_matches_product() {
        let x = build_position(BasisKind::Oscillator, 16).unwrap();
        let sq = apply_scalar_function(&x, |v| v * v).unwrap();
        assert!(sq.max_abs_diff(&(&x * &x)) <= 1e-10);
    }

    #[test]
    fn scalar_function_rejects_non_hermitian() {
        let a = annihilation(4).unwrap();
        assert!(matches!(
            apply_scalar_function(&a, |v| v),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn joint_function_of_separable_sum() {
        let x = build_position(BasisKind::Oscillator, 4).unwrap();
        let reg = BosonRegister::uniform(2, 4).unwrap();
        let joint = apply_joint_function(&[x.clone(), x.clone()], |a| a[0] * a[0] + 2.0 * a[1]).unwrap();
        let x1 = lift_to_mode(&x, 0, &reg).unwrap();
        let x2 = lift_to_mode(&x, 1, &reg).unwrap();
        let direct = &(&x1 * &x1) + &x2.scale(2.0);
        assert!(joint.max_abs_diff(&direct) <= 1e-12);
    }

    #[test]
    fn produced_operators_are_hermitian() {
        for basis in [BasisKind::Oscillator, BasisKind::Position, BasisKind::FiniteDifference] {
            for n in [2, 3, 8, 16] {
                assert!(build_position(basis, n).unwrap().hermiticity_defect() <= 1e-12);
                assert!(build_momentum_squared(basis, n).unwrap().hermiticity_defect() <= 1e-12);
                if basis != BasisKind::FiniteDifference {
                    assert!(build_momentum(basis, n).unwrap().hermiticity_defect() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn momentum_squared_is_psd() {
        for basis in [BasisKind::Oscillator, BasisKind::Position, BasisKind::FiniteDifference] {
            let ev = build_momentum_squared(basis, 16).unwrap().eigenvalues().unwrap();
            assert!(ev[0] >= -1e-10, "{basis}: {}", ev[0]);
        }
    }
}
