//! Time evolution e^{−iHt}: exact spectral propagation, first- and
//! second-order Trotter products, and kernel profiles over a grid.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::circuit::StateVector;
use crate::config::{ModelName, ModelParams, ResolvedModel};
use crate::error::{Error, Result};
use crate::format::g17;
use crate::models::{double_well_minimum, double_well_potential, MinisuperspaceParams};
use crate::operator::{
    apply_scalar_function, build_momentum_squared, build_position, grid, BasisKind, DiscreteOperator, C64,
};
use crate::pauli;
use crate::tunneling::expand_about_minimum;

pub const PARTS_TOL: f64 = 1e-12;

/// Spectral decomposition cached for repeated exponentials.
#[derive(Clone, Debug)]
pub struct Propagator {
    values: Vec<f64>,
    vectors: DMatrix<C64>,
}

impl Propagator {
    pub fn new(h: &DiscreteOperator) -> Result<Self> {
        let spec = h.eigh()?;
        Ok(Self {
            values: spec.values,
            vectors: spec.vectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Dense e^{−iHt}.
    pub fn unitary(&self, t: f64) -> DMatrix<C64> {
        let mut scaled = self.vectors.clone();
        for (k, &l) in self.values.iter().enumerate() {
            let phase = C64::from_polar(1.0, -l * t);
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= phase);
        }
        scaled * self.vectors.adjoint()
    }

    pub fn apply(&self, t: f64, psi: &[C64]) -> Vec<C64> {
        let v = DVector::from_column_slice(psi);
        let mut c = self.vectors.adjoint() * v;
        for (ck, &l) in c.iter_mut().zip(&self.values) {
            *ck *= C64::from_polar(1.0, -l * t);
        }
        (&self.vectors * c).iter().copied().collect()
    }
}

pub fn exact_evolve(h: &DiscreteOperator, t: f64, psi: &StateVector) -> Result<StateVector> {
    check_dim(h.dim(), psi.dim())?;
    let out = Propagator::new(h)?.apply(t, psi.amplitudes());
    StateVector::from_amplitudes(out)
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Shape { expected, got });
    }
    Ok(())
}

/// A Hamiltonian together with Hermitian parts that sum to it.
#[derive(Clone, Debug)]
pub struct TrotterSplitting {
    h: DiscreteOperator,
    parts: Vec<DiscreteOperator>,
}

impl TrotterSplitting {
    pub fn new(h: DiscreteOperator, parts: Vec<DiscreteOperator>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("splitting needs at least one part".into()));
        }
        let mut sum = DiscreteOperator::zeros(h.dim());
        for p in &parts {
            check_dim(h.dim(), p.dim())?;
            p.ensure_hermitian()?;
            sum = &sum + p;
        }
        let deviation = sum.max_abs_diff(&h);
        if deviation > PARTS_TOL * h.max_abs().max(1.0) {
            return Err(Error::PartsMismatch { deviation });
        }
        Ok(Self { h, parts })
    }

    pub fn single(h: DiscreteOperator) -> Self {
        Self {
            parts: vec![h.clone()],
            h,
        }
    }

    pub fn kinetic_potential(kinetic: DiscreteOperator, potential: DiscreteOperator) -> Result<Self> {
        let h = &kinetic + &potential;
        Self::new(h, vec![kinetic, potential])
    }

    /// Free particle P²/2 on an `n`-point finite-difference interval, split
    /// into its diagonal, even-bond hopping and odd-bond hopping parts.
    pub fn fd_free_particle(n: usize) -> Result<Self> {
        let h = build_momentum_squared(BasisKind::FiniteDifference, n)?.scale(0.5);
        let diag = DiscreteOperator::diagonal(&h.real_diagonal());
        let bonds = |parity: usize| {
            DiscreteOperator::from_real(n, |i, j| {
                let lo = i.min(j);
                if i.abs_diff(j) == 1 && lo % 2 == parity {
                    h.get(i, j).re
                } else {
                    0.0
                }
            })
        };
        Self::new(h.clone(), vec![diag, bonds(0), bonds(1)])
    }

    /// One part per Pauli term of the decomposition.
    pub fn pauli_terms(h: DiscreteOperator, zero_tol: f64) -> Result<Self> {
        let s = pauli::decompose(&h, zero_tol)?;
        Self::new(h, s.term_operators())
    }

    pub fn hamiltonian(&self) -> &DiscreteOperator {
        &self.h
    }

    pub fn parts(&self) -> &[DiscreteOperator] {
        &self.parts
    }

    /// Per-step product of part exponentials for step `dt`.
    fn step_factors(&self, dt: f64, order: u8) -> Result<Vec<DMatrix<C64>>> {
        let props = self.parts.iter().map(Propagator::new).collect::<Result<Vec<_>>>()?;
        Ok(match order {
            1 => props.iter().map(|p| p.unitary(dt)).collect(),
            2 => {
                let m = props.len();
                let mut f: Vec<DMatrix<C64>> = props[..m - 1].iter().map(|p| p.unitary(dt / 2.0)).collect();
                f.push(props[m - 1].unitary(dt));
                for p in props[..m - 1].iter().rev() {
                    f.push(p.unitary(dt / 2.0));
                }
                f
            }
            other => {
                return Err(Error::InvalidArgument(format!(
                    "Trotter order must be 1 or 2, got {other}"
                )))
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolveResult {
    pub final_state: StateVector,
    pub t: f64,
    pub steps: usize,
    pub order: u8,
    pub fidelity_vs_exact: Option<f64>,
}

fn trotter_amplitudes(split: &TrotterSplitting, t: f64, steps: usize, order: u8, psi: &[C64]) -> Result<Vec<C64>> {
    if steps < 1 {
        return Err(Error::InvalidArgument("Trotter steps must be at least 1".into()));
    }
    check_dim(split.h.dim(), psi.len())?;
    let factors = split.step_factors(t / steps as f64, order)?;
    let mut v = DVector::from_column_slice(psi);
    for _ in 0..steps {
        for f in &factors {
            v = f * v;
        }
    }
    Ok(v.iter().copied().collect())
}

/// Trotterized e^{−iHt}ψ. `compare_exact` also reports |⟨exact|out⟩|².
pub fn trotter_evolve(
    split: &TrotterSplitting,
    t: f64,
    steps: usize,
    order: u8,
    psi: &StateVector,
    compare_exact: bool,
) -> Result<EvolveResult> {
    let out = trotter_amplitudes(split, t, steps, order, psi.amplitudes())?;
    let final_state = StateVector::from_amplitudes(out)?;
    let fidelity_vs_exact = if compare_exact {
        let exact = exact_evolve(&split.h, t, psi)?;
        Some(exact.inner(&final_state).norm_sqr())
    } else {
        None
    };
    Ok(EvolveResult {
        final_state,
        t,
        steps,
        order,
        fidelity_vs_exact,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum EvolutionMethod {
    Exact,
    Trotter { steps: usize, order: u8 },
}

fn evolve_raw(split: &TrotterSplitting, method: EvolutionMethod, t: f64, psi: &[C64]) -> Result<Vec<C64>> {
    match method {
        EvolutionMethod::Exact => Ok(Propagator::new(&split.h)?.apply(t, psi)),
        EvolutionMethod::Trotter { steps, order } => trotter_amplitudes(split, t, steps, order, psi),
    }
}

/// ⟨to|e^{−iHt}|from⟩.
pub fn kernel(
    split: &TrotterSplitting,
    t: f64,
    from_index: usize,
    to_index: usize,
    method: EvolutionMethod,
) -> Result<C64> {
    let dim = split.h.dim();
    for index in [from_index, to_index] {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
    }
    let mut e = vec![C64::new(0.0, 0.0); dim];
    e[from_index] = C64::new(1.0, 0.0);
    Ok(evolve_raw(split, method, t, &e)?[to_index])
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelProfile {
    pub grid: Vec<f64>,
    pub tau: f64,
    pub values: Vec<C64>,
    pub squared: Vec<f64>,
}

impl KernelProfile {
    fn new(grid: Vec<f64>, tau: f64, values: Vec<C64>) -> Self {
        let squared = values.iter().map(|v| v.norm_sqr()).collect();
        Self {
            grid,
            tau,
            values,
            squared,
        }
    }

    pub fn total(&self) -> f64 {
        self.squared.iter().sum()
    }

    /// Mean and variance of the grid position under |K|².
    pub fn moments(&self) -> (f64, f64) {
        let w = self.total();
        let mean = self.grid.iter().zip(&self.squared).map(|(x, p)| x * p).sum::<f64>() / w;
        let var = self
            .grid
            .iter()
            .zip(&self.squared)
            .map(|(x, p)| (x - mean) * (x - mean) * p)
            .sum::<f64>()
            / w;
        (mean, var)
    }

    /// Probability on grid points with x > `x`.
    pub fn mass_right_of(&self, x: f64) -> f64 {
        self.grid
            .iter()
            .zip(&self.squared)
            .filter(|(g, _)| **g > x)
            .map(|(_, p)| p)
            .sum()
    }
}

pub const PROFILE_CSV_HEADER: &str = "tau,x_index,x_value,re_K,im_K,abs2_K";

/// Profiles as CSV rows under [`PROFILE_CSV_HEADER`].
pub fn profiles_csv(profiles: &[KernelProfile]) -> String {
    let mut out = String::from(PROFILE_CSV_HEADER);
    out.push('\n');
    for p in profiles {
        for (i, ((x, v), a)) in p.grid.iter().zip(&p.values).zip(&p.squared).enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                g17(p.tau),
                i,
                g17(*x),
                g17(v.re),
                g17(v.im),
                g17(*a)
            ));
        }
    }
    out
}

/// Evolves `init` to each τ and records the amplitudes over `grid`.
pub fn kernel_profiles(
    split: &TrotterSplitting,
    grid: &[f64],
    tau_list: &[f64],
    init: &[C64],
    method: EvolutionMethod,
) -> Result<Vec<KernelProfile>> {
    let exact = match method {
        EvolutionMethod::Exact => Some(Propagator::new(&split.h)?),
        EvolutionMethod::Trotter { .. } => None,
    };
    tau_list
        .iter()
        .map(|&tau| {
            let values = match &exact {
                Some(p) => p.apply(tau, init),
                None => evolve_raw(split, method, tau, init)?,
            };
            Ok(KernelProfile::new(grid.to_vec(), tau, values))
        })
        .collect()
}

/// |K(x, x₀; τ)|² over a free finite-difference interval of 2^n vertices.
pub fn interval_propagation_profile(
    n_qubits: usize,
    tau_list: &[f64],
    x0_index: usize,
    method: EvolutionMethod,
) -> Result<Vec<KernelProfile>> {
    let n = 1usize << n_qubits;
    if x0_index >= n {
        return Err(Error::IndexOutOfRange {
            index: x0_index,
            dim: n,
        });
    }
    let split = TrotterSplitting::fd_free_particle(n)?;
    let mut init = vec![C64::new(0.0, 0.0); n];
    init[x0_index] = C64::new(1.0, 0.0);
    kernel_profiles(&split, &grid(BasisKind::FiniteDifference, n), tau_list, &init, method)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianInit {
    pub center: f64,
    pub width: f64,
}

/// Sampled, normalized Gaussian exp(−(x − c)²/(2w²)) on `grid`.
pub fn gaussian_state(grid: &[f64], g: GaussianInit) -> Result<StateVector> {
    let amps = grid
        .iter()
        .map(|x| C64::new((-(x - g.center).powi(2) / (2.0 * g.width * g.width)).exp(), 0.0))
        .collect();
    StateVector::from_amplitudes(amps)
}

/// Kinetic/potential splitting of P²/2 + V(X̂) on one mode.
pub fn single_mode_splitting(v: impl Fn(f64) -> f64, n_qubits: usize, basis: BasisKind) -> Result<TrotterSplitting> {
    let n = 1usize << n_qubits;
    let kinetic = build_momentum_squared(basis, n)?.scale(0.5);
    let x = build_position(basis, n)?;
    TrotterSplitting::kinetic_potential(kinetic, apply_scalar_function(&x, v)?)
}

/// Splitting of P²/2 + V(a) for the negative-Λ double well on a
/// finite-difference grid.
pub fn double_well_splitting(p: &MinisuperspaceParams, n_qubits: usize) -> Result<TrotterSplitting> {
    let p = *p;
    single_mode_splitting(
        move |a| double_well_potential(&p, a),
        n_qubits,
        BasisKind::FiniteDifference,
    )
}

pub fn double_well_eoh(
    p: &MinisuperspaceParams,
    n_qubits: usize,
    tau_list: &[f64],
    initial: GaussianInit,
    method: EvolutionMethod,
) -> Result<Vec<KernelProfile>> {
    let split = double_well_splitting(p, n_qubits)?;
    let g = grid(BasisKind::FiniteDifference, 1 << n_qubits);
    let psi0 = gaussian_state(&g, initial)?;
    kernel_profiles(&split, &g, tau_list, psi0.amplitudes(), method)
}

/// Starting wavefunction on a grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Delta { index: usize },
    Gaussian { center: f64, width: f64 },
}

impl InitialState {
    pub fn amplitudes(self, grid: &[f64]) -> Result<Vec<C64>> {
        match self {
            InitialState::Delta { index } => {
                if index >= grid.len() {
                    return Err(Error::IndexOutOfRange { index, dim: grid.len() });
                }
                let mut v = vec![C64::new(0.0, 0.0); grid.len()];
                v[index] = C64::new(1.0, 0.0);
                Ok(v)
            }
            InitialState::Gaussian { center, width } => {
                if !(width > 0.0) || !center.is_finite() {
                    return Err(Error::InvalidArgument(
                        "gaussian needs a finite center and a positive width".into(),
                    ));
                }
                Ok(gaussian_state(grid, GaussianInit { center, width })?.into_amplitudes())
            }
        }
    }
}

/// Splitting and grid for a single-mode model on a position or
/// finite-difference basis.
pub fn model_splitting(m: &ResolvedModel) -> Result<(TrotterSplitting, Vec<f64>)> {
    let name = m.name();
    if name.modes() != 1 {
        return Err(Error::InvalidArgument(format!(
            "evolution needs a single-mode model, {name} has two"
        )));
    }
    if m.basis == BasisKind::Oscillator {
        return Err(Error::InvalidArgument(
            "evolution needs the position or fd basis".into(),
        ));
    }
    let n = 1usize << m.qubits_per_mode;
    let split = if name == ModelName::FreeInterval {
        if m.basis != BasisKind::FiniteDifference {
            return Err(Error::InvalidArgument(
                "free_interval is defined on the fd basis only".into(),
            ));
        }
        TrotterSplitting::fd_free_particle(n)?
    } else {
        let v = m.potential().expect("single-mode models have a potential");
        single_mode_splitting(move |x| v.value(x), m.qubits_per_mode, m.basis)?
    };
    Ok((split, grid(m.basis, n)))
}

/// A delta at the centre of a free interval, the left well of a double
/// well, or a Gaussian at the potential minimum otherwise.
pub fn default_initial(m: &ResolvedModel, grid: &[f64]) -> InitialState {
    let width = 0.5;
    match &m.params {
        ModelParams::FreeInterval => return InitialState::Delta { index: grid.len() / 2 },
        ModelParams::DoubleWell(p) => {
            return InitialState::Gaussian {
                center: -double_well_minimum(p),
                width,
            }
        }
        _ => {}
    }
    let Some(v) = m.potential() else {
        return InitialState::Gaussian { center: 0.0, width };
    };
    let best = grid
        .iter()
        .copied()
        .filter(|&x| v.value(x).is_finite())
        .min_by(|a, b| v.value(*a).total_cmp(&v.value(*b)));
    let spacing = if grid.len() > 1 { (grid[1] - grid[0]).abs() } else { 1.0 };
    let center = best
        .map(|x| expand_about_minimum(&v, x, 2.0 * spacing).map_or(x, |e| e.phi_min))
        .unwrap_or(0.0);
    InitialState::Gaussian { center, width }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn z() -> DiscreteOperator {
        DiscreteOperator::diagonal(&[1.0, -1.0])
    }

    fn random_hermitian(dim: usize, vals: &[f64]) -> DiscreteOperator {
        let m = DMatrix::from_fn(dim, dim, |i, j| {
            let (a, b) = (i.min(j), i.max(j));
            let re = vals[(a * dim + b) % vals.len()];
            let im = if i == j {
                0.0
            } else {
                vals[(b * dim + a + 7) % vals.len()]
            };
            if i <= j {
                C64::new(re, im)
            } else {
                C64::new(re, -im)
            }
        });
        DiscreteOperator::from_matrix(m).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let psi = StateVector::from_amplitudes(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let out = exact_evolve(&z(), 0.0, &psi).unwrap();
        for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn z_quarter_period_phase() {
        let out = exact_evolve(&z(), std::f64::consts::FRAC_PI_2, &StateVector::zero(1)).unwrap();
        assert_abs_diff_eq!(out.amplitudes()[0].re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitudes()[0].im, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn propagator_is_unitary() {
        let h = random_hermitian(8, &[0.3, -1.2, 0.7, 2.2, -0.4, 0.9, 1.5, -2.0, 0.1]);
        let u = Propagator::new(&h).unwrap().unitary(0.77);
        let uu = u.adjoint() * &u;
        let id = DMatrix::<C64>::identity(8, 8);
        assert!((uu - id).iter().all(|z| z.norm() <= 1e-10));
    }

    #[test]
    fn single_part_matches_exact() {
        let h = random_hermitian(4, &[0.5, 1.0, -0.3, 0.8, 1.1]);
        let psi = StateVector::basis(2, 1).unwrap();
        let exact = exact_evolve(&h, 1.3, &psi).unwrap();
        let r = trotter_evolve(&TrotterSplitting::single(h), 1.3, 3, 1, &psi, true).unwrap();
        for (a, b) in r.final_state.amplitudes().iter().zip(exact.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((r.fidelity_vs_exact.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn commuting_parts_are_exact() {
        let a = DiscreteOperator::diagonal(&[1.0, 2.0, -1.0, 0.5]);
        let b = DiscreteOperator::diagonal(&[0.3, -0.7, 1.1, 2.0]);
        let split = TrotterSplitting::kinetic_potential(a, b).unwrap();
        let psi = StateVector::from_amplitudes(vec![C64::new(0.5, 0.0); 4]).unwrap();
        let exact = exact_evolve(split.hamiltonian(), 2.0, &psi).unwrap();
        let r = trotter_evolve(&split, 2.0, 1, 1, &psi, false).unwrap();
        for (x, y) in r.final_state.amplitudes().iter().zip(exact.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn mismatched_parts_rejected() {
        let h = z();
        let err = TrotterSplitting::new(h, vec![DiscreteOperator::diagonal(&[1.0, 1.0])]).unwrap_err();
        assert!(matches!(err, Error::PartsMismatch { .. }));
    }

    #[test]
    fn invalid_steps_and_order() {
        let split = TrotterSplitting::single(z());
        let psi = StateVector::zero(1);
        assert!(trotter_evolve(&split, 1.0, 0, 1, &psi, false).is_err());
        assert!(trotter_evolve(&split, 1.0, 2, 3, &psi, false).is_err());
    }

    #[test]
    fn kernel_at_zero_time() {
        let split = TrotterSplitting::fd_free_particle(8).unwrap();
        let m = EvolutionMethod::Trotter { steps: 4, order: 2 };
        assert!((kernel(&split, 0.0, 3, 3, m).unwrap() - 1.0).norm() < 1e-14);
        assert!(kernel(&split, 0.0, 3, 4, m).unwrap().norm() < 1e-14);
        assert!(matches!(
            kernel(&split, 0.0, 8, 0, m),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn kernel_transpose_symmetry_for_real_symmetric_h() {
        let split = TrotterSplitting::fd_free_particle(16).unwrap();
        for m in [EvolutionMethod::Exact, EvolutionMethod::Trotter { steps: 10, order: 2 }] {
            let a = kernel(&split, 0.4, 2, 9, m).unwrap();
            let b = kernel(&split, 0.4, 9, 2, m).unwrap();
            assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn pauli_term_splitting_reconstructs_h() {
        let h = crate::models::dark_matter_model_one(&Default::default(), 2).unwrap();
        let split = TrotterSplitting::pauli_terms(h, 1e-12).unwrap();
        assert_eq!(split.parts().len(), 25);
        let psi = StateVector::zero(4);
        let r = trotter_evolve(&split, 0.5, 40, 2, &psi, true).unwrap();
        assert!(r.fidelity_vs_exact.unwrap() > 1.0 - 1e-4);
    }

    #[test]
    fn fd_split_sums_to_free_hamiltonian() {
        let split = TrotterSplitting::fd_free_particle(32).unwrap();
        assert_eq!(split.parts().len(), 3);
        let p2 = build_momentum_squared(BasisKind::FiniteDifference, 32)
            .unwrap()
            .scale(0.5);
        assert_eq!(split.hamiltonian(), &p2);
    }

    #[test]
    fn interval_profile_starts_as_delta() {
        let prof = interval_propagation_profile(5, &[0.0], 16, EvolutionMethod::Exact).unwrap();
        let sq = &prof[0].squared;
        assert!((sq[16] - 1.0).abs() < 1e-12);
        assert!(sq.iter().enumerate().all(|(i, p)| i == 16 || *p < 1e-24));
    }

    #[test]
    fn interval_profiles_spread_and_conserve() {
        let taus = [0.0, 0.05, 0.1, 0.2, 0.3];
        let prof = interval_propagation_profile(5, &taus, 16, EvolutionMethod::Exact).unwrap();
        let mut last = -1.0;
        for p in &prof {
            assert!((p.total() - 1.0).abs() <= 1e-9);
            let (_, var) = p.moments();
            assert!(var > last);
            last = var;
        }
    }

    #[test]
    fn trotter_profile_tracks_exact() {
        let taus = [0.05, 0.2, 0.5];
        let exact = interval_propagation_profile(5, &taus, 10, EvolutionMethod::Exact).unwrap();
        let trot =
            interval_propagation_profile(5, &taus, 10, EvolutionMethod::Trotter { steps: 64, order: 2 }).unwrap();
        for (a, b) in exact.iter().zip(&trot) {
            assert!((b.total() - 1.0).abs() <= 1e-9);
            let dev = a
                .squared
                .iter()
                .zip(&b.squared)
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            assert!(dev <= 1e-3, "tau {} dev {dev}", a.tau);
        }
    }

    #[test]
    fn csv_layout() {
        let prof = interval_propagation_profile(2, &[0.0], 1, EvolutionMethod::Exact).unwrap();
        let csv = profiles_csv(&prof);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], PROFILE_CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines[2].starts_with("0,1,"));
        let abs2: f64 = lines[2].rsplit(',').next().unwrap().parse().unwrap();
        assert!((abs2 - 1.0).abs() < 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn energy_and_norm_conserved(vals in proptest::collection::vec(-2.0f64..2.0, 40),
                                     amps in proptest::collection::vec(-1.0f64..1.0, 16),
                                     t in 0.0f64..5.0) {
            let h = random_hermitian(8, &vals);
            let psi = StateVector::from_amplitudes((0..8).map(|k| C64::new(amps[2*k], amps[2*k+1])).collect());
            prop_assume!(psi.is_ok());
            let psi = psi.unwrap();
            let raw = Propagator::new(&h).unwrap().apply(t, psi.amplitudes());
            let norm: f64 = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() <= 1e-12);
            let out = StateVector::from_amplitudes(raw).unwrap();
            let e0 = h.quadratic_form(psi.amplitudes());
            let e1 = h.quadratic_form(out.amplitudes());
            prop_assert!((e0 - e1).abs() <= 1e-10);
        }

        #[test]
        fn time_composes(vals in proptest::collection::vec(-2.0f64..2.0, 40), t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
            let h = random_hermitian(8, &vals);
            let psi = StateVector::basis(3, 2).unwrap();
            let p = Propagator::new(&h).unwrap();
            let direct = p.apply(t1 + t2, psi.amplitudes());
            let composed = p.apply(t2, &p.apply(t1, psi.amplitudes()));
            for (a, b) in direct.iter().zip(&composed) {
                prop_assert!((a - b).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn default_initial_states() {
        use crate::config::preset;
        let m = preset("fig13").unwrap().resolve().unwrap();
        let (split, g) = model_splitting(&m).unwrap();
        assert_eq!(split.parts().len(), 3);
        assert_eq!(default_initial(&m, &g), InitialState::Delta { index: 16 });
        let m = preset("double-well").unwrap().resolve().unwrap();
        let (_, g) = model_splitting(&m).unwrap();
        match default_initial(&m, &g) {
            InitialState::Gaussian { center, .. } => assert!((center + 2f64.sqrt()).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(model_splitting(&preset("table1").unwrap().resolve().unwrap()).is_err());
        assert!(model_splitting(&preset("table3").unwrap().resolve().unwrap()).is_err());
    }

    #[test]
    fn initial_state_amplitudes() {
        let g = grid(BasisKind::FiniteDifference, 8);
        let d = InitialState::Delta { index: 3 }.amplitudes(&g).unwrap();
        assert_eq!(d.iter().filter(|a| a.norm() > 0.0).count(), 1);
        assert!(InitialState::Delta { index: 8 }.amplitudes(&g).is_err());
        let w = InitialState::Gaussian {
            center: 0.0,
            width: 0.7,
        }
        .amplitudes(&g)
        .unwrap();
        assert!((w.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(InitialState::Gaussian {
            center: 0.0,
            width: 0.0
        }
        .amplitudes(&g)
        .is_err());
    }
}
