//! Variational eigensolver loop and the dense exact-ground oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{apply_circuit, efficient_su2_ansatz, expectation_dense, AnsatzSpec, StateVector};
use crate::error::{Error, Result};
use crate::format::g17;
use crate::operator::DiscreteOperator;
use crate::optim::{minimize, Evaluator, OptimizerConfig, OptimizerKind};
use crate::pauli::{self, PauliSum};

pub const EIGEN_RESIDUAL_TOL: f64 = 1e-10;

/// Smallest eigenvalue and its eigenvector, with the residual checked
/// against 1e-10 scaled by the operator's largest entry.
pub fn exact_ground(h: &DiscreteOperator) -> Result<(f64, StateVector)> {
    let spec = h.eigh()?;
    let lambda = spec.values[0];
    let v = spec.vector(0);
    let hv = h.apply(&v);
    let residual = hv
        .iter()
        .zip(&v)
        .map(|(a, b)| (a - b * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > EIGEN_RESIDUAL_TOL * h.max_abs().max(1.0) {
        return Err(Error::Eigensolver(residual));
    }
    Ok((lambda, StateVector::from_amplitudes(v)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub eval: usize,
    /// Best energy seen up to and including this evaluation.
    pub energy: f64,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub energy: f64,
    pub params: Vec<f64>,
    pub trace: Vec<TracePoint>,
    pub wall_time: f64,
    pub converged: bool,
    pub evaluations: usize,
    pub optimizer: OptimizerKind,
    pub seed: u64,
}

impl VqeResult {
    /// CSV with header `eval,energy,elapsed_ms`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("eval,energy,elapsed_ms\n");
        for p in &self.trace {
            out.push_str(&format!("{},{},{}\n", p.eval, g17(p.energy), g17(p.elapsed_ms)));
        }
        out
    }
}

/// Energy functional the optimizer minimizes.
pub enum VqeTarget<'a> {
    Dense(&'a DiscreteOperator),
    Pauli(&'a PauliSum),
}

impl VqeTarget<'_> {
    fn dim(&self) -> usize {
        match self {
            VqeTarget::Dense(h) => h.dim(),
            VqeTarget::Pauli(s) => 1 << s.n_qubits(),
        }
    }

    fn energy(&self, psi: &StateVector) -> Result<f64> {
        match self {
            VqeTarget::Dense(h) => expectation_dense(h, psi),
            VqeTarget::Pauli(s) => pauli::expectation(s, psi),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct VqeOptions {
    /// Record wall-clock timings. Off yields deterministic traces with zero
    /// elapsed times and is required where no monotonic clock exists.
    pub timing: bool,
}

/// Uniform draws in [−π, π] from the seeded generator.
pub fn initial_params(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect()
}

struct Clock(Option<std::time::Instant>);

impl Clock {
    fn start(enabled: bool) -> Self {
        Clock(enabled.then(std::time::Instant::now))
    }

    fn ms(&self) -> f64 {
        self.0.map_or(0.0, |t| t.elapsed().as_secs_f64() * 1e3)
    }
}

pub fn run_vqe(
    target: VqeTarget<'_>,
    ansatz: &AnsatzSpec,
    opt: &OptimizerConfig,
    options: VqeOptions,
) -> Result<VqeResult> {
    if opt.budget < 1 {
        return Err(Error::InvalidArgument("optimizer budget must be at least 1".into()));
    }
    let circuit = efficient_su2_ansatz(ansatz)?;
    if target.dim() != 1usize << ansatz.n_qubits {
        return Err(Error::Shape {
            expected: target.dim(),
            got: 1 << ansatz.n_qubits,
        });
    }
    let init = StateVector::zero(ansatz.n_qubits);
    let n_params = circuit.n_params();
    let x0 = initial_params(n_params, opt.seed);

    let clock = Clock::start(options.timing);
    let mut trace: Vec<TracePoint> = Vec::new();
    let mut best = f64::INFINITY;
    let mut failure: Option<Error> = None;

    let mut objective = |theta: &[f64]| -> f64 {
        let e = apply_circuit(&circuit, theta, &init).and_then(|psi| target.energy(&psi));
        let e = match e {
            Ok(e) => e,
            Err(err) => {
                failure.get_or_insert(err);
                f64::INFINITY
            }
        };
        best = best.min(e);
        trace.push(TracePoint {
            eval: trace.len() + 1,
            energy: best,
            elapsed_ms: clock.ms(),
        });
        e
    };
    let mut ev = Evaluator::new(&mut objective, opt.budget, 2 * n_params, opt.tol);
    minimize(opt.kind, &mut ev, &x0);
    let res = ev.finish();
    if let Some(err) = failure {
        return Err(err);
    }
    let wall_time = clock.ms() / 1e3;
    Ok(VqeResult {
        energy: res.fx,
        params: res.x,
        trace,
        wall_time,
        converged: res.converged,
        evaluations: res.evaluations,
        optimizer: opt.kind,
        seed: opt.seed,
    })
}

/// Dense Hamiltonian from a Pauli sum's expectation oracle; used when only
/// the decomposition is at hand.
pub fn ground_from_pauli(s: &PauliSum) -> Result<(f64, StateVector)> {
    exact_ground(&pauli::reconstruct(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Entanglement, Rotation};

    fn z() -> DiscreteOperator {
        DiscreteOperator::diagonal(&[1.0, -1.0])
    }

    #[test]
    fn exact_ground_of_diagonal() {
        let h = DiscreteOperator::diagonal(&[3.0, 1.0, 2.0, 4.0]);
        let (e, v) = exact_ground(&h).unwrap();
        assert_eq!(e, 1.0);
        assert!((v.amplitudes()[1].norm() - 1.0).abs() < 1e-15);
        assert_eq!(v.amplitudes()[0].norm(), 0.0);
    }

    #[test]
    fn exact_ground_rejects_non_hermitian() {
        let a = crate::operator::annihilation(4).unwrap();
        assert!(matches!(exact_ground(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn z_minimum_reached_by_every_optimizer() {
        let spec = AnsatzSpec {
            n_qubits: 1,
            reps: 1,
            rotations: vec![Rotation::Ry],
            entanglement: Entanglement::Full,
        };
        let h = z();
        for kind in OptimizerKind::ALL {
            let r = run_vqe(
                VqeTarget::Dense(&h),
                &spec,
                &OptimizerConfig::new(kind, 400, 3),
                VqeOptions::default(),
            )
            .unwrap();
            assert!(r.energy <= -0.9999, "{kind}: {}", r.energy);
        }
    }

    #[test]
    fn trace_is_monotone_and_ends_at_energy() {
        let h = crate::models::dark_matter_model_one(&Default::default(), 2).unwrap();
        let (exact, _) = exact_ground(&h).unwrap();
        let r = run_vqe(
            VqeTarget::Dense(&h),
            &AnsatzSpec::new(4, 2),
            &OptimizerConfig::new(OptimizerKind::Cobyla, 300, 1),
            VqeOptions::default(),
        )
        .unwrap();
        assert!(r.trace.windows(2).all(|w| w[1].energy <= w[0].energy));
        assert_eq!(r.trace.last().unwrap().energy, r.energy);
        assert!(r.trace.iter().all(|p| p.energy >= exact - 1e-9));
        assert_eq!(r.trace.len(), r.evaluations);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let h = crate::models::dark_matter_model_one(&Default::default(), 2).unwrap();
        let cfg = OptimizerConfig::new(OptimizerKind::NelderMead, 200, 9);
        let a = run_vqe(
            VqeTarget::Dense(&h),
            &AnsatzSpec::new(4, 1),
            &cfg,
            VqeOptions::default(),
        )
        .unwrap();
        let b = run_vqe(
            VqeTarget::Dense(&h),
            &AnsatzSpec::new(4, 1),
            &cfg,
            VqeOptions::default(),
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trace_csv(), b.trace_csv());
    }

    #[test]
    fn budget_one_is_unconverged() {
        let r = run_vqe(
            VqeTarget::Dense(&z()),
            &AnsatzSpec::new(1, 1),
            &OptimizerConfig::new(OptimizerKind::NelderMead, 1, 0),
            VqeOptions::default(),
        )
        .unwrap();
        assert!(!r.converged);
        assert_eq!(r.evaluations, 1);
    }

    #[test]
    fn pauli_and_dense_targets_agree() {
        let h = crate::models::dark_matter_model_one(&Default::default(), 2).unwrap();
        let s = pauli::decompose(&h, 0.0).unwrap();
        let cfg = OptimizerConfig::new(OptimizerKind::Cobyla, 60, 4);
        let a = run_vqe(
            VqeTarget::Dense(&h),
            &AnsatzSpec::new(4, 1),
            &cfg,
            VqeOptions::default(),
        )
        .unwrap();
        let b = run_vqe(
            VqeTarget::Pauli(&s),
            &AnsatzSpec::new(4, 1),
            &cfg,
            VqeOptions::default(),
        )
        .unwrap();
        assert!((a.trace[0].energy - b.trace[0].energy).abs() < 1e-12);
    }

    #[test]
    fn trace_csv_header() {
        let r = run_vqe(
            VqeTarget::Dense(&z()),
            &AnsatzSpec::new(1, 1),
            &OptimizerConfig::new(OptimizerKind::Cobyla, 5, 0),
            VqeOptions::default(),
        )
        .unwrap();
        let csv = r.trace_csv();
        assert!(csv.starts_with("eval,energy,elapsed_ms\n1,"));
        assert_eq!(csv.lines().count(), 6);
    }
}
