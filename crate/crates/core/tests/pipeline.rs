use proptest::prelude::*;

use qcosmo::circuit::StateVector;
use qcosmo::config::{preset, ModelConfig, ModelParams};
use qcosmo::eoh::{double_well_eoh, gaussian_state, trotter_evolve, EvolutionMethod, GaussianInit, TrotterSplitting};
use qcosmo::models::{dark_energy_potential, DarkEnergyParams, MinisuperspaceParams};
use qcosmo::operator::{grid, BasisKind, DiscreteOperator, C64};
use qcosmo::pauli::{decompose, expectation};
use qcosmo::tunneling::expand_about_minimum;
use qcosmo::vqe::exact_ground;

fn double_well_params() -> MinisuperspaceParams {
    match preset("double-well").unwrap().resolve().unwrap().params {
        ModelParams::DoubleWell(p) => p,
        _ => unreachable!(),
    }
}

fn left_well() -> GaussianInit {
    GaussianInit {
        center: -2f64.sqrt(),
        width: 0.5,
    }
}

#[test]
fn double_well_starts_from_the_gaussian() {
    let prof = double_well_eoh(&double_well_params(), 5, &[0.0], left_well(), EvolutionMethod::Exact).unwrap();
    let g = gaussian_state(&grid(BasisKind::FiniteDifference, 32), left_well()).unwrap();
    for (a, b) in prof[0].values.iter().zip(g.amplitudes()) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn double_well_tunnels_monotonically_at_early_times() {
    let taus: Vec<f64> = (0..=8).map(|i| 0.25 * i as f64).collect();
    for method in [
        EvolutionMethod::Exact,
        EvolutionMethod::Trotter { steps: 200, order: 2 },
    ] {
        let prof = double_well_eoh(&double_well_params(), 5, &taus, left_well(), method).unwrap();
        let mass: Vec<f64> = prof.iter().map(|p| p.mass_right_of(0.0)).collect();
        for p in &prof {
            assert!((p.total() - 1.0).abs() <= 1e-9);
        }
        assert!(mass.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{mass:?}");
        assert!(mass[8] > 0.2);
    }
}

#[test]
fn double_well_mass_frozen_values() {
    let prof = double_well_eoh(
        &double_well_params(),
        5,
        &[1.0, 2.0],
        left_well(),
        EvolutionMethod::Exact,
    )
    .unwrap();
    assert!((prof[0].mass_right_of(0.0) - 0.0674).abs() < 1e-4);
    assert!((prof[1].mass_right_of(0.0) - 0.2278).abs() < 1e-4);
}

#[test]
fn dark_energy_minimum_frozen_values() {
    let e = expand_about_minimum(&dark_energy_potential(&DarkEnergyParams::default()), 5.0, 3.0).unwrap();
    assert!((e.phi_min - 5.2396).abs() < 1e-4);
    assert!((e.v_min + 0.108629).abs() < 1e-6);
    assert!((e.m_sq - 0.170261).abs() < 1e-5);
    assert!((e.delta - 0.040694).abs() < 1e-5);
    assert!(e.fit_residual < 1e-4);
}

#[test]
fn pauli_terms_trotterize_model_one() {
    let h = preset("table4-16").unwrap().resolve().unwrap().hamiltonian().unwrap();
    let split = TrotterSplitting::pauli_terms(h, 1e-12).unwrap();
    let psi = StateVector::basis(4, 3).unwrap();
    let coarse = trotter_evolve(&split, 1.0, 20, 1, &psi, true).unwrap();
    let fine = trotter_evolve(&split, 1.0, 80, 1, &psi, true).unwrap();
    assert!(1.0 - fine.fidelity_vs_exact.unwrap() < 1.0 - coarse.fidelity_vs_exact.unwrap());
}

fn random_state(n: usize, amps: &[f64]) -> Option<StateVector> {
    StateVector::from_amplitudes((0..1 << n).map(|k| C64::new(amps[2 * k], amps[2 * k + 1])).collect()).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pauli_expectation_matches_dense_for_presets(amps in proptest::collection::vec(-1.0f64..1.0, 32), which in 0usize..3) {
        let name = ["table1", "table4-16", "table2-4q"][which];
        let m = preset(name).unwrap().resolve().unwrap();
        let h = m.hamiltonian().unwrap();
        let psi = random_state(m.total_qubits(), &amps);
        prop_assume!(psi.is_some());
        let psi = psi.unwrap();
        let s = decompose(&h, 0.0).unwrap();
        let dense = h.quadratic_form(psi.amplitudes());
        prop_assert!((expectation(&s, &psi).unwrap() - dense).abs() <= 1e-9 * h.max_abs());
    }

    #[test]
    fn variational_principle(amps in proptest::collection::vec(-1.0f64..1.0, 32)) {
        let h = preset("table4-16").unwrap().resolve().unwrap().hamiltonian().unwrap();
        let (e0, _) = exact_ground(&h).unwrap();
        let psi = random_state(4, &amps);
        prop_assume!(psi.is_some());
        prop_assert!(h.quadratic_form(psi.unwrap().amplitudes()) >= e0 - 1e-12);
    }

    #[test]
    fn config_json_round_trip(m1 in 1.0f64..50.0, m2 in 1.0f64..10.0, n in 2usize..6) {
        let text = format!(r#"{{"model":"starobinsky","params":{{"M1_4":{m1},"M2":{m2}}},"qubits":[{n}]}}"#);
        let c: ModelConfig = serde_json::from_str(&text).unwrap();
        let r = c.resolve().unwrap();
        let back: ModelConfig = serde_json::from_str(&serde_json::to_string(&r.to_config()).unwrap()).unwrap();
        prop_assert_eq!(back.resolve().unwrap(), r);
    }

    #[test]
    fn trotter_is_unitary_and_second_order_beats_first(vals in proptest::collection::vec(-1.0f64..1.0, 20), t in 0.1f64..1.0) {
        let a = DiscreteOperator::diagonal(&vals[..4]);
        let b = DiscreteOperator::from_real(4, |i, j| vals[4 + 4 * i.min(j) + i.max(j)]);
        let split = TrotterSplitting::kinetic_potential(a, b).unwrap();
        let psi = StateVector::basis(2, 0).unwrap();
        let o1 = trotter_evolve(&split, t, 64, 1, &psi, true).unwrap();
        let o2 = trotter_evolve(&split, t, 64, 2, &psi, true).unwrap();
        prop_assert!((o1.final_state.norm() - 1.0).abs() <= 1e-9);
        prop_assert!((o2.final_state.norm() - 1.0).abs() <= 1e-9);
        prop_assert!(1.0 - o2.fidelity_vs_exact.unwrap() <= 1.0 - o1.fidelity_vs_exact.unwrap() + 1e-12);
    }
}
