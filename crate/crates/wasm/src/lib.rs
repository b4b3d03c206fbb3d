//! Browser bindings: ground-state explorer, wavepacket evolution and VQE
//! traces. Every export returns a JSON string.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use qcosmo::circuit::AnsatzSpec;
use qcosmo::config::{preset, ResolvedModel, PRESET_NAMES};
use qcosmo::eoh::{default_initial, kernel_profiles, model_splitting, EvolutionMethod};
use qcosmo::optim::{OptimizerConfig, OptimizerKind};
use qcosmo::pauli::{decompose, DEFAULT_ZERO_TOL};
use qcosmo::vqe::{exact_ground, run_vqe, VqeOptions, VqeTarget};

const MAX_QUBITS: usize = 8;
const MAX_BUDGET: usize = 20_000;
const TOP_TERMS: usize = 12;

fn model(name: &str, qubits: usize) -> Result<ResolvedModel, String> {
    let mut cfg = preset(name).map_err(|e| e.to_string())?;
    if qubits > 0 {
        cfg.qubits = vec![qubits; cfg.qubits.len()];
    }
    let m = cfg.resolve().map_err(|e| e.to_string())?;
    if m.total_qubits() > MAX_QUBITS {
        return Err(format!(
            "at most {MAX_QUBITS} qubits in the browser, got {}",
            m.total_qubits()
        ));
    }
    Ok(m)
}

fn err<E: ToString>(e: E) -> String {
    e.to_string()
}

pub fn presets_json() -> String {
    json!(PRESET_NAMES).to_string()
}

/// Exact ground energy, ground-state probabilities and the largest Pauli
/// terms. `qubits = 0` keeps the preset's size.
pub fn ground_state_json(name: &str, qubits: usize) -> Result<String, String> {
    let m = model(name, qubits)?;
    let h = m.hamiltonian().map_err(err)?;
    let (e0, psi) = exact_ground(&h).map_err(err)?;
    let s = decompose(&h, DEFAULT_ZERO_TOL).map_err(err)?;
    let mut terms: Vec<_> = s.terms().iter().collect();
    terms.sort_by(|a, b| b.coeff.abs().total_cmp(&a.coeff.abs()));
    let top: Vec<Value> = terms
        .iter()
        .take(TOP_TERMS)
        .map(|t| json!({"label": t.label.to_string(), "coeff": t.coeff}))
        .collect();
    Ok(json!({
        "model": m.name().name(),
        "basis": m.basis.name(),
        "qubits": m.total_qubits(),
        "dim": h.dim(),
        "exact_ground": e0,
        "pauli_terms": s.len(),
        "top_terms": top,
        "probabilities": psi.probabilities(),
    })
    .to_string())
}

/// |ψ(x, τ)|² from the default initial state, by Trotter product and by
/// exact propagation.
pub fn evolve_json(name: &str, tau: f64, steps: usize, order: u8) -> Result<String, String> {
    if !tau.is_finite() {
        return Err("tau must be finite".into());
    }
    let m = model(name, 0)?;
    let (split, grid) = model_splitting(&m).map_err(err)?;
    let init = default_initial(&m, &grid).amplitudes(&grid).map_err(err)?;
    let run = |method| kernel_profiles(&split, &grid, &[0.0, tau], &init, method).map_err(err);
    let trotter = run(EvolutionMethod::Trotter { steps, order })?;
    let exact = run(EvolutionMethod::Exact)?;
    let deviation = trotter[1]
        .squared
        .iter()
        .zip(&exact[1].squared)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(json!({
        "x": grid,
        "initial": trotter[0].squared,
        "trotter": trotter[1].squared,
        "exact": exact[1].squared,
        "norm": trotter[1].total(),
        "max_deviation": deviation,
    })
    .to_string())
}

/// Best-so-far energy after each evaluation of a seeded VQE run.
pub fn vqe_json(name: &str, optimizer: &str, budget: usize, seed: u64) -> Result<String, String> {
    if budget > MAX_BUDGET {
        return Err(format!("budget is capped at {MAX_BUDGET}"));
    }
    let m = model(name, 0)?;
    let h = m.hamiltonian().map_err(err)?;
    let (e0, _) = exact_ground(&h).map_err(err)?;
    let kind: OptimizerKind = optimizer.parse().map_err(err)?;
    let r = run_vqe(
        VqeTarget::Dense(&h),
        &AnsatzSpec::new(m.total_qubits(), 3),
        &OptimizerConfig::new(kind, budget, seed),
        VqeOptions { timing: false },
    )
    .map_err(err)?;
    let trace: Vec<f64> = r.trace.iter().map(|p| p.energy).collect();
    Ok(json!({
        "exact_ground": e0,
        "energy": r.energy,
        "converged": r.converged,
        "evaluations": r.evaluations,
        "trace": trace,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn presets() -> String {
    presets_json()
}

#[wasm_bindgen]
pub fn ground_state(name: &str, qubits: u32) -> Result<String, JsValue> {
    ground_state_json(name, qubits as usize).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn evolve(name: &str, tau: f64, steps: u32, order: u8) -> Result<String, JsValue> {
    evolve_json(name, tau, steps as usize, order).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn vqe(name: &str, optimizer: &str, budget: u32, seed: u32) -> Result<String, JsValue> {
    vqe_json(name, optimizer, budget as usize, u64::from(seed)).map_err(|e| JsValue::from_str(&e))
}
