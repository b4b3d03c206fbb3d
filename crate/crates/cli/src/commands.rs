use std::path::{Path, PathBuf};

use serde::Serialize;

use qcosmo::circuit::AnsatzSpec;
use qcosmo::config::SCHEMA_VERSION;
use qcosmo::eoh::{
    default_initial, kernel_profiles, model_splitting, profiles_csv, EvolutionMethod, InitialState, KernelProfile,
};
use qcosmo::format::g17;
use qcosmo::optim::OptimizerConfig;
use qcosmo::pauli::{decompose, DEFAULT_ZERO_TOL};
use qcosmo::vqe::{exact_ground, run_vqe, VqeOptions, VqeResult, VqeTarget};

use crate::settings::{CliError, EohMethod, ResolvedRun};

#[derive(Serialize)]
struct Envelope<'a, R: Serialize> {
    schema_version: u32,
    config: &'a ResolvedRun,
    result: R,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_text(dir, name, &text)
}

fn envelope<R: Serialize>(run: &ResolvedRun, result: R) -> Envelope<'_, R> {
    Envelope {
        schema_version: SCHEMA_VERSION,
        config: run,
        result,
    }
}

#[derive(Serialize)]
struct ExactResult {
    exact_ground: f64,
    dim: usize,
    qubits: usize,
    pauli_terms: usize,
}

pub fn exact(run: &ResolvedRun, out: &Path) -> Result<(), CliError> {
    let m = run.model();
    let h = m.hamiltonian()?;
    let (e0, _) = exact_ground(&h)?;
    let s = decompose(&h, DEFAULT_ZERO_TOL)?;
    let result = ExactResult {
        exact_ground: e0,
        dim: h.dim(),
        qubits: m.total_qubits(),
        pauli_terms: s.len(),
    };
    write_text(out, "hamiltonian.pauli", &s.to_text())?;
    let path = write_json(out, "exact.json", &envelope(run, &result))?;
    println!(
        "exact ground {} (dim {}, {} Pauli terms) -> {}",
        g17(e0),
        result.dim,
        result.pauli_terms,
        path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct VqeRun {
    seed: u64,
    energy: f64,
    abs_error: f64,
    converged: bool,
    evaluations: usize,
    wall_time: f64,
    params: Vec<f64>,
}

#[derive(Serialize)]
struct VqeSummary {
    exact_ground: f64,
    dim: usize,
    best_seed: u64,
    best_energy: f64,
    best_abs_error: f64,
    runs: Vec<VqeRun>,
}

pub fn vqe(run: &ResolvedRun, out: &Path) -> Result<(), CliError> {
    let settings = run.vqe.as_ref().expect("vqe settings resolved");
    let m = run.model();
    let h = m.hamiltonian()?;
    let (e0, _) = exact_ground(&h)?;
    let ansatz = AnsatzSpec::new(m.total_qubits(), settings.reps);
    let options = VqeOptions {
        timing: settings.timing,
    };
    let results: Vec<qcosmo::Result<VqeResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> = settings
            .seeds
            .iter()
            .map(|&seed| {
                let (h, ansatz) = (&h, &ansatz);
                scope.spawn(move || {
                    let mut opt = OptimizerConfig::new(settings.optimizer, settings.budget, seed);
                    opt.tol = settings.tol;
                    run_vqe(VqeTarget::Dense(h), ansatz, &opt, options)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("VQE worker panicked"))
            .collect()
    });
    let results = results.into_iter().collect::<qcosmo::Result<Vec<_>>>()?;

    let best = results
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.energy.total_cmp(&b.1.energy).then(a.0.cmp(&b.0)))
        .map(|(_, r)| r)
        .expect("at least one seed");
    write_text(out, "trace.csv", &best.trace_csv())?;
    if results.len() > 1 {
        for r in &results {
            write_text(out, &format!("trace-seed-{}.csv", r.seed), &r.trace_csv())?;
        }
    }
    let summary = VqeSummary {
        exact_ground: e0,
        dim: h.dim(),
        best_seed: best.seed,
        best_energy: best.energy,
        best_abs_error: (best.energy - e0).abs(),
        runs: results
            .iter()
            .map(|r| VqeRun {
                seed: r.seed,
                energy: r.energy,
                abs_error: (r.energy - e0).abs(),
                converged: r.converged,
                evaluations: r.evaluations,
                wall_time: r.wall_time,
                params: r.params.clone(),
            })
            .collect(),
    };
    let path = write_json(out, "vqe.json", &envelope(run, &summary))?;
    for r in &summary.runs {
        println!(
            "seed {:>3}  energy {}  |E - E0| {:.3e}  evals {}{}",
            r.seed,
            g17(r.energy),
            r.abs_error,
            r.evaluations,
            if r.converged { "" } else { "  (not converged)" }
        );
    }
    println!(
        "exact {}  best seed {}  best {} -> {}",
        g17(e0),
        summary.best_seed,
        g17(summary.best_energy),
        path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct TauStats {
    tau: f64,
    norm: f64,
    mean_x: f64,
    var_x: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_abs2_deviation_vs_exact: Option<f64>,
}

#[derive(Serialize)]
struct ConvergencePoint {
    steps: usize,
    max_abs2_deviation_vs_exact: f64,
}

#[derive(Serialize)]
struct EohSummary {
    dim: usize,
    initial: InitialState,
    profiles: Vec<TauStats>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    convergence: Vec<ConvergencePoint>,
}

fn max_abs2_deviation(a: &[KernelProfile], b: &[KernelProfile]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(p, q)| p.squared.iter().zip(&q.squared).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

pub fn eoh(run: &mut ResolvedRun, out: &Path) -> Result<(), CliError> {
    let (split, g) = model_splitting(run.model())?;
    let n = g.len();
    let fallback = default_initial(run.model(), &g);
    let settings = run.eoh.as_mut().expect("eoh settings resolved");
    let resolved_initial = *settings.initial.get_or_insert(fallback);
    let settings = settings.clone();
    let init = resolved_initial.amplitudes(&g)?;
    let trotter = |steps| EvolutionMethod::Trotter {
        steps,
        order: settings.order,
    };
    let method = match settings.method {
        EohMethod::Exact => EvolutionMethod::Exact,
        EohMethod::Trotter => trotter(settings.steps),
    };
    let profiles = kernel_profiles(&split, &g, &settings.tau, &init, method)?;
    let exact = match settings.method {
        EohMethod::Trotter => Some(kernel_profiles(
            &split,
            &g,
            &settings.tau,
            &init,
            EvolutionMethod::Exact,
        )?),
        EohMethod::Exact => None,
    };
    let mut convergence = Vec::new();
    if let Some(ex) = &exact {
        for k in [1, 2, 4] {
            let steps = k * settings.steps;
            let p = if k == 1 {
                profiles.clone()
            } else {
                kernel_profiles(&split, &g, &settings.tau, &init, trotter(steps))?
            };
            convergence.push(ConvergencePoint {
                steps,
                max_abs2_deviation_vs_exact: max_abs2_deviation(&p, ex),
            });
        }
    }
    let stats = profiles
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (mean_x, var_x) = p.moments();
            TauStats {
                tau: p.tau,
                norm: p.total(),
                mean_x,
                var_x,
                max_abs2_deviation_vs_exact: exact
                    .as_ref()
                    .map(|ex| max_abs2_deviation(std::slice::from_ref(p), &ex[i..=i])),
            }
        })
        .collect();
    let summary = EohSummary {
        dim: n,
        initial: resolved_initial,
        profiles: stats,
        convergence,
    };
    let csv = write_text(out, "profiles.csv", &profiles_csv(&profiles))?;
    let json = write_json(out, "eoh.json", &envelope(run, &summary))?;
    for s in &summary.profiles {
        println!("tau {:<8} norm {:.12}  <x> {:+.6}", s.tau, s.norm, s.mean_x);
    }
    for c in &summary.convergence {
        println!(
            "steps {:>6}  max ||K|^2 - |K_exact|^2| {:.3e}",
            c.steps, c.max_abs2_deviation_vs_exact
        );
    }
    println!("-> {}, {}", csv.display(), json.display());
    Ok(())
}
