//! Run configuration: JSON file plus command-line overrides, resolved into
//! a fully populated record that is embedded in every output.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qcosmo::config::{preset, ModelConfig, ResolvedModel, SCHEMA_VERSION};
use qcosmo::eoh::InitialState;
use qcosmo::optim::OptimizerKind;
use qcosmo::BasisKind;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<qcosmo::Error> for CliError {
    fn from(e: qcosmo::Error) -> Self {
        use qcosmo::Error as E;
        match e {
            E::InvalidTruncation(_)
            | E::UnsupportedBasis { .. }
            | E::NotPowerOfTwo(_)
            | E::IndexOutOfRange { .. }
            | E::InvalidArgument(_)
            | E::Parse(_) => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Exact,
    Vqe,
    Eoh,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqeBlock {
    #[serde(default)]
    pub optimizer: Option<OptimizerKind>,
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub reps: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub timing: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EohMethod {
    Trotter,
    Exact,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EohBlock {
    #[serde(default)]
    pub tau: Option<Vec<f64>>,
    #[serde(default)]
    pub method: Option<EohMethod>,
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub order: Option<u8>,
    #[serde(default)]
    pub initial: Option<InitialState>,
}

/// The on-disk configuration. Every field is optional so that flags can
/// fill the gaps; unknown keys are rejected.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub schema_version: Option<u32>,
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub qubits: Option<Vec<usize>>,
    #[serde(default)]
    pub basis: Option<BasisKind>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub vqe: Option<VqeBlock>,
    #[serde(default)]
    pub eoh: Option<EohBlock>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
        if let Some(v) = cfg.schema_version {
            if v != SCHEMA_VERSION {
                return Err(CliError::Usage(format!(
                    "config schema_version {v} is not supported (expected {SCHEMA_VERSION})"
                )));
            }
        }
        Ok(cfg)
    }
}

/// Overrides gathered from flags; `None` leaves the config value alone.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub qubits: Option<Vec<usize>>,
    pub basis: Option<BasisKind>,
    pub optimizer: Option<OptimizerKind>,
    pub budget: Option<usize>,
    pub reps: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub timing: Option<bool>,
    pub steps: Option<usize>,
    pub order: Option<u8>,
    pub tau: Option<Vec<f64>>,
    pub x0: Option<usize>,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VqeSettings {
    pub optimizer: OptimizerKind,
    pub budget: usize,
    pub reps: usize,
    pub tol: f64,
    pub seeds: Vec<u64>,
    pub timing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EohSettings {
    pub tau: Vec<f64>,
    pub method: EohMethod,
    pub steps: usize,
    pub order: u8,
    pub initial: Option<InitialState>,
}

/// Fully populated configuration as written into output JSON.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolvedRun {
    pub schema_version: u32,
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub model: ModelConfig,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vqe: Option<VqeSettings>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eoh: Option<EohSettings>,
    #[serde(skip)]
    pub resolved_model: Option<ResolvedModel>,
}

impl ResolvedRun {
    pub fn model(&self) -> &ResolvedModel {
        self.resolved_model.as_ref().expect("model resolved at construction")
    }
}

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_BUDGET: usize = 2000;
pub const DEFAULT_REPS: usize = 3;
pub const DEFAULT_STEPS: usize = 64;
pub const DEFAULT_TAU: [f64; 5] = [0.0, 0.05, 0.1, 0.2, 0.4];

pub fn resolve(command: Command, cfg: RunConfig, o: Overrides) -> Result<ResolvedRun, CliError> {
    if let Some(c) = cfg.command {
        if c != command {
            return Err(CliError::Usage(format!(
                "config is for command '{}', not '{}'",
                name(c),
                name(command)
            )));
        }
    }
    let preset_name = o.preset.or(cfg.preset);
    let mut model = match (&preset_name, cfg.model) {
        (Some(p), None) => preset(p)?,
        (None, Some(m)) => m,
        (Some(p), Some(_)) => {
            return Err(CliError::Usage(format!(
                "config gives both preset '{p}' and an inline model"
            )))
        }
        (None, None) => {
            return Err(CliError::Usage(format!(
                "no model: pass --preset <name> or a config with a 'model' block (presets: {})",
                qcosmo::config::PRESET_NAMES.join(", ")
            )))
        }
    };
    if let Some(q) = o.qubits.or(cfg.qubits) {
        model.qubits = q;
    }
    if let Some(b) = o.basis.or(cfg.basis) {
        model.basis = b;
    }
    let resolved_model = model.resolve()?;
    let seed = o.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);

    let vqe = (command == Command::Vqe).then(|| {
        let b = cfg.vqe.clone().unwrap_or_default();
        VqeSettings {
            optimizer: o.optimizer.or(b.optimizer).unwrap_or(OptimizerKind::Cobyla),
            budget: o.budget.or(b.budget).unwrap_or(DEFAULT_BUDGET),
            reps: o.reps.or(b.reps).unwrap_or(DEFAULT_REPS),
            tol: b.tol.unwrap_or(1e-9),
            seeds: o.seeds.clone().or(b.seeds).unwrap_or_else(|| vec![seed]),
            timing: o.timing.or(b.timing).unwrap_or(false),
        }
    });
    if let Some(v) = &vqe {
        if v.seeds.is_empty() {
            return Err(CliError::Usage("seed list is empty".into()));
        }
    }

    let eoh = if command == Command::Eoh {
        let b = cfg.eoh.clone().unwrap_or_default();
        let method = if o.exact {
            EohMethod::Exact
        } else {
            b.method.unwrap_or(EohMethod::Trotter)
        };
        let order = o.order.or(b.order).unwrap_or(2);
        if !matches!(order, 1 | 2) {
            return Err(CliError::Usage(format!("--order must be 1 or 2, got {order}")));
        }
        let steps = o.steps.or(b.steps).unwrap_or(DEFAULT_STEPS);
        if steps == 0 {
            return Err(CliError::Usage("--steps must be at least 1".into()));
        }
        let tau = o.tau.or(b.tau).unwrap_or_else(|| DEFAULT_TAU.to_vec());
        if tau.is_empty() || tau.iter().any(|t| !t.is_finite()) {
            return Err(CliError::Usage("tau list must be non-empty and finite".into()));
        }
        let initial = o.x0.map(|index| InitialState::Delta { index }).or(b.initial);
        Some(EohSettings {
            tau,
            method,
            steps,
            order,
            initial,
        })
    } else {
        None
    };

    Ok(ResolvedRun {
        schema_version: SCHEMA_VERSION,
        command,
        preset: preset_name,
        model: resolved_model.to_config(),
        seed,
        vqe,
        eoh,
        resolved_model: Some(resolved_model),
    })
}

fn name(c: Command) -> &'static str {
    match c {
        Command::Exact => "exact",
        Command::Vqe => "vqe",
        Command::Eoh => "eoh",
    }
}
