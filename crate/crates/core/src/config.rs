//! JSON model configuration and named presets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::models::{
    dark_energy_potential, dark_energy_single_radius, dark_energy_two_radius, dark_matter_model_one,
    dark_matter_model_two, double_well_potential, minisuperspace_hamiltonian, single_mode_hamiltonian,
    starobinsky_hamiltonian, DarkEnergyParams, DarkMatterParams, MinisuperspaceKind, MinisuperspaceParams, PotentialFn,
    StarobinskyParams, TwoRadiusParams,
};
use crate::operator::{BasisKind, DiscreteOperator};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    Starobinsky,
    DarkEnergy,
    DarkEnergyTwoRadius,
    DarkMatterOne,
    DarkMatterTwo,
    Minisuperspace,
    DoubleWell,
    FreeInterval,
}

impl ModelName {
    pub const ALL: [ModelName; 8] = [
        ModelName::Starobinsky,
        ModelName::DarkEnergy,
        ModelName::DarkEnergyTwoRadius,
        ModelName::DarkMatterOne,
        ModelName::DarkMatterTwo,
        ModelName::Minisuperspace,
        ModelName::DoubleWell,
        ModelName::FreeInterval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelName::Starobinsky => "starobinsky",
            ModelName::DarkEnergy => "dark_energy",
            ModelName::DarkEnergyTwoRadius => "dark_energy_two_radius",
            ModelName::DarkMatterOne => "dark_matter_one",
            ModelName::DarkMatterTwo => "dark_matter_two",
            ModelName::Minisuperspace => "minisuperspace",
            ModelName::DoubleWell => "double_well",
            ModelName::FreeInterval => "free_interval",
        }
    }

    pub fn modes(self) -> usize {
        match self {
            ModelName::DarkEnergyTwoRadius | ModelName::DarkMatterOne | ModelName::DarkMatterTwo => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let known: Vec<&str> = Self::ALL.iter().map(|m| m.name()).collect();
            Error::Parse(format!("unknown model '{s}' (known: {})", known.join(", ")))
        })
    }
}

fn default_basis() -> BasisKind {
    BasisKind::Oscillator
}

/// `{"model": name, "params": {...}, "qubits": [n, ...], "basis": ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub model: ModelName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<MinisuperspaceKind>,
    #[serde(default)]
    pub params: Value,
    pub qubits: Vec<usize>,
    #[serde(default = "default_basis")]
    pub basis: BasisKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelParams {
    Starobinsky(StarobinskyParams),
    DarkEnergy(DarkEnergyParams),
    DarkEnergyTwoRadius(TwoRadiusParams),
    DarkMatterOne(DarkMatterParams),
    DarkMatterTwo(DarkMatterParams),
    Minisuperspace(MinisuperspaceKind, MinisuperspaceParams),
    DoubleWell(MinisuperspaceParams),
    FreeInterval,
}

/// A configuration with typed parameters and a per-mode qubit count.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedModel {
    pub params: ModelParams,
    pub qubits_per_mode: usize,
    pub basis: BasisKind,
}

fn typed<T: serde::de::DeserializeOwned>(model: ModelName, v: &Value) -> Result<T> {
    let v = if v.is_null() {
        Value::Object(Default::default())
    } else {
        v.clone()
    };
    serde_json::from_value(v).map_err(|e| Error::Parse(format!("params for {model}: {e}")))
}

impl ModelConfig {
    pub fn resolve(&self) -> Result<ResolvedModel> {
        let m = self.model;
        if self.kind.is_some() && m != ModelName::Minisuperspace {
            return Err(Error::Parse(format!("'kind' applies only to minisuperspace, not {m}")));
        }
        let params = match m {
            ModelName::Starobinsky => ModelParams::Starobinsky(typed(m, &self.params)?),
            ModelName::DarkEnergy => ModelParams::DarkEnergy(typed(m, &self.params)?),
            ModelName::DarkEnergyTwoRadius => ModelParams::DarkEnergyTwoRadius(typed(m, &self.params)?),
            ModelName::DarkMatterOne => ModelParams::DarkMatterOne(typed(m, &self.params)?),
            ModelName::DarkMatterTwo => ModelParams::DarkMatterTwo(typed(m, &self.params)?),
            ModelName::Minisuperspace => {
                let kind = self
                    .kind
                    .ok_or_else(|| Error::Parse("minisuperspace needs a 'kind'".into()))?;
                ModelParams::Minisuperspace(kind, typed(m, &self.params)?)
            }
            ModelName::DoubleWell => ModelParams::DoubleWell(typed(m, &self.params)?),
            ModelName::FreeInterval => {
                if !(self.params.is_null() || self.params.as_object().is_some_and(|o| o.is_empty())) {
                    return Err(Error::Parse("free_interval takes no params".into()));
                }
                ModelParams::FreeInterval
            }
        };
        let qubits_per_mode = match self.qubits.as_slice() {
            [n] => *n,
            [a, b] if m.modes() == 2 && a == b => *a,
            [_, _] if m.modes() == 2 => return Err(Error::Parse("both modes must use the same qubit count".into())),
            q => {
                return Err(Error::Parse(format!(
                    "{m} expects qubits [n]{}, got {q:?}",
                    if m.modes() == 2 { " or [n, n]" } else { "" }
                )))
            }
        };
        if matches!(m, ModelName::DarkMatterOne | ModelName::DarkMatterTwo) && self.basis != BasisKind::Oscillator {
            return Err(Error::Parse(format!("{m} is defined in the oscillator basis only")));
        }
        Ok(ResolvedModel {
            params,
            qubits_per_mode,
            basis: self.basis,
        })
    }
}

impl ResolvedModel {
    pub fn name(&self) -> ModelName {
        match self.params {
            ModelParams::Starobinsky(_) => ModelName::Starobinsky,
            ModelParams::DarkEnergy(_) => ModelName::DarkEnergy,
            ModelParams::DarkEnergyTwoRadius(_) => ModelName::DarkEnergyTwoRadius,
            ModelParams::DarkMatterOne(_) => ModelName::DarkMatterOne,
            ModelParams::DarkMatterTwo(_) => ModelName::DarkMatterTwo,
            ModelParams::Minisuperspace(..) => ModelName::Minisuperspace,
            ModelParams::DoubleWell(_) => ModelName::DoubleWell,
            ModelParams::FreeInterval => ModelName::FreeInterval,
        }
    }

    pub fn total_qubits(&self) -> usize {
        self.qubits_per_mode * self.name().modes()
    }

    pub fn hamiltonian(&self) -> Result<DiscreteOperator> {
        let (n, basis) = (self.qubits_per_mode, self.basis);
        match &self.params {
            ModelParams::Starobinsky(p) => starobinsky_hamiltonian(p, n, basis),
            ModelParams::DarkEnergy(p) => dark_energy_single_radius(p, n, basis),
            ModelParams::DarkEnergyTwoRadius(p) => dark_energy_two_radius(p, n, basis),
            ModelParams::DarkMatterOne(p) => dark_matter_model_one(p, n),
            ModelParams::DarkMatterTwo(p) => dark_matter_model_two(p, n),
            ModelParams::Minisuperspace(kind, p) => minisuperspace_hamiltonian(*kind, p, n, basis),
            ModelParams::DoubleWell(p) => {
                let p = *p;
                single_mode_hamiltonian(|a| double_well_potential(&p, a), n, basis)
            }
            ModelParams::FreeInterval => single_mode_hamiltonian(|_| 0.0, n, basis),
        }
    }

    /// The classical potential, for single-mode models.
    pub fn potential(&self) -> Option<PotentialFn> {
        match &self.params {
            ModelParams::Starobinsky(p) => Some(crate::models::starobinsky_potential(p)),
            ModelParams::DarkEnergy(p) => Some(dark_energy_potential(p)),
            ModelParams::Minisuperspace(kind, p) => Some(crate::models::minisuperspace_potential_fn(*kind, p)),
            ModelParams::DoubleWell(p) => {
                let p = *p;
                Some(PotentialFn::new(
                    "double_well",
                    (f64::NEG_INFINITY, f64::INFINITY),
                    move |a| double_well_potential(&p, a),
                ))
            }
            ModelParams::FreeInterval => Some(PotentialFn::zero()),
            _ => None,
        }
    }

    /// Fully populated configuration, defaults included.
    pub fn to_config(&self) -> ModelConfig {
        let to = |v: Result<Value, serde_json::Error>| v.expect("parameter structs serialize");
        let (kind, params) = match &self.params {
            ModelParams::Starobinsky(p) => (None, to(serde_json::to_value(p))),
            ModelParams::DarkEnergy(p) => (None, to(serde_json::to_value(p))),
            ModelParams::DarkEnergyTwoRadius(p) => (None, to(serde_json::to_value(p))),
            ModelParams::DarkMatterOne(p) | ModelParams::DarkMatterTwo(p) => (None, to(serde_json::to_value(p))),
            ModelParams::Minisuperspace(k, p) => (Some(*k), to(serde_json::to_value(p))),
            ModelParams::DoubleWell(p) => (None, to(serde_json::to_value(p))),
            ModelParams::FreeInterval => (None, Value::Object(Default::default())),
        };
        ModelConfig {
            model: self.name(),
            kind,
            params,
            qubits: vec![self.qubits_per_mode; self.name().modes()],
            basis: self.basis,
        }
    }
}

pub const PRESET_NAMES: [&str; 14] = [
    "table1",
    "table2-4q",
    "table2-5q",
    "table2-6q",
    "table3",
    "table4-16",
    "table4-64",
    "table4-256",
    "table5",
    "fig13",
    "double-well",
    "inv-liouville",
    "kantowski-sachs",
    "tunneling",
];

fn cfg(model: ModelName, params: Value, qubits: usize, basis: BasisKind) -> ModelConfig {
    ModelConfig {
        model,
        kind: None,
        params,
        qubits: vec![qubits; model.modes()],
        basis,
    }
}

pub fn preset(name: &str) -> Result<ModelConfig> {
    use serde_json::json;
    use BasisKind::{FiniteDifference as Fd, Oscillator as Osc};
    let table4 = |n| cfg(ModelName::DarkMatterOne, json!({"lambda_mix": 0.01}), n, Osc);
    Ok(match name {
        "table1" => cfg(
            ModelName::Starobinsky,
            json!({"M1_4": 29.167, "M2": (2.0f64 * 29.167).sqrt()}),
            4,
            Osc,
        ),
        "table2-4q" => cfg(ModelName::DarkEnergy, json!({}), 4, Osc),
        "table2-5q" => cfg(ModelName::DarkEnergy, json!({}), 5, Osc),
        "table2-6q" => cfg(ModelName::DarkEnergy, json!({}), 6, Osc),
        "table3" => cfg(ModelName::DarkEnergyTwoRadius, json!({}), 4, Osc),
        "table4-16" => table4(2),
        "table4-64" => table4(3),
        "table4-256" => table4(4),
        "table5" => cfg(ModelName::DarkMatterTwo, json!({"lambda_mix": 0.01}), 4, Osc),
        "fig13" => cfg(ModelName::FreeInterval, json!({}), 5, Fd),
        "double-well" => cfg(
            ModelName::DoubleWell,
            json!({"Lambda": -0.25, "k_curv": -1.0, "v_volume": 1.0}),
            5,
            Fd,
        ),
        "inv-liouville" => ModelConfig {
            kind: Some(MinisuperspaceKind::InvLiouville),
            ..cfg(ModelName::Minisuperspace, json!({}), 5, Fd)
        },
        "kantowski-sachs" => ModelConfig {
            kind: Some(MinisuperspaceKind::KantowskiSachs),
            ..cfg(ModelName::Minisuperspace, json!({"p_phi": 1.0}), 5, Fd)
        },
        "tunneling" => cfg(ModelName::DarkEnergy, json!({}), 6, Osc),
        other => {
            return Err(Error::Parse(format!(
                "unknown preset '{other}' (known: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_resolves() {
        for name in PRESET_NAMES {
            let r = preset(name).unwrap().resolve().unwrap();
            assert_eq!(r.to_config().resolve().unwrap(), r, "{name}");
        }
    }

    #[test]
    fn presets_select_sizes() {
        assert_eq!(preset("table4-256").unwrap().resolve().unwrap().total_qubits(), 8);
        assert_eq!(preset("table3").unwrap().resolve().unwrap().total_qubits(), 8);
        assert_eq!(preset("table2-6q").unwrap().resolve().unwrap().total_qubits(), 6);
        assert!(matches!(preset("nope"), Err(Error::Parse(m)) if m.contains("table1")));
    }

    #[test]
    fn parses_json_with_defaults() {
        let c: ModelConfig =
            serde_json::from_str(r#"{"model": "starobinsky", "params": {"M2": 5.0}, "qubits": [3]}"#).unwrap();
        let r = c.resolve().unwrap();
        match r.params {
            ModelParams::Starobinsky(p) => assert_eq!((p.m1_4, p.m2), (29.167, 5.0)),
            _ => panic!(),
        }
        assert_eq!(r.basis, BasisKind::Oscillator);
        assert_eq!(r.hamiltonian().unwrap().dim(), 8);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_shapes() {
        assert!(serde_json::from_str::<ModelConfig>(r#"{"model": "starobinsky", "qubits": [3], "x": 1}"#).is_err());
        assert!(serde_json::from_str::<ModelConfig>(r#"{"model": "nope", "qubits": [3]}"#).is_err());
        let bad_param: ModelConfig =
            serde_json::from_str(r#"{"model": "dark_energy", "params": {"q": 1}, "qubits": [3]}"#).unwrap();
        assert!(matches!(bad_param.resolve(), Err(Error::Parse(_))));
        let mismatch: ModelConfig = serde_json::from_str(r#"{"model": "dark_matter_one", "qubits": [2, 3]}"#).unwrap();
        assert!(mismatch.resolve().is_err());
        let no_kind: ModelConfig = serde_json::from_str(r#"{"model": "minisuperspace", "qubits": [3]}"#).unwrap();
        assert!(no_kind.resolve().is_err());
        let fd_dm: ModelConfig =
            serde_json::from_str(r#"{"model": "dark_matter_two", "qubits": [2], "basis": "fd"}"#).unwrap();
        assert!(fd_dm.resolve().is_err());
    }

    #[test]
    fn resolved_config_is_fully_populated() {
        let c = preset("table2-4q").unwrap().resolve().unwrap().to_config();
        let obj = c.params.as_object().unwrap();
        for key in ["Q4_sq", "k", "c", "Lambda8"] {
            assert!(obj.contains_key(key), "{key}");
        }
    }
}
