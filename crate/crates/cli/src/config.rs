//! TOML run configurations with `key=value` overrides.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use jjsim_core::holstein::{HolsteinSpec, RampPath, RampSchedule};
use jjsim_core::models::Boundary;
use jjsim_core::modes::Topology;
use jjsim_core::qed::{QedSpec, DEFAULT_FOCK_CUTOFF};

use crate::error::CliError;

/// Reads a TOML file and applies dotted-key overrides such as `ramp.steps=400`.
pub fn load_table(path: &Path, overrides: &[String]) -> Result<toml::Table, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Schema(format!("{}: {e}", path.display())))?;
    for item in overrides {
        apply_override(&mut table, item)?;
    }
    Ok(table)
}

fn parse_value(raw: &str) -> toml::Value {
    match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key inserted above"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

pub fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("override `{item}` is not of the form key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Usage(format!("override key `{key}` is malformed")));
    }
    let mut node = table;
    for part in &path[..path.len() - 1] {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Schema(format!("override `{key}`: `{part}` is not a table")))?;
    }
    node.insert(path[path.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

/// Deserializes a table, turning serde errors into schema diagnostics.
pub fn parse<T: DeserializeOwned>(table: toml::Table, what: &str) -> Result<T, CliError> {
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Schema(format!("{what} config: {}", e.message())))
}

fn default_bias() -> f64 {
    0.0
}
fn default_critical_current() -> f64 {
    0.5e-6
}
fn default_capacitance() -> f64 {
    1e-12
}
fn default_margin() -> f64 {
    10.0
}
fn default_topology() -> Topology {
    Topology::Chain
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesConfig {
    #[serde(default = "default_topology")]
    pub topology: Topology,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(default = "default_bias")]
    pub bias: f64,
    /// Vertical junction I_c in A.
    #[serde(default = "default_critical_current")]
    pub critical_current: f64,
    /// Vertical junction capacitance in F.
    #[serde(default = "default_capacitance")]
    pub capacitance: f64,
    /// Half-width of the uniform spread of vertical multipliers.
    #[serde(default)]
    pub disorder: f64,
    /// Qubit coupling in units of ω_p; enables the cavity-quality report.
    #[serde(default)]
    pub coupling_over_omega_p: Option<f64>,
    #[serde(default = "default_margin")]
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub t_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectroscopyConfig {
    pub detuning_min: f64,
    pub detuning_max: f64,
    pub points: usize,
}

fn default_fock() -> usize {
    DEFAULT_FOCK_CUTOFF
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QedConfig {
    pub qubit_bz: f64,
    #[serde(default)]
    pub qubit_bx: f64,
    pub resonator_freq: f64,
    pub coupling_g: f64,
    #[serde(default = "default_fock")]
    pub fock_cutoff: usize,
    /// Defaults to two vacuum Rabi periods sampled at 1000 points.
    #[serde(default)]
    pub trajectory: Option<TrajectoryConfig>,
    /// Defaults to ±10g around resonance at 201 points.
    #[serde(default)]
    pub spectroscopy: Option<SpectroscopyConfig>,
}

impl QedConfig {
    pub fn spec(&self) -> QedSpec {
        QedSpec {
            qubit_bz: self.qubit_bz,
            qubit_bx: self.qubit_bx,
            resonator_freq: self.resonator_freq,
            coupling_g: self.coupling_g,
            fock_cutoff: self.fock_cutoff,
        }
    }

    /// Fills in the optional sections so the manifest records what ran.
    pub fn resolved(mut self) -> Self {
        let g = self.coupling_g.abs();
        let g = if g > 0.0 { g } else { 1.0 };
        self.trajectory.get_or_insert(TrajectoryConfig {
            t_max: 2.0 * std::f64::consts::PI / g,
            points: 1000,
        });
        self.spectroscopy.get_or_insert(SpectroscopyConfig {
            detuning_min: -10.0 * g,
            detuning_max: 10.0 * g,
            points: 201,
        });
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RampConfig {
    pub total_time: f64,
    pub steps: usize,
    #[serde(default)]
    pub path: RampPath,
    #[serde(default)]
    pub preparation_field: f64,
}

impl From<RampConfig> for RampSchedule {
    fn from(r: RampConfig) -> Self {
        RampSchedule {
            total_time: r.total_time,
            steps: r.steps,
            path: r.path,
            preparation_field: r.preparation_field,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub g_over_omega: Vec<f64>,
    pub t_over_omega: Vec<f64>,
}

fn default_states() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolsteinConfig {
    #[serde(rename = "N")]
    pub n: usize,
    pub hopping: f64,
    pub phonon_freq: f64,
    pub coupling: f64,
    pub phonon_cutoff: usize,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default)]
    pub anharmonic: f64,
    #[serde(default)]
    pub chemical_bz: f64,
    #[serde(default)]
    pub leakage_bx: f64,
    /// Fermion count, N/2 when absent.
    #[serde(default)]
    pub filling: Option<usize>,
    /// Number of sector eigenpairs reported by `ground`.
    #[serde(default = "default_states")]
    pub states: usize,
    #[serde(default)]
    pub ramp: Option<RampConfig>,
    #[serde(default)]
    pub scan: Option<ScanConfig>,
}

impl HolsteinConfig {
    pub fn spec(&self) -> HolsteinSpec {
        HolsteinSpec {
            n_sites: self.n,
            hopping: self.hopping,
            phonon_freq: self.phonon_freq,
            coupling: self.coupling,
            boundary: self.boundary,
            phonon_cutoff: self.phonon_cutoff,
            anharmonic: self.anharmonic,
            chemical_bz: self.chemical_bz,
            leakage_bx: self.leakage_bx,
            filling: self.filling,
        }
    }

    pub fn resolved(mut self) -> Self {
        self.filling.get_or_insert(self.n / 2);
        self
    }
}
