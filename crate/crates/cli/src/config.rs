// SPDX-License-Identifier: Apache-2.0

//! TOML run configuration. Unknown sections and keys are rejected.

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub hilbert: Option<HilbertSection>,
    pub generator: Option<GeneratorSection>,
    pub gas: Option<GasSection>,
    pub tmatrix: Option<TMatrixSection>,
    pub state: Option<StateSection>,
    pub integrator: Option<IntegratorSection>,
    pub fp: Option<FpSection>,
    pub dsf: Option<DsfSection>,
    pub compare: Option<CompareSection>,
    pub output: Option<OutputSection>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HilbertSection {
    pub dim: Option<usize>,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub omega_basis: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKindKey {
    Unitary,
    CaldeiraLeggett,
    Bilinear,
    MinimalQbm,
    BoltzmannCollision,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    #[default]
    Free,
    Harmonic,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSection {
    pub kind: GeneratorKindKey,
    #[serde(default)]
    pub potential: Potential,
    pub omega_trap: Option<f64>,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub d_pp: Option<f64>,
    pub d_xx: Option<f64>,
    pub d_xp: Option<f64>,
    pub mu: Option<f64>,
    pub fugacity: Option<f64>,
    pub q_max: Option<f64>,
    pub q_nodes: Option<usize>,
}

impl GeneratorSection {
    /// Keys that are set, by name.
    fn present(&self) -> Vec<&'static str> {
        let opts = [
            ("omega_trap", self.omega_trap.is_some()),
            ("gamma", self.gamma.is_some()),
            ("beta", self.beta.is_some()),
            ("d_pp", self.d_pp.is_some()),
            ("d_xx", self.d_xx.is_some()),
            ("d_xp", self.d_xp.is_some()),
            ("mu", self.mu.is_some()),
            ("fugacity", self.fugacity.is_some()),
            ("q_max", self.q_max.is_some()),
            ("q_nodes", self.q_nodes.is_some()),
        ];
        opts.iter().filter(|(_, set)| *set).map(|(k, _)| *k).collect()
    }

    /// Rejects keys the chosen kind does not read.
    pub fn check_keys(&self) -> Result<(), CliError> {
        let mut allowed: Vec<&str> = match self.kind {
            GeneratorKindKey::Unitary => vec![],
            GeneratorKindKey::CaldeiraLeggett => vec!["gamma", "beta"],
            GeneratorKindKey::Bilinear => vec!["gamma", "mu", "d_pp", "d_xx", "d_xp", "fugacity"],
            GeneratorKindKey::MinimalQbm => vec!["gamma", "d_pp", "beta", "fugacity"],
            GeneratorKindKey::BoltzmannCollision => vec!["fugacity", "q_max", "q_nodes"],
        };
        if self.potential == Potential::Harmonic {
            allowed.push("omega_trap");
        }
        match self.present().into_iter().find(|k| !allowed.contains(k)) {
            Some(k) => Err(CliError::config(format!(
                "generator.{k} is not used by kind {:?} with potential {:?}",
                self.kind, self.potential
            ))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticsKey {
    #[default]
    MaxwellBoltzmann,
    Bose,
    Fermi,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasSection {
    pub beta: f64,
    pub gas_mass: f64,
    #[serde(default = "one")]
    pub fugacity: f64,
    #[serde(default)]
    pub statistics: StatisticsKey,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TMatrixKey {
    Constant,
    Gaussian,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TMatrixSection {
    pub model: TMatrixKey,
    pub t0: f64,
    pub sigma_q: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    #[serde(default)]
    pub mean_x: f64,
    #[serde(default)]
    pub mean_p: f64,
    /// Defaults to the basis oscillator ground-state width.
    pub var_x: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKey {
    Rk45,
    Rk4,
}

fn default_stride() -> usize {
    1
}

fn default_threshold() -> f64 {
    -1e-6
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub method: MethodKey,
    pub t_final: f64,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub dt_init: Option<f64>,
    pub dt: Option<f64>,
    #[serde(default = "default_stride")]
    pub monitor_stride: usize,
    #[serde(default = "default_threshold")]
    pub breach_threshold: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FpInitialKey {
    #[default]
    Gaussian,
    Maxwell,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FpSection {
    pub eta: f64,
    pub d_v: f64,
    pub v_max: f64,
    pub cells: usize,
    pub t_final: f64,
    /// Defaults to half the explicit stability bound.
    pub dt: Option<f64>,
    /// Defaults to about 200 recorded rows.
    pub record_every: Option<usize>,
    #[serde(default)]
    pub initial: FpInitialKey,
    pub mean: Option<f64>,
    pub var: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DsfSection {
    pub q_min: f64,
    pub q_max: f64,
    pub q_points: usize,
    pub e_min: f64,
    pub e_max: f64,
    pub e_points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    pub d_pp: f64,
    pub beta: f64,
    pub fugacity: Option<f64>,
    pub mean_p: Option<f64>,
    pub var_x: Option<f64>,
    pub t_final: Option<f64>,
    pub samples: Option<usize>,
    pub rtol: Option<f64>,
    pub fp_cells: Option<usize>,
    pub fp_width: Option<f64>,
    pub eta_scale: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }
}

/// Unwraps a section the subcommand needs.
pub fn require<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    section
        .as_ref()
        .ok_or_else(|| CliError::config(format!("missing section [{name}]")))
}

/// Unwraps a key the chosen options need.
pub fn need<T: Copy>(value: Option<T>, key: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::config(format!("missing key {key}")))
}
