//! TOML run configuration.
//!
//! Rates and frequencies are in rad/s, times in seconds; `eta`, `eta_L`,
//! phases, `r_max`, `beta` and the truncations are dimensionless.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use ioncav::experiments::Engine;
use ioncav::model::{EffectiveRegime, SystemParams};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("unknown key `{key}`{}", .suggestion.as_ref().map(|s| format!(" (did you mean `{s}`?)")).unwrap_or_default())]
    UnknownKey {
        key: String,
        suggestion: Option<String>,
    },
    #[error("missing key `{key}` required by `{experiment}`")]
    Missing { key: String, experiment: Experiment },
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("config names experiment `{file}` but `{cli}` was requested")]
    ExperimentMismatch { file: Experiment, cli: Experiment },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Params,
    Evolve,
    Regimes,
    Squeeze,
    Filter,
    Semiclassical,
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = serde_json::to_value(self).expect("unit enum");
        f.write_str(s.as_str().expect("string tag"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexInput {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexInput {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexInput::Real(x) => Complex64::new(x, 0.0),
            ComplexInput::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Auto {
    Auto,
}

/// A fixed detuning, or `"auto"` to let the experiment tune it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaInput {
    Value(f64),
    Auto(Auto),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(default)]
    pub omega: f64,
    pub nu: f64,
    pub delta: DeltaInput,
    #[serde(rename = "Delta")]
    pub big_delta: f64,
    pub lambda1: ComplexInput,
    pub lambda2: ComplexInput,
    #[serde(rename = "Omega_abs")]
    pub omega_abs: f64,
    #[serde(default)]
    pub phi_drive: f64,
    pub eta: f64,
    #[serde(rename = "eta_L", default)]
    pub eta_l: f64,
    #[serde(default)]
    pub varphi: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSection {
    #[serde(rename = "N_cav", skip_serializing_if = "Option::is_none")]
    pub n_cav: Option<usize>,
    #[serde(rename = "N_vib", skip_serializing_if = "Option::is_none")]
    pub n_vib: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectiveSection {
    /// Table to use; derived from the validity check when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<EffectiveRegime>,
    /// Accept a regime the validity check disagrees with.
    #[serde(rename = "override", default)]
    pub allow_override: bool,
    /// Reverse the sign of the weak-table `ξ_ii`.
    #[serde(default)]
    pub dressed_xi_sign: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_ii: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_ii: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_ii: Option<ComplexInput>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<Engine>,
    /// Coherent cavity amplitude for `squeeze`; vacuum when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cavity_alpha: Option<ComplexInput>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m_target: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<ComplexInput>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<ComplexInput>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    pub system: SystemSection,
    #[serde(default)]
    pub truncation: TruncationSection,
    #[serde(default)]
    pub effective: EffectiveSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub output: OutputSection,
}

const SECTIONS: &[(&str, &[&str])] = &[
    (
        "system",
        &[
            "omega",
            "nu",
            "delta",
            "Delta",
            "lambda1",
            "lambda2",
            "Omega_abs",
            "phi_drive",
            "eta",
            "eta_L",
            "varphi",
        ],
    ),
    ("truncation", &["N_cav", "N_vib"]),
    (
        "effective",
        &[
            "regime",
            "override",
            "dressed_xi_sign",
            "omega_ii",
            "chi_ii",
            "xi_ii",
        ],
    ),
    (
        "run",
        &[
            "t_final",
            "samples",
            "engine",
            "cavity_alpha",
            "M",
            "beta",
            "n_threshold",
            "delta_list",
            "m_max",
            "betas",
            "r_max",
        ],
    ),
    ("output", &["path", "format"]),
];

/// Keys whose values are integers; sweeps round onto them.
pub const INTEGER_KEYS: &[&str] = &["N_cav", "N_vib", "samples", "M", "m_max"];

fn suggest(word: &str, candidates: impl IntoIterator<Item = String>) -> Option<String> {
    candidates
        .into_iter()
        .map(|c| (strsim::normalized_damerau_levenshtein(word, &c), c))
        .filter(|(score, _)| *score >= 0.6)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, c)| c)
}

fn all_keys() -> impl Iterator<Item = String> {
    SECTIONS
        .iter()
        .flat_map(|(s, keys)| keys.iter().map(move |k| format!("{s}.{k}")))
}

/// Reject unknown sections and keys, suggesting the closest known name.
fn check_keys(table: &toml::Table) -> Result<(), ConfigError> {
    for (name, value) in table {
        if name == "experiment" {
            continue;
        }
        let Some((_, keys)) = SECTIONS.iter().find(|(s, _)| s == name) else {
            let top = SECTIONS
                .iter()
                .map(|(s, _)| s.to_string())
                .chain(std::iter::once("experiment".to_string()));
            return Err(ConfigError::UnknownKey {
                key: name.clone(),
                suggestion: suggest(name, top).or_else(|| suggest(name, all_keys())),
            });
        };
        let toml::Value::Table(inner) = value else {
            return Err(ConfigError::Invalid {
                key: name.clone(),
                reason: "expected a table".into(),
            });
        };
        for key in inner.keys() {
            if keys.contains(&key.as_str()) {
                continue;
            }
            let local = suggest(key, keys.iter().map(|k| k.to_string()));
            let suggestion = local.or_else(|| {
                SECTIONS
                    .iter()
                    .find(|(_, ks)| ks.contains(&key.as_str()))
                    .map(|(s, _)| format!("{s}.{key}"))
            });
            return Err(ConfigError::UnknownKey {
                key: format!("{name}.{key}"),
                suggestion,
            });
        }
    }
    Ok(())
}

/// Parsed configuration plus non-fatal warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub config: RunConfig,
    pub warnings: Vec<String>,
}

pub fn parse_table(text: &str) -> Result<toml::Table, ConfigError> {
    text.parse::<toml::Table>()
        .map_err(|e| ConfigError::Parse(e.message().to_string()))
}

pub fn parse_config(text: &str) -> Result<Parsed, ConfigError> {
    from_table(parse_table(text)?)
}

pub fn from_table(table: toml::Table) -> Result<Parsed, ConfigError> {
    check_keys(&table)?;
    let config: RunConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.message().to_string()))?;
    let warnings = config.validate()?;
    Ok(Parsed { config, warnings })
}

pub fn to_toml(cfg: &RunConfig) -> String {
    toml::to_string(cfg).expect("config serializes")
}

impl RunConfig {
    fn validate(&self) -> Result<Vec<String>, ConfigError> {
        let mut warnings = self
            .system_params(0.0)
            .validate()
            .map_err(|e| invalid("system", e.to_string()))?;
        for (key, n) in [
            ("truncation.N_cav", self.truncation.n_cav),
            ("truncation.N_vib", self.truncation.n_vib),
        ] {
            if let Some(n) = n {
                if n < 2 {
                    return Err(invalid(
                        key,
                        format!("dimension must be at least 2, got {n}"),
                    ));
                }
            }
        }
        let s = &self.system;
        let mut rates = vec![
            ("system.omega", s.omega),
            ("system.nu", s.nu),
            ("system.Delta", s.big_delta),
            ("system.Omega_abs", s.omega_abs),
            ("system.lambda1", s.lambda1.value().norm()),
            ("system.lambda2", s.lambda2.value().norm()),
        ];
        if let DeltaInput::Value(d) = s.delta {
            rates.push(("system.delta", d));
        }
        for (key, x) in rates {
            if x != 0.0 && x.abs() < 1.0 {
                warnings.push(format!(
                    "{key} = {x} is below 1 rad/s; rates are expected in rad/s"
                ));
            }
        }
        if let Some(t) = self.run.t_final {
            if t.is_nan() || t < 0.0 {
                return Err(invalid("run.t_final", format!("must be >= 0, got {t}")));
            }
        }
        if self.effective.regime == Some(EffectiveRegime::Manual)
            && self.effective.omega_ii.is_none()
        {
            return Err(invalid(
                "effective.omega_ii",
                "required when regime = \"manual\"".into(),
            ));
        }
        Ok(warnings)
    }

    /// Physical parameters with `"auto"` detuning replaced by `auto_delta`.
    pub fn system_params(&self, auto_delta: f64) -> SystemParams {
        let s = &self.system;
        SystemParams {
            omega: s.omega,
            nu: s.nu,
            delta: match s.delta {
                DeltaInput::Value(d) => d,
                DeltaInput::Auto(_) => auto_delta,
            },
            big_delta: s.big_delta,
            lambda1: s.lambda1.value(),
            lambda2: s.lambda2.value(),
            omega_abs: s.omega_abs,
            phi_drive: s.phi_drive,
            eta: s.eta,
            eta_l: s.eta_l,
            varphi: s.varphi,
        }
    }

    pub fn delta_is_auto(&self) -> bool {
        matches!(self.system.delta, DeltaInput::Auto(_))
    }

    pub fn require<T: Copy>(
        &self,
        experiment: Experiment,
        key: &str,
        value: Option<T>,
    ) -> Result<T, ConfigError> {
        value.ok_or_else(|| ConfigError::Missing {
            key: key.to_string(),
            experiment,
        })
    }
}

fn invalid(key: &str, reason: String) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason,
    }
}
