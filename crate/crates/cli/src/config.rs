//! Experiment configuration files (JSON).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub plant: PlantConfig,
    pub chain: ChainConfig,
    pub initial: InitialConfig,
    pub horizons: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_dt: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub debug: Option<DebugConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantConfig {
    pub alpha: [f64; 2],
}

/// Either `mu`, or `mu_1` with `kappas`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub plant: [f64; 2],
    pub observer: ObserverInit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObserverInit {
    Values(Vec<f64>),
    Keyword(ObserverKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObserverKeyword {
    Steady,
    Zero,
}

/// Non-physical overrides for demonstrations.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DebugConfig {
    /// Detunings used instead of `ω_i = μ_i + μ_{i+1}`, `ω_N = μ_N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_override: Option<Vec<f64>>,
}

/// Chain in the form the core crate consumes.
#[derive(Debug, Clone, PartialEq)]
pub enum ChainSpec {
    Gains(Vec<f64>),
    Cavities { mu_1: f64, kappas: Vec<f64> },
}

fn schema(path: &str, message: impl Into<String>) -> CliError {
    CliError::Schema { path: path.to_string(), message: message.into() }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            schema(if path.is_empty() { "." } else { &path }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn chain_spec(&self) -> Result<ChainSpec, CliError> {
        match (&self.chain.mu, self.chain.mu_1, &self.chain.kappas) {
            (Some(mu), None, None) => Ok(ChainSpec::Gains(mu.clone())),
            (None, Some(mu_1), Some(kappas)) => Ok(ChainSpec::Cavities { mu_1, kappas: kappas.clone() }),
            (Some(_), _, _) => Err(schema("chain", "give either `mu` or `mu_1` with `kappas`, not both")),
            (None, Some(_), None) => Err(schema("chain.kappas", "`mu_1` requires `kappas`")),
            (None, None, Some(_)) => Err(schema("chain.mu_1", "`kappas` requires `mu_1`")),
            (None, None, None) => Err(schema("chain", "missing `mu` or `mu_1` with `kappas`")),
        }
    }

    /// Number of observer elements implied by the chain description.
    pub fn n(&self) -> Result<usize, CliError> {
        Ok(match self.chain_spec()? {
            ChainSpec::Gains(mu) => mu.len(),
            ChainSpec::Cavities { kappas, .. } => kappas.len() / 2 + 1,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let finite = |path: &str, vals: &[f64]| {
            if vals.iter().all(|v| v.is_finite()) {
                Ok(())
            } else {
                Err(schema(path, "values must be finite"))
            }
        };
        finite("plant.alpha", &self.plant.alpha)?;
        finite("initial.plant", &self.initial.plant)?;
        match self.chain_spec()? {
            ChainSpec::Gains(mu) => {
                if mu.is_empty() {
                    return Err(schema("chain.mu", "at least one gain is required"));
                }
                finite("chain.mu", &mu)?;
            }
            ChainSpec::Cavities { mu_1, kappas } => {
                finite("chain.mu_1", &[mu_1])?;
                finite("chain.kappas", &kappas)?;
                if !kappas.len().is_multiple_of(2) {
                    return Err(schema("chain.kappas", format!("expected 2(N−1) entries, got {}", kappas.len())));
                }
            }
        }
        let n = self.n()?;
        if let ObserverInit::Values(v) = &self.initial.observer {
            if v.len() != 2 * n {
                return Err(schema(
                    "initial.observer",
                    format!("expected {} values for {n} elements, got {}", 2 * n, v.len()),
                ));
            }
            finite("initial.observer", v)?;
        }
        if self.horizons.is_empty() {
            return Err(schema("horizons", "at least one horizon is required"));
        }
        if self.horizons.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(schema("horizons", "horizons must be positive and finite"));
        }
        if self.horizons.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(schema("horizons", "horizons must be strictly increasing"));
        }
        if let Some(dt) = self.sample_dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(schema("sample_dt", "must be positive"));
            }
        }
        if let Some(omega) = self.debug.as_ref().and_then(|d| d.omega_override.as_ref()) {
            if omega.len() != n {
                return Err(schema("debug.omega_override", format!("expected {n} detunings, got {}", omega.len())));
            }
            finite("debug.omega_override", omega)?;
        }
        Ok(())
    }
}
