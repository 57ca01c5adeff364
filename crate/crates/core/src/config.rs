//! Run configuration: a JSON document plus command-line overrides.
//!
//! Defaults describe the reference apparatus: on/off detection efficiency
//! 0.55, displacement visibility 0.996, homodyne efficiency 0.858 with 0.005
//! shot-noise units of excess noise, and an auxiliary oscillator of
//! `|γ|² = 24.7`.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::experiments::{linspace, AmplitudeMode, DisplacementPolicy, Engine, Receiver};
use crate::receivers::DetectorModel;
use crate::sim::{HomodyneModel, SimOptions, DEFAULT_CHUNK_SIZE};

/// A configuration problem, attributed to the offending key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.key.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "`{}`: {}", self.key, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

/// Either an explicit list or an evenly spaced grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Values(Vec<f64>),
    Linspace { start: f64, stop: f64, points: usize },
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            GridSpec::Values(v) => v.clone(),
            GridSpec::Linspace {
                start,
                stop,
                points,
            } => linspace(*start, *stop, *points),
        }
    }

    fn validate(&self, key: &str) -> Result<(), ConfigError> {
        let values = self.values();
        if values.is_empty() {
            return Err(ConfigError::new(key, "grid is empty"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(ConfigError::new(key, format!("grid value {v} is not a finite non-negative number")));
        }
        Ok(())
    }
}

/// On/off detector section; missing keys take the apparatus values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub eta: f64,
    pub nu: f64,
    pub xi: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            eta: 0.55,
            nu: 0.0,
            xi: 0.996,
        }
    }
}

impl From<DetectorConfig> for DetectorModel {
    fn from(c: DetectorConfig) -> Self {
        DetectorModel {
            eta: c.eta,
            nu: c.nu,
            xi: c.xi,
        }
    }
}

/// Homodyne detector section; missing keys take the apparatus values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HomodyneConfig {
    pub efficiency: f64,
    pub excess_noise: f64,
}

impl Default for HomodyneConfig {
    fn default() -> Self {
        Self {
            efficiency: 0.858,
            excess_noise: 0.005,
        }
    }
}

impl From<HomodyneConfig> for HomodyneModel {
    fn from(c: HomodyneConfig) -> Self {
        HomodyneModel {
            efficiency: c.efficiency,
            excess_noise: c.excess_noise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Optimize,
    FixedGamma,
    FixedBeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisplacementConfig {
    pub policy: PolicyKind,
    /// Beam-splitter transmittance for the `optimize` and `fixed_beta` policies.
    pub transmittance: f64,
    /// Displacement for the `fixed_beta` policy.
    pub beta: Option<f64>,
    /// Auxiliary-oscillator power `|γ|²` for the `fixed_gamma` policy.
    pub gamma2: f64,
}

impl Default for DisplacementConfig {
    fn default() -> Self {
        Self {
            policy: PolicyKind::FixedGamma,
            transmittance: 1.0,
            beta: None,
            gamma2: 24.7,
        }
    }
}

impl DisplacementConfig {
    pub fn policy(&self) -> Result<DisplacementPolicy, ConfigError> {
        Ok(match self.policy {
            PolicyKind::Optimize => DisplacementPolicy::Optimize {
                transmittance: self.transmittance,
            },
            PolicyKind::FixedGamma => DisplacementPolicy::FixedGamma {
                gamma: self.gamma2.sqrt(),
            },
            PolicyKind::FixedBeta => DisplacementPolicy::FixedBeta {
                beta: self.beta.ok_or_else(|| {
                    ConfigError::new("displacement.beta", "required by the fixed_beta policy")
                })?,
                transmittance: self.transmittance,
            },
        })
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if !(self.transmittance > 0.0 && self.transmittance <= 1.0) {
            return Err(ConfigError::new(
                "displacement.transmittance",
                format!("{} is outside (0, 1]", self.transmittance),
            ));
        }
        if let Some(beta) = self.beta {
            if !(beta.is_finite() && beta >= 0.0) {
                return Err(ConfigError::new("displacement.beta", format!("{beta} is negative or not finite")));
            }
        }
        if !(self.gamma2.is_finite() && self.gamma2 > 0.0) {
            return Err(ConfigError::new("displacement.gamma2", format!("{} must be positive", self.gamma2)));
        }
        self.policy().map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrossoverConfig {
    pub a: Receiver,
    pub b: Receiver,
    /// Bracket on `|α|²`.
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

impl Default for CrossoverConfig {
    fn default() -> Self {
        Self {
            a: Receiver::Kennedy,
            b: Receiver::Homodyne,
            lo: 0.01,
            hi: 2.0,
            tol: crate::experiments::CROSSOVER_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Mean photon number for single-amplitude commands.
    pub alpha2: f64,
    pub alpha2_grid: GridSpec,
    /// `|β|²` grid; defaults to 50 points on `[0, 4·max(0.25, |α|²)]`.
    pub beta2_grid: Option<GridSpec>,
    pub gamma2_grid: GridSpec,
    pub detector: DetectorConfig,
    pub homodyne: HomodyneConfig,
    pub displacement: DisplacementConfig,
    pub receivers: Vec<Receiver>,
    pub engine: Engine,
    pub mode: AmplitudeMode,
    pub trials: u64,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub chunk_size: usize,
    pub crossover: CrossoverConfig,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha2: 0.16,
            alpha2_grid: GridSpec::Linspace {
                start: 0.0,
                stop: 2.0,
                points: 81,
            },
            beta2_grid: None,
            gamma2_grid: GridSpec::Values(vec![
                0.5, 1.0, 2.0, 5.0, 10.0, 24.7, 50.0, 100.0, 200.0, 500.0, 1000.0,
            ]),
            detector: DetectorConfig::default(),
            homodyne: HomodyneConfig::default(),
            displacement: DisplacementConfig::default(),
            receivers: Receiver::ALL.to_vec(),
            engine: Engine::Analytic,
            mode: AmplitudeMode::Ideal,
            trials: 10_000,
            seed: None,
            workers: None,
            chunk_size: DEFAULT_CHUNK_SIZE,
            crossover: CrossoverConfig::default(),
            out: None,
            format: Format::Csv,
        }
    }
}

impl RunConfig {
    /// Parses a JSON document; errors name the offending key.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            let key = if key == "." { String::new() } else { key };
            ConfigError::new(key, e.into_inner().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn beta2_values(&self) -> Vec<f64> {
        match &self.beta2_grid {
            Some(g) => g.values(),
            None => linspace(0.0, 4.0 * self.alpha2.max(0.25), 50),
        }
    }

    pub fn detector_model(&self) -> DetectorModel {
        self.detector.into()
    }

    pub fn homodyne_model(&self) -> HomodyneModel {
        self.homodyne.into()
    }

    pub fn sim_options(&self) -> SimOptions {
        SimOptions {
            chunk_size: self.chunk_size,
            workers: self.workers,
        }
    }

    /// Seed for Monte Carlo runs; mandatory whenever one is requested.
    pub fn require_seed(&self) -> Result<u64, ConfigError> {
        self.seed
            .ok_or_else(|| ConfigError::new("seed", "a seed is required for Monte Carlo runs"))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.alpha2.is_finite() && self.alpha2 >= 0.0) {
            return Err(ConfigError::new("alpha2", format!("{} is not a finite non-negative number", self.alpha2)));
        }
        self.alpha2_grid.validate("alpha2_grid")?;
        if let Some(g) = &self.beta2_grid {
            g.validate("beta2_grid")?;
        }
        self.gamma2_grid.validate("gamma2_grid")?;
        self.detector_model().validate().map_err(|e| domain_key("detector", e))?;
        self.homodyne_model().validate().map_err(|e| domain_key("homodyne", e))?;
        self.displacement.validate()?;
        if self.trials == 0 {
            return Err(ConfigError::new("trials", "at least one trial is required"));
        }
        if self.chunk_size == 0 {
            return Err(ConfigError::new("chunk_size", "must be positive"));
        }
        if self.workers == Some(0) {
            return Err(ConfigError::new("workers", "must be positive"));
        }
        if self.engine.montecarlo() {
            self.require_seed()?;
        }
        Ok(())
    }
}

fn domain_key(prefix: &str, err: crate::Error) -> ConfigError {
    match err {
        crate::Error::Domain { name, value, reason } => {
            ConfigError::new(format!("{prefix}.{name}"), format!("{value}: {reason}"))
        }
        other => ConfigError::new(prefix, other.to_string()),
    }
}
