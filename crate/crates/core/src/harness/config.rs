use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::env::EnvConfig;
use crate::error::{Error, Result};
use crate::hmarl::TrainConfig;
use crate::optimizer::{BruteForce, PolicyKind};

/// Parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Per-EC GOPS budget.
    GTh,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g_th" => Ok(SweepAxis::GTh),
            other => Err(Error::config("sweep.axis", format!("unknown axis `{other}`; supported: g_th"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// One JSON file drives a whole experiment. Every field is optional and
/// unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub env: EnvConfig,
    pub policy: PolicyKind,
    /// Evaluation episodes per seed.
    pub episodes: usize,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub train: TrainConfig,
    pub optimal: BruteForce,
    /// Trained policies for `policy = "hmarl"`. Without one, the policies are
    /// trained first using `train`.
    pub checkpoint: Option<PathBuf>,
    pub sweep: Option<SweepSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            env: EnvConfig::default(),
            policy: PolicyKind::Static(3),
            episodes: 50,
            seeds: vec![0],
            output_dir: PathBuf::from("out"),
            train: TrainConfig::default(),
            optimal: BruteForce::default(),
            checkpoint: None,
            sweep: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        self.train.validate()?;
        if self.episodes == 0 {
            return Err(Error::config("episodes", "must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "must list at least one seed"));
        }
        if let Some(path) = &self.checkpoint {
            if !path.is_file() {
                return Err(Error::config("checkpoint", format!("file {} does not exist", path.display())));
            }
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(Error::config("sweep.values", "must list at least one value"));
            }
            if let Some(v) = s.values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                return Err(Error::config("sweep.values", format!("g_th values must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Canonical JSON form; the basis of [`ExperimentConfig::hash`].
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of the canonical JSON.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

/// Parses JSON text into a validated config. Errors name the offending
/// field by its dotted path.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { "<root>".to_string() } else { path };
        Error::config(field, e.into_inner().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}
