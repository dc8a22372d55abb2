//! Experiment configs: TOML files naming one experiment with its parameters,
//! and the runner turning a config into a [`RunRecord`].

use crate::experiment::{Experiment, RunContext};
use crate::output::RunRecord;
use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

/// Where to write the JSON record and the CSV breakdown.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

/// A complete, reproducible description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub seed: u64,
    pub output: Option<OutputPaths>,
    pub experiment: Experiment,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig { tolerance: DEFAULT_TOLERANCE, seed: 0, output: None, experiment }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Parses TOML text; unknown keys and malformed values are errors that
    /// name the offending key.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| anyhow::anyhow!("invalid config: {}", e.to_string().trim_end()))
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()?).with_context(|| format!("writing {}", path.display()))
    }

    /// Hex SHA-256 of the canonical TOML rendering.
    pub fn sha256(&self) -> Result<String> {
        let digest = Sha256::digest(self.to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}

/// Runs the experiment and writes any requested outputs.
pub fn run(config: &ExperimentConfig) -> Result<RunRecord> {
    let ctx = RunContext::new(config.tolerance, config.seed);
    let name = config.experiment.name();
    let start = Instant::now();
    let outcome = config.experiment.run(&ctx).with_context(|| format!("running `{name}`"))?;
    let record = RunRecord {
        command: name,
        config_sha256: config.sha256()?,
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        pass: outcome.pass,
        payload: outcome.payload,
        table: outcome.table,
    };
    if let Some(out) = &config.output {
        if let Some(path) = &out.json {
            std::fs::write(path, record.to_json()?).with_context(|| format!("writing {}", path.display()))?;
        }
        if let (Some(path), Some(table)) = (&out.csv, &record.table) {
            table.write(path)?;
        }
    }
    Ok(record)
}
