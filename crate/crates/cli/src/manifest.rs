use std::path::Path;

use predprey_core::{nondimensionalize, ModelParams, NondimMap, NondimParams, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::config::{GridSpec, InitialSpec, RunConfig};

pub const MANIFEST_NAME: &str = "run.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dimensionless {
    pub params: NondimParams,
    pub map: NondimMap,
}

/// Exact resolved configuration of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Command-specific selections such as the system, ladder or scan axes.
    pub options: serde_json::Map<String, serde_json::Value>,
    pub model: ModelParams,
    /// Absent for the Holling variant, which has no dimensionless map.
    pub dimensionless: Option<Dimensionless>,
    pub grid: GridSpec,
    pub solver: SolverConfig,
    pub initial: InitialSpec,
    pub seed: u64,
}

impl RunManifest {
    pub fn new(command: &str, cfg: &RunConfig, seed: u64) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            options: serde_json::Map::new(),
            model: cfg.model,
            dimensionless: nondimensionalize(&cfg.model)
                .ok()
                .map(|(params, map)| Dimensionless { params, map }),
            grid: cfg.grid,
            solver: cfg.solver,
            initial: cfg.initial,
            seed,
        }
    }

    pub fn option(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).expect("option values serialize");
        self.options.insert(key.to_string(), v);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Writes `run.json` into `dir`, replacing any earlier manifest.
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::write(dir.join(MANIFEST_NAME), self.to_json() + "\n")
    }

    pub fn read(dir: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(dir.join(MANIFEST_NAME))?;
        Self::from_json(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }
}
