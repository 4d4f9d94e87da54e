use std::collections::BTreeMap;
use std::io;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

pub const SEED_SCHEME: &str = "splitmix64 fold: h = sm(master); for part in tuple: h = sm(h ^ sm(part)); \
networks (1, n, replicate), trial blocks of 16384 (2, n, rule tag, replicate, block), \
rule tag = f64 bits of beta or u64::MAX for uniform; box orderings (3, l_B, ordering)";

/// Everything needed to regenerate a run's outputs: the effective
/// configuration (including command-line overrides), the tool version and the
/// seed scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub seed: u64,
    pub seed_scheme: String,
    pub config: BTreeMap<String, String>,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: Vec<String>,
    pub points: Vec<PointStatus>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointStatus {
    pub n: usize,
    pub beta: Option<f64>,
    pub replicate: Option<usize>,
    pub status: String,
    pub message: Option<String>,
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, config: BTreeMap<String, String>) -> Self {
        Self {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            seed_scheme: SEED_SCHEME.to_string(),
            config,
            started_unix: unix_now(),
            finished_unix: 0,
            outputs: Vec::new(),
            points: Vec::new(),
        }
    }

    pub fn write(&mut self, dir: &Path) -> io::Result<()> {
        self.finished_unix = unix_now();
        let text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        std::fs::write(dir.join("manifest.json"), text + "\n")
    }
}
