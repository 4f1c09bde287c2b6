use std::fs;
use std::path::Path;
use std::time::Duration;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

/// Everything needed to rerun a command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// The command line as given, for reference. Replay uses `config`.
    pub args: Vec<String>,
    /// Fully resolved settings, including anything read from a config file.
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub wall_time_seconds: f64,
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        args: Vec<String>,
        config: serde_json::Value,
        seed: Option<u64>,
        wall_time: Duration,
    ) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            args,
            config,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_seconds: wall_time.as_secs_f64(),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading manifest {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| data_error(format!("manifest {}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")
            .with_context(|| format!("writing manifest {}", path.display()))
    }
}

pub fn data_error(msg: String) -> anyhow::Error {
    sparse_eb::Error::Data(msg).into()
}
