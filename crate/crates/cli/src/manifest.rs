//! The JSON record written next to every run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use osccomp_core::{Divergence, RunAggregates};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.toml";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub library_version: String,
    pub wall_clock_seconds: f64,
    /// Stored rows and the stride between them.
    pub rows: usize,
    pub thin: usize,
    pub diverged: bool,
    pub divergence: Option<Divergence>,
    pub aggregates: Option<RunAggregates>,
    /// Artifact name to path, relative to the manifest's directory.
    pub artifacts: BTreeMap<String, String>,
}

impl Manifest {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let m: Self = serde_json::from_str(&text).map_err(|e| CliError::io(path, e))?;
        m.config.validate().map_err(|e| e.context(path.display()))?;
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifests serialize");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))
    }

    /// Absolute location of an artifact, if recorded.
    pub fn artifact(&self, dir: &Path, name: &str) -> Option<PathBuf> {
        self.artifacts.get(name).map(|rel| dir.join(rel))
    }
}

/// Directory holding a manifest.
pub fn run_dir(manifest_path: &Path) -> PathBuf {
    match manifest_path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}
