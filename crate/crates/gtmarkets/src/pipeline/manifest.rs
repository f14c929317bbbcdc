//! Run manifests: content digests of inputs and artifacts.
//!
//! Re-running with identical inputs and config reproduces identical digests
//! for every deterministic artifact; the manifest's own timestamp is the
//! only run-specific field.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::gtrends::write_atomic;

/// Snapshot of one pipeline run.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub created_at: String,
    pub config: serde_json::Value,
    /// Input path -> sha256, sorted by path.
    pub inputs: BTreeMap<String, String>,
    /// Artifact path (relative to the output directory) -> sha256.
    pub artifacts: BTreeMap<String, String>,
    pub failures: Vec<String>,
}

impl RunManifest {
    pub fn new(config: serde_json::Value) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            created_at: chrono::Utc::now().to_rfc3339(),
            config,
            inputs: BTreeMap::new(),
            artifacts: BTreeMap::new(),
            failures: Vec::new(),
        }
    }

    pub fn record_input(&mut self, path: &Path) -> Result<()> {
        self.inputs
            .insert(path.display().to_string(), sha256_file(path)?);
        Ok(())
    }

    /// Record an artifact digest under its path relative to `root`.
    pub fn record_artifact(&mut self, root: &Path, path: &Path) -> Result<()> {
        let relative = path.strip_prefix(root).unwrap_or(path);
        self.artifacts
            .insert(relative.display().to_string(), sha256_file(path)?);
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_string_pretty(self)?;
        write_atomic(path, body.as_bytes())
    }
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(sha256_bytes(&std::fs::read(path)?))
}
