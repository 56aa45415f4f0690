//! Run records: config digest, timestamps, per-task summary, file manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub experiment_id: String,
    pub config_digest: String,
    pub tool_version: String,
    pub task: String,
    pub started: String,
    pub finished: String,
    pub summary: serde_json::Value,
    pub manifest: Vec<ManifestEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Collects written files into a deterministic manifest (sorted by path).
pub struct OutputWriter {
    dir: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl OutputWriter {
    pub fn new(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(OutputWriter {
            dir: dir.to_path_buf(),
            entries: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, body: &str) -> std::io::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, body)?;
        self.entries.push(ManifestEntry {
            path: name.to_string(),
            sha256: sha256_hex(body.as_bytes()),
            bytes: body.len() as u64,
        });
        Ok(())
    }

    pub fn into_manifest(mut self) -> Vec<ManifestEntry> {
        self.entries.sort_by(|a, b| a.path.cmp(&b.path));
        self.entries
    }
}
