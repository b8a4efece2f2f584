//! Run manifests written next to output files.

use std::path::{Path, PathBuf};

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// Full argument vector, program name excluded; replaying it reproduces
    /// the output byte for byte.
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub duration_secs: f64,
}

/// `<file>.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn write(manifest: &RunManifest, output: &Path) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(manifest).map_err(std::io::Error::other)?;
    std::fs::write(manifest_path(output), text + "\n")
}
