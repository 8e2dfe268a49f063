//! Artifact bundles and the run manifest.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// Everything a command produces. Files are written only after the command
/// finished computing, so a failing run leaves no partial output.
#[derive(Default)]
pub struct Bundle {
    pub files: Vec<Artifact>,
    /// Printed to stdout.
    pub summary: String,
    /// Per-criterion failures; a non-empty list turns into exit status 1.
    pub failures: Vec<String>,
}

impl Bundle {
    pub fn add(&mut self, name: impl Into<String>, text: impl Into<String>) {
        self.files.push(Artifact { name: name.into(), bytes: text.into().into_bytes() });
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.summary.push_str(s.as_ref());
        self.summary.push('\n');
    }
}

#[derive(Serialize)]
pub struct OutputEntry {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
    pub wall_time_s: f64,
    pub outputs: Vec<OutputEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn out_dir(flag: &Path) -> PathBuf {
    match std::env::var_os("SPECTRA_LAB_OUT") {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => flag.to_path_buf(),
    }
}

/// Writes the bundle files and manifest.json into `dir`.
pub fn write_bundle(dir: &Path, bundle: &Bundle, mut manifest: RunManifest) -> Result<PathBuf, CliError> {
    let io = |e: std::io::Error| CliError::io(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    for a in &bundle.files {
        std::fs::write(dir.join(&a.name), &a.bytes).map_err(io)?;
        manifest.outputs.push(OutputEntry { path: a.name.clone(), bytes: a.bytes.len(), sha256: sha256_hex(&a.bytes) });
    }
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(io)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
