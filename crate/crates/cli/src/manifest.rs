//! Run manifests: what a command read, how it was configured and checksums
//! of what it wrote. Manifests carry no timestamps, so identical runs
//! produce identical manifests.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const MANIFEST_FORMAT: &str = "runmanifest.v1";

#[derive(Debug, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub format: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct OutputRecord {
    /// Relative to the manifest's directory.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub format: &'static str,
    pub command: String,
    pub toolkit_version: &'static str,
    pub inputs: Vec<InputRecord>,
    pub config: Value,
    pub seed: Option<u64>,
    pub outputs: Vec<OutputRecord>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Collects inputs and outputs while a command runs, then writes them out.
pub struct Recorder {
    manifest: Manifest,
    path: PathBuf,
}

impl Recorder {
    /// `path` is where the manifest itself will be written.
    pub fn new(command: &str, path: PathBuf, config: Value, seed: Option<u64>) -> Self {
        Recorder {
            manifest: Manifest {
                format: MANIFEST_FORMAT,
                command: command.to_string(),
                toolkit_version: env!("CARGO_PKG_VERSION"),
                inputs: Vec::new(),
                config,
                seed,
                outputs: Vec::new(),
            },
            path,
        }
    }

    pub fn input(&mut self, path: &Path, format: &str) -> Result<(), CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.input_bytes(path, format, &bytes);
        Ok(())
    }

    pub fn input_bytes(&mut self, path: &Path, format: &str, bytes: &[u8]) {
        self.manifest.inputs.push(InputRecord {
            path: path.display().to_string(),
            format: format.to_string(),
            sha256: sha256_hex(bytes),
        });
    }

    /// Writes `contents` to `path` and records its checksum.
    pub fn write(&mut self, path: &Path, contents: &str) -> Result<(), CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        std::fs::write(path, contents).map_err(|e| CliError::io(path, e))?;
        let base = self.path.parent().unwrap_or(Path::new(""));
        let rel = path.strip_prefix(base).unwrap_or(path);
        self.manifest.outputs.push(OutputRecord { path: rel.display().to_string(), sha256: sha256_hex(contents.as_bytes()) });
        Ok(())
    }

    pub fn finish(self) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&self.path, text).map_err(|e| CliError::io(&self.path, e))?;
        Ok(self.path)
    }
}

/// `<file>.manifest.json` next to a single-file output.
pub fn beside(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}
