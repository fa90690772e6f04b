//! Run manifests: every command writes a manifest.json echoing its resolved
//! configuration, results, and content hashes of the emitted data files.
//! Reruns with the same configuration and seed hash identically except for
//! the wall time.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliResult;

#[derive(Debug, Clone, Serialize)]
pub struct ArtifactEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule_variant_id: Option<&'static str>,
    pub results: serde_json::Value,
    pub artifacts: Vec<ArtifactEntry>,
    pub wall_time_s: f64,
}

impl Manifest {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Manifest {
            tool: "collapse-sim",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config,
            seed: None,
            rule_variant_id: None,
            results: serde_json::Value::Null,
            artifacts: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    /// Hash and record a data file.
    pub fn add_artifact(&mut self, path: &Path) -> CliResult<()> {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        self.artifacts.push(ArtifactEntry { path: name, sha256: sha256_hex(path)? });
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> CliResult<PathBuf> {
        let path = dir.join("manifest.json");
        let mut body = serde_json::to_string_pretty(self).map_err(anyhow::Error::from)?;
        body.push('\n');
        fs::write(&path, body)?;
        Ok(path)
    }
}

pub fn sha256_hex(path: &Path) -> CliResult<String> {
    let mut file = fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        use std::fmt::Write;
        write!(out, "{byte:02x}").expect("writing to String cannot fail");
    }
    Ok(out)
}
