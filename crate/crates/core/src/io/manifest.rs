//! Run manifests and atomic output writing.
//!
//! All output files are produced in memory first. Each one is written to a
//! temporary name in the target directory and renamed into place, and the
//! manifest is written last. A run that fails leaves no manifest behind.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::experiments::ExperimentConfig;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

impl ManifestEntry {
    pub fn for_bytes(name: &str, data: &[u8]) -> Self {
        Self { name: name.to_string(), bytes: data.len() as u64, sha256: hex::encode(Sha256::digest(data)) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub created_unix: u64,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub files: Vec<ManifestEntry>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, config: &ExperimentConfig) -> Self {
        let created_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            created_unix,
            seed,
            config: config.clone(),
            files: Vec::new(),
        }
    }

    pub fn read(dir: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(dir.join(MANIFEST_NAME))?)?)
    }

    /// Names of listed files whose size or hash no longer match.
    pub fn verify(&self, dir: &Path) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for entry in &self.files {
            let data = std::fs::read(dir.join(&entry.name))?;
            if ManifestEntry::for_bytes(&entry.name, &data) != *entry {
                bad.push(entry.name.clone());
            }
        }
        Ok(bad)
    }
}

fn write_atomic(path: &Path, data: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, data)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes `files` into `dir`, then the manifest listing them.
pub fn write_run(dir: &Path, mut manifest: RunManifest, files: &[(String, Vec<u8>)]) -> Result<RunManifest> {
    std::fs::create_dir_all(dir)?;
    manifest.files.clear();
    for (name, data) in files {
        write_atomic(&dir.join(name), data)?;
        manifest.files.push(ManifestEntry::for_bytes(name, data));
    }
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write_atomic(&dir.join(MANIFEST_NAME), text.as_bytes())?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_abc() {
        let e = ManifestEntry::for_bytes("a", b"abc");
        assert_eq!(e.sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        assert_eq!(e.bytes, 3);
    }

    #[test]
    fn write_and_verify() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        let m = RunManifest::new("test", 5, &ExperimentConfig::default());
        let files = vec![("a.csv".to_string(), b"x\n1\n".to_vec()), ("b.txt".to_string(), b"hi".to_vec())];
        let written = write_run(&out, m, &files).unwrap();
        let read = RunManifest::read(&out).unwrap();
        assert_eq!(read, written);
        assert!(read.verify(&out).unwrap().is_empty());
        std::fs::write(out.join("b.txt"), b"changed").unwrap();
        assert_eq!(read.verify(&out).unwrap(), vec!["b.txt".to_string()]);
        let leftovers: Vec<_> = std::fs::read_dir(&out)
            .unwrap()
            .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "tmp"))
            .collect();
        assert!(leftovers.is_empty());
    }
}
