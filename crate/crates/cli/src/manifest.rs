//! Run manifest: resolved configuration, seed and output checksums.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub preset: Option<String>,
    /// Canonical configuration text with every key expanded.
    pub config: String,
    pub seed: u64,
    pub threads: Option<usize>,
    pub duration_seconds: f64,
    pub outputs: Vec<OutputFile>,
    pub derived: serde_json::Value,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("manifest is not valid JSON of the expected shape")
    }
}

/// Heuristic used by `--config`: a JSON object is taken to be a manifest.
pub fn looks_like_manifest(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Files written into one output directory, with their checksums.
pub struct OutputSet {
    dir: PathBuf,
    files: Vec<OutputFile>,
}

impl OutputSet {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write<F>(&mut self, name: &str, render: F) -> Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> ris_core::Result<()>,
    {
        let mut buf = Vec::new();
        render(&mut buf).with_context(|| format!("cannot render {name}"))?;
        let path = self.dir.join(name);
        fs::write(&path, &buf).with_context(|| format!("cannot write {}", path.display()))?;
        self.files.push(OutputFile {
            path: name.to_string(),
            bytes: buf.len() as u64,
            sha256: sha256_hex(&buf),
        });
        Ok(())
    }

    pub fn files(&self) -> &[OutputFile] {
        &self.files
    }

    /// Writes `manifest.json` through a temporary file and a rename.
    pub fn finish(self, mut manifest: Manifest) -> Result<PathBuf> {
        manifest.outputs = self.files;
        let mut text = serde_json::to_vec_pretty(&manifest)?;
        text.push(b'\n');
        let tmp = self.dir.join(".manifest.json.tmp");
        let target = self.dir.join("manifest.json");
        {
            let mut f = fs::File::create(&tmp).with_context(|| format!("cannot create {}", tmp.display()))?;
            f.write_all(&text)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &target).with_context(|| format!("cannot move manifest into {}", target.display()))?;
        Ok(target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut set = OutputSet::create(dir.path()).unwrap();
        set.write("a.txt", |b| {
            b.extend_from_slice(b"abc");
            Ok(())
        })
        .unwrap();
        let m = Manifest {
            tool: "ris-sim".into(),
            version: "0".into(),
            command: "montecarlo".into(),
            preset: None,
            config: "[run]\nseed = 3\n".into(),
            seed: 3,
            threads: Some(2),
            duration_seconds: 0.5,
            outputs: vec![],
            derived: serde_json::Value::Null,
        };
        let path = set.finish(m).unwrap();
        let back = Manifest::parse(&fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(
            back.outputs[0].sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(back.seed, 3);
        assert!(!dir.path().join(".manifest.json.tmp").exists());
        assert!(looks_like_manifest("  {\"a\":1}"));
        assert!(!looks_like_manifest("[run]"));
    }
}
