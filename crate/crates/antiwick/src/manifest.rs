//! Run manifests: one `<stem>.run.json` per invocation.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::format::{read_json, with_suffix, write_json, FieldManifest};

#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    /// Input file → SHA-256.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<OutputRecord>,
    pub versions: BTreeMap<String, String>,
    /// Seconds; the only field expected to differ between identical runs.
    pub wall_time: f64,
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn display(path: &Path) -> String {
    path.to_string_lossy().into_owned()
}

/// Collects inputs and outputs while a command runs.
pub struct Recorder {
    command: String,
    parameters: Value,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    start: Instant,
}

impl Recorder {
    pub fn new(command: &str, parameters: Value) -> Self {
        Self {
            command: command.into(),
            parameters,
            inputs: Vec::new(),
            outputs: Vec::new(),
            start: Instant::now(),
        }
    }

    /// Records an input; field and kernel manifests bring their data file.
    pub fn input(&mut self, path: impl Into<PathBuf>) {
        let path = path.into();
        if let Ok(m) = read_json::<FieldManifest>(&path) {
            let dir = path.parent().unwrap_or_else(|| Path::new("."));
            self.inputs.push(dir.join(m.data));
        }
        self.inputs.push(path);
    }

    pub fn outputs(&mut self, paths: impl IntoIterator<Item = PathBuf>) {
        self.outputs.extend(paths);
    }

    /// Writes `<stem>.run.json` and returns its path.
    pub fn finish(self, stem: &Path) -> CliResult<PathBuf> {
        let mut inputs = BTreeMap::new();
        for p in &self.inputs {
            inputs.insert(display(p), sha256_file(p)?);
        }
        let outputs = self
            .outputs
            .iter()
            .map(|p| {
                Ok(OutputRecord {
                    path: display(p),
                    sha256: sha256_file(p)?,
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        let mut versions = BTreeMap::new();
        versions.insert("antiwick".into(), env!("CARGO_PKG_VERSION").into());
        versions.insert("format".into(), "1".into());
        let manifest = RunManifest {
            command: self.command,
            parameters: self.parameters,
            inputs,
            outputs,
            versions,
            wall_time: self.start.elapsed().as_secs_f64(),
        };
        let path = with_suffix(stem, ".run.json");
        write_json(&path, &manifest)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_digests() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("a.txt");
        fs::write(&out, b"abc").unwrap();
        let mut r = Recorder::new("test", serde_json::json!({"k": 1}));
        r.input(&out);
        r.outputs([out.clone()]);
        let path = r.finish(&dir.path().join("a")).unwrap();
        let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
        let digest = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad";
        assert_eq!(v["outputs"][0]["sha256"], digest);
        assert_eq!(v["inputs"][out.to_string_lossy().as_ref()], digest);
    }
}
