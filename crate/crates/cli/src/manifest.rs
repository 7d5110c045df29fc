use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Written next to every output file as `<file>.manifest.json`. Holds no
/// timestamps so repeated runs produce identical bytes.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub master_seed: Option<u64>,
    pub tool_version: &'static str,
    /// Input path → sha256 of its contents.
    pub input_hashes: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, master_seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            arguments: std::env::args().skip(1).collect(),
            master_seed,
            tool_version: env!("CARGO_PKG_VERSION"),
            input_hashes: BTreeMap::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path, contents: &[u8]) {
        let digest = Sha256::digest(contents);
        self.input_hashes
            .insert(path.display().to_string(), hex::encode(digest));
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn write_beside(&self, output: &Path) -> Result<()> {
        let path = Self::path_for(output);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}
