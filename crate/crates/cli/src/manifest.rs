use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::io::sha256_file;

/// Record of one invocation, written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: serde_json::Value,
    /// Input path to SHA-256 of its contents.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub seed: u64,
    pub workers: usize,
    pub version: String,
    pub duration_seconds: f64,
}

pub struct Run {
    subcommand: &'static str,
    started: Instant,
    inputs: BTreeMap<String, String>,
    outputs: Vec<String>,
}

impl Run {
    pub fn new(subcommand: &'static str) -> Self {
        Run { subcommand, started: Instant::now(), inputs: BTreeMap::new(), outputs: Vec::new() }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let key = path.display().to_string();
        if let std::collections::btree_map::Entry::Vacant(e) = self.inputs.entry(key) {
            e.insert(sha256_file(path)?);
        }
        Ok(())
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn finish(self, config: serde_json::Value, seed: u64, workers: usize, path: &Path) -> Result<RunManifest> {
        let manifest = RunManifest {
            subcommand: self.subcommand.to_string(),
            config,
            inputs: self.inputs,
            outputs: self.outputs,
            seed,
            workers,
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_seconds: self.started.elapsed().as_secs_f64(),
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(file, &manifest)?;
        log::info!("manifest written to {}", path.display());
        Ok(manifest)
    }
}

/// `<output>.manifest.json`, or `<subcommand>.manifest.json` when the data
/// went to standard output.
pub fn default_path(subcommand: &str, output: Option<&PathBuf>) -> PathBuf {
    match output {
        Some(out) => {
            let mut s = out.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        }
        None => PathBuf::from(format!("{subcommand}.manifest.json")),
    }
}
