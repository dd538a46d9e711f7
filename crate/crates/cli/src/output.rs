//! Atomic file output and run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Collects the files of one run and writes them through a temporary file
/// in the output directory followed by a rename.
pub struct OutputSet {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutputSet {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(bytes)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        self.written.push(name.to_string());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    /// Writes `<subcommand>.manifest.json` listing the files written so far.
    pub fn finish(mut self, subcommand: &str, config: &RunConfig) -> Result<PathBuf, CliError> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            tool: &'a str,
            version: &'a str,
            subcommand: &'a str,
            seed: u64,
            outputs: &'a [String],
            config: &'a RunConfig,
        }
        let outputs = self.written.clone();
        let manifest = Manifest {
            tool: "nodeqmc",
            version: VERSION,
            subcommand,
            seed: config.seed,
            outputs: &outputs,
            config,
        };
        self.write_json(&format!("{subcommand}.manifest.json"), &manifest)
    }
}

/// Renders with a writer-based formatter into memory.
pub fn render(f: impl FnOnce(&mut Vec<u8>) -> nodeqmc::error::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}
