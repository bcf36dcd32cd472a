use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::Formats;
use crate::CliError;

pub const MANIFEST: &str = "manifest.json";

/// Everything needed to rerun a command and check its outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Command line after the binary name, without `--out` and `--threads`.
    pub argv: Vec<String>,
    pub params: serde_json::Value,
    /// File name to hex SHA-256 of its bytes.
    pub outputs: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes files into one directory and remembers their hashes.
pub struct OutDir {
    dir: PathBuf,
    pub formats: Formats,
    outputs: BTreeMap<String, String>,
}

impl OutDir {
    pub fn create(dir: &Path, formats: Formats) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            formats,
            outputs: BTreeMap::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.outputs.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    pub fn csv(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        if self.formats.csv {
            self.write(name, text.as_bytes())?;
        }
        Ok(())
    }

    pub fn raster(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        if self.formats.raster {
            self.write(name, bytes)?;
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        if self.formats.json {
            let mut text = serde_json::to_string_pretty(value).expect("serializable");
            text.push('\n');
            self.write(name, text.as_bytes())?;
        }
        Ok(())
    }

    /// Writes `manifest.json` (not itself hashed).
    pub fn finish(self, command: &str, argv: Vec<String>, params: serde_json::Value) -> Result<RunManifest, CliError> {
        let m = RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            argv,
            params,
            outputs: self.outputs,
        };
        let mut text = serde_json::to_string_pretty(&m).expect("serializable");
        text.push('\n');
        let path = self.dir.join(MANIFEST);
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(m)
    }
}

/// Drops `--out`, `--threads` and their values from a command line.
pub fn replayable_argv(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
            continue;
        }
        if a == "--out" || a == "--threads" {
            skip = true;
            continue;
        }
        if a.starts_with("--out=") || a.starts_with("--threads=") {
            continue;
        }
        out.push(a.clone());
    }
    out
}
