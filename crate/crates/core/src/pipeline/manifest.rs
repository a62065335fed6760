use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};

use super::PipelineConfig;
use crate::error::{Error, Result};

/// Plain-text run record: one `key = value` per line.
///
/// Keys are grouped by prefix: `config.*` echoes the resolved configuration,
/// `output.<path>` holds the SHA-256 of every written file (paths relative to
/// the run directory), `stage.<name>.seconds` the wall-clock time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunManifest {
    entries: Vec<(String, String)>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(command: &str, cfg: &PipelineConfig) -> Self {
        let mut m = Self::default();
        m.set("toolkit.version", env!("CARGO_PKG_VERSION"));
        m.set("command", command);
        for (k, v) in cfg.entries() {
            m.set(format!("config.{k}"), v);
        }
        m
    }

    /// Appends an entry; a later value for the same key replaces the earlier one.
    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        let key = key.into();
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// `(relative path, sha256)` of every recorded output, in write order.
    pub fn output_hashes(&self) -> Vec<(&str, &str)> {
        self.entries
            .iter()
            .filter_map(|(k, v)| k.strip_prefix("output.").map(|p| (p, v.as_str())))
            .collect()
    }

    /// Writes `bytes` to `root/rel` (creating directories) and records its hash.
    pub fn write_output(&mut self, root: &Path, rel: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = root.join(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.set(format!("output.{rel}"), sha256_hex(bytes));
        Ok(path)
    }

    /// Runs `f`, recording its wall-clock time under `stage.<name>.seconds`.
    /// Failures are wrapped with the stage name.
    pub fn stage<T>(
        &mut self,
        name: &'static str,
        f: impl FnOnce(&mut Self) -> Result<T>,
    ) -> Result<T> {
        let start = Instant::now();
        let out = f(self).map_err(|e| e.in_stage(name))?;
        self.set(
            format!("stage.{name}.seconds"),
            format!("{:.3}", start.elapsed().as_secs_f64()),
        );
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut m = Self::default();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once(" = ")
                .ok_or_else(|| Error::Input(format!("malformed manifest line `{line}`")))?;
            m.set(k, v);
        }
        Ok(m)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}
