use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::RunConfig;
use crate::error::Result;
use crate::lattice::{CubeFamily, GridSpec};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Common header of every JSON report.
#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub grid: &'a GridSpec,
    pub family: CubeFamily,
    #[serde(flatten)]
    pub body: T,
}

pub struct Writer {
    dir: PathBuf,
    config_hash: String,
    seed: u64,
    grid: GridSpec,
    family: CubeFamily,
}

impl Writer {
    pub fn new(dir: &Path, config: &RunConfig) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config_hash: config.hash()?,
            seed: config.seed,
            grid: config.grid.clone(),
            family: config.family(),
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, body: T) -> Result<()> {
        let envelope = Envelope {
            schema_version: SCHEMA_VERSION,
            tool: TOOL,
            tool_version: TOOL_VERSION,
            config_hash: self.config_hash.clone(),
            seed: self.seed,
            grid: &self.grid,
            family: self.family,
            body,
        };
        let mut text = serde_json::to_string_pretty(&envelope)?;
        text.push('\n');
        let path = self.path(name);
        fs::write(path, text)?;
        Ok(())
    }

    /// CSV with a header row; fields are written as given.
    pub fn csv(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<()> {
        let path = self.path(name);
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest round-trip decimal form; empty for a missing value.
pub fn num(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:?}"),
        None => String::new(),
    }
}

/// Characters kept in file names: ASCII alphanumerics, `-`, `_` and `.`.
pub fn file_stem(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(num(Some(0.1)), "0.1");
        assert_eq!(num(Some(2.0)), "2.0");
        assert_eq!(num(None), "");
        assert_eq!(file_stem("a b/c_s0.5"), "a_b_c_s0.5");
    }
}
