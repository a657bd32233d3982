use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance block carried by every JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub version: u32,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub config_hash: String,
    pub config: &'a ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub created_unix: Option<u64>,
    pub results: T,
}

pub struct Writer<'a> {
    pub cfg: &'a ExperimentConfig,
    pub command: &'static str,
    pub timestamp: bool,
}

impl<'a> Writer<'a> {
    pub fn new(cfg: &'a ExperimentConfig, command: &'static str, timestamp: bool) -> Result<Self, CliError> {
        fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;
        Ok(Self { cfg, command, timestamp })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.cfg.out.join(name)
    }

    pub fn json<T: Serialize>(&self, name: &str, results: T) -> Result<PathBuf, CliError> {
        let created_unix = self.timestamp.then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        let env = Envelope {
            version: rae_core::FORMAT_VERSION,
            tool_version: TOOL_VERSION,
            command: self.command,
            config_hash: self.cfg.hash(),
            config: self.cfg,
            created_unix,
            results,
        };
        let mut text = serde_json::to_string_pretty(&env).map_err(|e| CliError::data(e.to_string()))?;
        text.push('\n');
        let path = self.path(name);
        write_file(&path, text.as_bytes())?;
        Ok(path)
    }

    /// CSV with a leading `#` provenance line, then a header and `rows`.
    pub fn csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
        let mut buf = format!(
            "# rae {} command={} config_hash={}\n",
            TOOL_VERSION,
            self.command,
            self.cfg.hash()
        )
        .into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            let csv_err = |e: csv::Error| CliError::data(e.to_string());
            w.write_record(header).map_err(csv_err)?;
            for r in rows {
                w.write_record(r).map_err(csv_err)?;
            }
            w.flush().map_err(|e| CliError::data(e.to_string()))?;
        }
        let path = self.path(name);
        write_file(&path, &buf)?;
        Ok(path)
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Shortest round-trip formatting for CSV cells.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
