use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] crofton::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 3,
            CliError::Core(e) => match e {
                crofton::Error::Degenerate(_) | crofton::Error::NonIntegrable(_) => 1,
                _ => 3,
            },
            CliError::Io { .. } => 3,
            CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn read_input(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Shortest decimal that parses back to the same f64.
pub fn real(x: f64) -> String {
    format!("{x:?}")
}

/// Rows accumulated in memory so that stdout and file output are identical.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| CliError::Input(e.to_string()))
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub inputs: BTreeMap<String, String>,
    pub seeds: Vec<u64>,
    pub versions: BTreeMap<String, String>,
    pub output_sha256: String,
    pub results: serde_json::Value,
}

pub fn versions() -> BTreeMap<String, String> {
    let mut v = BTreeMap::new();
    v.insert("crofton".into(), crofton::VERSION.into());
    v.insert("crofton-cli".into(), env!("CARGO_PKG_VERSION").into());
    v
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}
