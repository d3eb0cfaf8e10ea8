use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Bumped whenever a CSV header or number format changes.
pub const CSV_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// 17 significant digits in lowercase e-notation, e.g. `9.6937282835526131e-1`.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(v) => fmt_float(*v),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.iter().map(Cell::render).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Sidecar describing how an output was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub csv_schema_version: u32,
    pub command: String,
    pub command_line: Vec<String>,
    /// Effective settings after defaults, config file and flags.
    pub config: serde_json::Value,
    /// SHA-256 of the command name and the canonical JSON of `config`.
    pub config_hash: String,
    pub seed: Option<u64>,
    pub precision_bits: u32,
    pub node_counts: serde_json::Value,
    pub output_file: Option<String>,
    pub output_sha256: String,
    pub wall_clock_seconds: f64,
}

/// Hash of a command and its effective settings. `serde_json` maps keep keys
/// sorted, so equal settings give equal hashes.
pub fn config_hash(command: &str, config: &serde_json::Value) -> String {
    let canon = serde_json::to_string(config).unwrap_or_default();
    sha256_hex(format!("{command}\n{canon}").as_bytes())
}
