use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::CliError;

pub const SCHEMA: &str = "v1";

/// Envelope shared by every JSON report. `timestamp` is the only field that
/// varies between identical runs, and it is written last.
#[derive(Debug, Serialize)]
pub struct Report<'a, T: Serialize> {
    pub schema: &'static str,
    pub kind: &'a str,
    pub config_hash: &'a str,
    pub seed: Option<u64>,
    pub data: T,
    pub timestamp: u64,
}

pub fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

pub fn to_json<T: Serialize>(kind: &str, config_hash: &str, seed: Option<u64>, data: T) -> Result<String, CliError> {
    let report = Report { schema: SCHEMA, kind, config_hash, seed, data, timestamp: now() };
    let mut s = serde_json::to_string_pretty(&report)?;
    s.push('\n');
    Ok(s)
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

/// Drop the `"timestamp": ...` line so two reports can be compared.
pub fn strip_timestamp(json: &str) -> String {
    json.lines().filter(|l| !l.trim_start().starts_with("\"timestamp\"")).collect::<Vec<_>>().join("\n")
}
