//! File writers. All numbers go through `ryu`/`serde_json`, which print the
//! shortest decimal that round-trips, so equal results give equal bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))
}

/// Writes `header` and then one record per row, even when there are none.
pub fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(BufWriter::new(file));
    w.write_record(header).map_err(|e| io(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| io(path, e))?;
    }
    w.flush().map_err(|e| io(path, e))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(format!("serializing JSON: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = to_json(value)?;
    let mut f = File::create(path).map_err(|e| io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| io(path, e))
}

#[derive(Debug, Serialize)]
pub struct OutputFile {
    pub file: &'static str,
    pub columns: &'static [&'static str],
}

/// Run description written next to the outputs. Holds nothing that varies
/// between identical runs; wall time and worker count go to `timing.json`.
#[derive(Debug, Serialize)]
pub struct Manifest<'a, C: Serialize> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: Option<u64>,
    pub config: &'a C,
    pub outputs: Vec<OutputFile>,
    /// Files that are not reproducible byte-for-byte.
    pub volatile: Vec<&'static str>,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub wall_seconds: f64,
    pub parallelism: usize,
}

pub const OCCUPATION_COLUMNS: &[&str] = &["t_label", "bin_lo", "bin_hi", "mass"];
pub const ORDERING_COLUMNS: &[&str] = &["t_label", "y", "z", "weight"];
pub const TIGHTNESS_COLUMNS: &[&str] = &["t_label", "M", "occ_escape", "ord_escape", "stderr", "occ_stderr"];
pub const LEDGER_COLUMNS: &[&str] = &["t_label", "t", "holding", "ordering", "total", "stderr", "ordering_stderr"];
pub const RENEWAL_COLUMNS: &[&str] = &["t_label", "t", "n", "n_over_t", "stderr", "sigma_over_n", "sigma_stderr"];
pub const TRACE_COLUMNS: &[&str] = &["event_time", "y", "z", "i", "j", "is_zero"];
