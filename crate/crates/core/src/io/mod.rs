//! File formats and the command pipelines behind the CLI.

pub mod commands;
pub mod config;
pub mod data;
pub mod report;
pub mod svg;

pub use commands::{run_fit, run_ladder, run_simulate};
pub use config::RunConfig;
pub use data::{ingest_spectrum, read_spectrum_csv, write_spectrum_csv, IngestOptions};
pub use report::{FitReport, LadderReport, ParameterSnapshot, PeakReport, SCHEMA_VERSION};

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_file(path, &s)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&s)?)
}
