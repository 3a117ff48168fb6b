//! Versioned JSON envelopes and artifact output.

use std::path::PathBuf;

use fglab::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{RunConfig, Tolerances};

pub const SCHEMA_VERSION: u32 = 1;
pub const OUT_DIR_ENV: &str = "FGLAB_OUT_DIR";

#[derive(Debug, Serialize)]
pub struct Versions {
    pub fglab: &'static str,
    pub cli: &'static str,
    pub series_schema: u32,
}

impl Default for Versions {
    fn default() -> Self {
        Self {
            fglab: fglab::VERSION,
            cli: env!("CARGO_PKG_VERSION"),
            series_schema: fglab::series::SCHEMA_VERSION,
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Envelope<'a> {
    pub schema_version: u32,
    pub command: &'a str,
    pub config_hash: String,
    pub config: &'a RunConfig,
    pub seed: u64,
    pub tolerances: &'a Tolerances,
    pub versions: Versions,
    pub result: serde_json::Value,
}

pub fn config_hash(config: &RunConfig) -> Result<String> {
    let canonical = serde_json::to_string(config)?;
    Ok(hex::encode(Sha256::digest(canonical.as_bytes())))
}

pub fn envelope<'a>(command: &'a str, config: &'a RunConfig, result: serde_json::Value) -> Result<Envelope<'a>> {
    Ok(Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        config_hash: config_hash(config)?,
        config,
        seed: config.seed,
        tolerances: &config.tolerances,
        versions: Versions::default(),
        result,
    })
}

#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for ErrorReport {
    fn from(e: &Error) -> Self {
        Self {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

pub fn out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Writes named artifacts into the output directory.
pub fn write_artifacts(files: &[(String, String)]) -> Result<Vec<PathBuf>> {
    let dir = out_dir();
    std::fs::create_dir_all(&dir)?;
    files
        .iter()
        .map(|(name, contents)| {
            let path = dir.join(name);
            std::fs::write(&path, contents)?;
            Ok(path)
        })
        .collect()
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
