use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use bds_core::ValidationReport;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::GlobalOpts;

pub const TOOL: &str = "bds";

/// Envelope shared by every JSON report.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report<T> {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// SHA-256 of the compact JSON form of the input function.
    pub spec_sha256: String,
    /// Present when the input was canonicalized before use.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonicalized: Option<Canonicalized>,
    pub knobs: serde_json::Value,
    pub partial: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub result: T,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Canonicalized {
    pub n_prime: usize,
    pub spec_sha256: String,
    pub input_validation: ValidationReport,
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub struct Envelope {
    pub command: &'static str,
    pub spec_sha256: String,
    pub canonicalized: Option<Canonicalized>,
    pub knobs: serde_json::Value,
    pub timestamp: bool,
}

impl Envelope {
    pub fn wrap<T: Serialize>(&self, partial: bool, result: T) -> Report<T> {
        Report {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command.into(),
            spec_sha256: self.spec_sha256.clone(),
            canonicalized: self.canonicalized.clone(),
            knobs: self.knobs.clone(),
            partial,
            timestamp: self.timestamp.then(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            }),
            result,
        }
    }
}

fn write_out(global: &GlobalOpts, bytes: &[u8]) -> Result<()> {
    match &global.out {
        Some(path) => write_file(path, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub fn emit_json<T: Serialize>(global: &GlobalOpts, report: &Report<T>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    write_out(global, text.as_bytes())
}

pub fn emit_csv(global: &GlobalOpts, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| anyhow::anyhow!("csv: {e}"))?;
    write_out(global, &bytes)
}
