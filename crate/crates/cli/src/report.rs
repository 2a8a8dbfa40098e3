//! Run reports: one JSON or CSV artifact per invocation.
//!
//! Every subcommand produces a [`RunReport`] with the same top-level keys
//! (`model`, `config`, `distribution` and/or `counts`, `diagnostics`,
//! `seed`, `wall_time_ms`), so downstream tooling can consume any run the
//! same way. The `config` object echoes every effective setting; feeding
//! it back as flags reproduces the run.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

/// Output format selector shared by all subcommands.
#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Failure carrying the process exit code: 2 for configuration problems,
/// 3 for numerical ones.
#[derive(Debug)]
pub struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 2,
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<qms_core::Error> for CliError {
    fn from(err: qms_core::Error) -> Self {
        Self {
            code: if err.is_numerical() { 3 } else { 2 },
            message: err.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self::config(err.to_string())
    }
}

/// The uniform result artifact.
#[derive(Serialize)]
pub struct RunReport {
    pub model: &'static str,
    pub config: serde_json::Value,
    /// Exact outcome probabilities, present on enumerated/ideal paths.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<BTreeMap<String, f64>>,
    /// Sampled outcome counts, present when shots were requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<BTreeMap<String, u64>>,
    pub diagnostics: serde_json::Value,
    pub seed: u64,
    pub wall_time_ms: u64,
}

impl RunReport {
    fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report is serializable");
        text.push('\n');
        text
    }

    /// Writes the report to `out`, or to stdout when no path is given.
    /// `csv_table` is the subcommand's tabular view of the same run.
    pub fn emit(
        &self,
        csv_table: &str,
        out: Option<&Path>,
        format: Format,
    ) -> Result<(), CliError> {
        let text = match format {
            Format::Json => self.to_json(),
            Format::Csv => csv_table.to_string(),
        };
        match out {
            Some(path) => {
                std::fs::write(path, text)
                    .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
                eprintln!("wrote {}", path.display());
            }
            None => print!("{text}"),
        }
        Ok(())
    }
}

pub fn distribution_csv(rows: &BTreeMap<String, f64>) -> String {
    let mut s = String::from("bitstring,probability\n");
    for (bits, p) in rows {
        s.push_str(&format!("{bits},{p}\n"));
    }
    s
}

pub fn counts_csv(rows: &BTreeMap<String, u64>) -> String {
    let mut s = String::from("bitstring,count\n");
    for (bits, c) in rows {
        s.push_str(&format!("{bits},{c}\n"));
    }
    s
}

pub fn deviation_csv(rows: &[(f64, f64)]) -> String {
    let mut s = String::from("theta,deviation\n");
    for (theta, dev) in rows {
        s.push_str(&format!("{theta},{dev}\n"));
    }
    s
}

/// Milliseconds elapsed since `start`, saturating.
pub fn elapsed_ms(start: std::time::Instant) -> u64 {
    u64::try_from(start.elapsed().as_millis()).unwrap_or(u64::MAX)
}
