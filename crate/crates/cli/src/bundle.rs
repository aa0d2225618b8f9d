//! Report bundles on disk.
//!
//! A bundle directory holds `config.toml` (canonical form), `table.csv`,
//! `verdicts.jsonl` (one record per line), `log.txt` and `header.json`.
//! The digest covers the first four; the header's timestamp is left out.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::report::Record;

pub const CONFIG_FILE: &str = "config.toml";
pub const TABLE_FILE: &str = "table.csv";
pub const VERDICTS_FILE: &str = "verdicts.jsonl";
pub const LOG_FILE: &str = "log.txt";
pub const HEADER_FILE: &str = "header.json";

pub const TOOL: &str = "unispec";

#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub config: ExperimentConfig,
    pub table: String,
    pub records: Vec<Record>,
    pub log: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub config_digest: String,
    pub digest: String,
    /// seconds since the Unix epoch; not covered by the digest
    pub created_unix: u64,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_hex(text: &str) -> String {
    hex(&Sha256::digest(text.as_bytes()))
}

/// Digest of the semantic content, from the file texts as written.
pub fn digest_of(config: &str, table: &str, verdicts: &str, log: &str) -> String {
    let mut h = Sha256::new();
    h.update(format!("{TOOL} {}\n", env!("CARGO_PKG_VERSION")));
    for (name, text) in [
        (CONFIG_FILE, config),
        (TABLE_FILE, table),
        (VERDICTS_FILE, verdicts),
        (LOG_FILE, log),
    ] {
        h.update(format!("{name} {}\n", text.len()));
        h.update(text.as_bytes());
    }
    hex(&h.finalize())
}

impl Bundle {
    pub fn config_text(&self) -> String {
        self.config.canonical()
    }

    pub fn verdicts_text(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&serde_json::to_string(r).expect("records serialize"));
            s.push('\n');
        }
        s
    }

    pub fn log_text(&self) -> String {
        let mut s = self.log.join("\n");
        s.push('\n');
        s
    }

    pub fn digest(&self) -> String {
        digest_of(
            &self.config_text(),
            &self.table,
            &self.verdicts_text(),
            &self.log_text(),
        )
    }

    pub fn header(&self) -> Header {
        let created_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Header {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_digest: sha256_hex(&self.config_text()),
            digest: self.digest(),
            created_unix,
        }
    }

    /// Writes every file into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<Header, CliError> {
        fs::create_dir_all(dir)?;
        let header = self.header();
        fs::write(dir.join(CONFIG_FILE), self.config_text())?;
        fs::write(dir.join(TABLE_FILE), &self.table)?;
        fs::write(dir.join(VERDICTS_FILE), self.verdicts_text())?;
        fs::write(dir.join(LOG_FILE), self.log_text())?;
        fs::write(
            dir.join(HEADER_FILE),
            serde_json::to_string_pretty(&header).expect("header serializes") + "\n",
        )?;
        Ok(header)
    }
}

/// The raw file texts of a bundle directory.
pub struct BundleFiles {
    pub config: String,
    pub table: String,
    pub verdicts: String,
    pub log: String,
    pub header: String,
}

impl BundleFiles {
    pub fn read(dir: &Path) -> Result<Self, CliError> {
        let get = |name: &str| {
            fs::read_to_string(dir.join(name))
                .map_err(|e| CliError::Run(format!("bundle file {}: {e}", dir.join(name).display())))
        };
        Ok(BundleFiles {
            config: get(CONFIG_FILE)?,
            table: get(TABLE_FILE)?,
            verdicts: get(VERDICTS_FILE)?,
            log: get(LOG_FILE)?,
            header: get(HEADER_FILE)?,
        })
    }

    pub fn digest(&self) -> String {
        digest_of(&self.config, &self.table, &self.verdicts, &self.log)
    }
}
