//! Run manifests written next to every output set.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// SHA-256 of `config_toml`.
    pub config_sha256: String,
    pub seed: u64,
    pub started_at: String,
    pub finished_at: String,
    /// Fully resolved configuration (overrides applied). Stored as TOML text
    /// because JSON has no representation for `-inf` dBm.
    pub config_toml: String,
    pub parameters: serde_json::Value,
}

impl RunManifest {
    pub fn new(command: &str, config_toml: String, seed: u64, parameters: serde_json::Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_sha256: checksum(&config_toml),
            seed,
            started_at: now(),
            finished_at: String::new(),
            config_toml,
            parameters,
        }
    }

    pub fn finish(&mut self) {
        self.finished_at = now();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest always serializes")
    }
}

pub fn checksum(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Configuration text echoed in a manifest, checked against its checksum.
pub fn config_from_manifest(json: &str) -> Result<String, String> {
    let m: RunManifest = serde_json::from_str(json).map_err(|e| format!("not a run manifest: {e}"))?;
    if checksum(&m.config_toml) != m.config_sha256 {
        return Err("configuration does not match the manifest checksum".into());
    }
    Ok(m.config_toml)
}
