use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Provenance of one run. Embedded in JSON written to stdout (without a
/// timestamp, so output stays byte-identical across runs) and written as a
/// `<out>.manifest.json` sidecar next to every output file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub model: String,
    pub parameters: BTreeMap<String, String>,
    pub circuit_config_hash: String,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp_unix: Option<u64>,
}

impl RunManifest {
    pub fn new(command: &str, model: &str, circuit_config_hash: &str) -> Self {
        Self {
            command: command.into(),
            model: model.into(),
            parameters: BTreeMap::new(),
            circuit_config_hash: circuit_config_hash.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            timestamp_unix: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.into(), value.to_string());
        self
    }

    pub fn stamped(mut self) -> Self {
        self.timestamp_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
        self
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Writes `body` to `out` and the stamped manifest next to it.
pub fn write_with_manifest(out: &Path, body: &str, manifest: &RunManifest) -> Result<()> {
    std::fs::write(out, body).map_err(|e| CliError::io(out, e))?;
    let side = sidecar_path(out);
    let text =
        serde_json::to_string_pretty(&manifest.clone().stamped()).expect("manifest serializes");
    std::fs::write(&side, text + "\n").map_err(|e| CliError::io(side, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_name() {
        assert_eq!(
            sidecar_path(Path::new("out/sweep.csv")),
            Path::new("out/sweep.csv.manifest.json")
        );
    }

    #[test]
    fn unstamped_manifest_has_no_timestamp() {
        let m = RunManifest::new("sweep", "ideal", "abc").param("eps", "0.1");
        let v = serde_json::to_value(&m).unwrap();
        assert!(v.get("timestamp_unix").is_none());
        assert!(m.stamped().timestamp_unix.is_some());
    }
}
