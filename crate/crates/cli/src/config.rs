//! Circuit fault-inventory files.
//!
//! ```json
//! {
//!   "z_recovery": { "target_readout_detectors": 1, "helper_locations": 1 },
//!   "full_to_z": {
//!     "ancilla_detectors": 4,
//!     "couplings_per_qubit": 1,
//!     "coupling_effect": "z-erasure",
//!     "coupling_spoils_measurement": false
//!   }
//! }
//! ```
//!
//! Missing fields take their defaults. The hash recorded in run manifests is
//! the SHA-256 of the normalized JSON, so it does not depend on whitespace or
//! on which defaults were spelled out.

use std::path::Path;

use erasure_ft::circuits::{CircuitConfig, CouplingEffect, FullToZFaults, ZRecoveryFaults};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingEffectFile {
    None,
    ZErasure,
    FullErasure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZRecoveryFile {
    pub target_readout_detectors: u32,
    pub helper_locations: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FullToZFile {
    pub ancilla_detectors: u32,
    pub couplings_per_qubit: u32,
    pub coupling_effect: CouplingEffectFile,
    pub coupling_spoils_measurement: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircuitConfigFile {
    pub z_recovery: ZRecoveryFile,
    pub full_to_z: FullToZFile,
}

impl Default for ZRecoveryFile {
    fn default() -> Self {
        CircuitConfigFile::from(&CircuitConfig::default()).z_recovery
    }
}

impl Default for FullToZFile {
    fn default() -> Self {
        CircuitConfigFile::from(&CircuitConfig::default()).full_to_z
    }
}

impl From<&CircuitConfig> for CircuitConfigFile {
    fn from(c: &CircuitConfig) -> Self {
        Self {
            z_recovery: ZRecoveryFile {
                target_readout_detectors: c.z_recovery.target_readout_detectors,
                helper_locations: c.z_recovery.helper_locations,
            },
            full_to_z: FullToZFile {
                ancilla_detectors: c.full_to_z.ancilla_detectors,
                couplings_per_qubit: c.full_to_z.couplings_per_qubit,
                coupling_effect: match c.full_to_z.coupling_effect {
                    CouplingEffect::None => CouplingEffectFile::None,
                    CouplingEffect::ZErasure => CouplingEffectFile::ZErasure,
                    CouplingEffect::FullErasure => CouplingEffectFile::FullErasure,
                },
                coupling_spoils_measurement: c.full_to_z.coupling_spoils_measurement,
            },
        }
    }
}

impl From<&CircuitConfigFile> for CircuitConfig {
    fn from(f: &CircuitConfigFile) -> Self {
        Self {
            z_recovery: ZRecoveryFaults {
                target_readout_detectors: f.z_recovery.target_readout_detectors,
                helper_locations: f.z_recovery.helper_locations,
            },
            full_to_z: FullToZFaults {
                ancilla_detectors: f.full_to_z.ancilla_detectors,
                couplings_per_qubit: f.full_to_z.couplings_per_qubit,
                coupling_effect: match f.full_to_z.coupling_effect {
                    CouplingEffectFile::None => CouplingEffect::None,
                    CouplingEffectFile::ZErasure => CouplingEffect::ZErasure,
                    CouplingEffectFile::FullErasure => CouplingEffect::FullErasure,
                },
                coupling_spoils_measurement: f.full_to_z.coupling_spoils_measurement,
            },
        }
    }
}

pub fn parse_config(text: &str, path: &Path) -> Result<CircuitConfig> {
    let file: CircuitConfigFile =
        serde_json::from_str(text).map_err(|source| CliError::ConfigFile {
            path: path.into(),
            source,
        })?;
    let config = CircuitConfig::from(&file);
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<CircuitConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text, path)
}

pub fn config_hash(config: &CircuitConfig) -> String {
    let normalized =
        serde_json::to_vec(&CircuitConfigFile::from(config)).expect("config serializes");
    hex::encode(Sha256::digest(&normalized))
}
