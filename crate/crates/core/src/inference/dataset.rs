use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{RaeError, Result};
use crate::pauli::PauliString;
use crate::schedule::LayerSchedule;
use crate::FORMAT_VERSION;

/// Even-parity count for one Grover depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityRecord {
    #[serde(rename = "L")]
    pub layers: u32,
    pub n_shots: u64,
    pub e_even: u64,
}

/// Parity counts across a layer schedule for a single Pauli term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityDataset {
    pub version: u32,
    pub pauli: PauliString,
    pub records: Vec<ParityRecord>,
    #[serde(default)]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl ParityDataset {
    pub fn new(pauli: PauliString, records: Vec<ParityRecord>) -> Result<Self> {
        let ds = Self {
            version: FORMAT_VERSION,
            pauli,
            records,
            metadata: BTreeMap::new(),
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != FORMAT_VERSION {
            return Err(RaeError::Schema(format!("unsupported dataset version {}", self.version)));
        }
        let mut seen = std::collections::BTreeSet::new();
        for r in &self.records {
            if r.n_shots == 0 {
                return Err(RaeError::Schema(format!("record L={} has zero shots", r.layers)));
            }
            if r.e_even > r.n_shots {
                return Err(RaeError::Schema(format!(
                    "record L={} has e_even {} > n_shots {}",
                    r.layers, r.e_even, r.n_shots
                )));
            }
            if !seen.insert(r.layers) {
                return Err(RaeError::Schema(format!("duplicate record for L={}", r.layers)));
            }
        }
        Ok(())
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// True when every record is at depth 0.
    pub fn depth_zero_only(&self) -> bool {
        self.records.iter().all(|r| r.layers == 0)
    }

    pub fn record(&self, layers: u32) -> Option<&ParityRecord> {
        self.records.iter().find(|r| r.layers == layers)
    }

    /// The schedule implied by the records, if they share a shot count.
    pub fn schedule(&self) -> Option<LayerSchedule> {
        let shots = self.records.first()?.n_shots;
        if self.records.iter().any(|r| r.n_shots != shots) {
            return None;
        }
        LayerSchedule::from_unsorted(self.records.iter().map(|r| r.layers).collect(), shots).ok()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ds: Self = serde_json::from_str(text)?;
        ds.validate()?;
        Ok(ds)
    }
}
